#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "tepid/ansatz.hpp"
#include "tepid/objective.hpp"
#include "tepid/pauli.hpp"
#include "tepid/polar.hpp"
#include "tepid/spectral.hpp"
#include "tepid/state.hpp"
#include "tepid/xxz.hpp"

using tepid::AdaptiveAnsatz;
using tepid::ComputationalSubspace;
using tepid::FreeEnergyObjective;
using tepid::Observable;
using tepid::PauliString;
using tepid::StateVector;

namespace {

struct RandomProblem {
  Observable h;
  ComputationalSubspace subspace;
  std::vector<PauliString> generators;
  std::vector<double> x;  // packed [phi; theta]
};

RandomProblem random_problem(std::mt19937_64& rng, int n_system, int m, int n_ops) {
  std::uniform_real_distribution<double> angle(0.15, 1.35);
  std::uniform_real_distribution<double> theta(-1.0, 1.0);

  std::vector<std::uint64_t> pool_idx(std::size_t(1) << n_system);
  for (std::size_t i = 0; i < pool_idx.size(); ++i) pool_idx[i] = i;
  std::shuffle(pool_idx.begin(), pool_idx.end(), rng);
  pool_idx.resize(m);
  RandomProblem p{tepid::build_xxz(tepid::XXZConfig{n_system, 1.5}),
                  ComputationalSubspace::from_indices(n_system, pool_idx),
                  {},
                  {}};

  const std::vector<PauliString> pool = tepid::full_pauli_pool(n_system);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int l = 0; l < n_ops; ++l) p.generators.push_back(pool[pick(rng)]);

  for (int j = 0; j < m - 1; ++j) p.x.push_back(angle(rng));
  for (int l = 0; l < n_ops; ++l) p.x.push_back(theta(rng));
  return p;
}

}  // namespace

TEST_CASE("shannon entropy: known values, clipping, validation") {
  CHECK(tepid::shannon_entropy({1.0}) == doctest::Approx(0.0));
  CHECK(tepid::shannon_entropy({0.25, 0.25, 0.25, 0.25}) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(tepid::shannon_entropy({0.5, 0.5, 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // A tiny negative from round-off is clipped, not fatal.
  CHECK(tepid::shannon_entropy({1.0, -1e-13, 1e-13}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(tepid::shannon_entropy({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(tepid::shannon_entropy({1.2, -0.2}), std::invalid_argument);
}

TEST_CASE("objective value agrees with the reduced-state free energy") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    RandomProblem p = random_problem(rng, 3, 3, 2);
    FreeEnergyObjective obj(p.h, 2.0, p.subspace);
    obj.set_generators(p.generators);
    const double f = obj.value(p.x);

    // Independent route: build the state, trace out the ancillas, and use
    // the von Neumann entropy of the reduced density matrix.
    const StateVector psi = obj.state(p.x);
    const tepid::DensityMatrix rho =
        tepid::partial_trace_ancilla(psi, 3, tepid::ancilla_count(p.subspace.m()));
    const double f_state = tepid::free_energy_of_state(p.h, rho, 2.0);
    CHECK(f == doctest::Approx(f_state).epsilon(1e-10));

    // And the one-shot helper agrees with the stateful evaluator.
    const std::vector<double> phi(p.x.begin(), p.x.begin() + obj.n_phi());
    AdaptiveAnsatz ansatz{3, p.generators,
                          std::vector<double>(p.x.begin() + obj.n_phi(), p.x.end())};
    CHECK(tepid::free_energy(p.h, 2.0, p.subspace, phi, ansatz) ==
          doctest::Approx(f).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937_64 rng(32);
  int checked = 0;
  for (int trial = 0; trial < 36; ++trial) {
    const int n_system = 2 + trial % 2;
    const int m = 2 + trial % 3;
    const int n_ops = trial % 5;
    RandomProblem p = random_problem(rng, n_system, m, n_ops);
    FreeEnergyObjective obj(p.h, 3.0, p.subspace);
    obj.set_generators(p.generators);

    std::vector<double> grad(p.x.size());
    const double f0 = obj.value_and_gradient(p.x, grad);
    CHECK(f0 == doctest::Approx(obj.value(p.x)).epsilon(1e-14));

    const double h = 1e-5;
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      std::vector<double> hi = p.x, lo = p.x;
      hi[i] += h;
      lo[i] -= h;
      const double fd = (obj.value(hi) - obj.value(lo)) / (2.0 * h);
      CHECK(std::abs(grad[i] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("the entropy part of the cost never moves under system rotations") {
  std::mt19937_64 rng(33);
  RandomProblem p = random_problem(rng, 3, 4, 3);
  FreeEnergyObjective obj(p.h, 2.0, p.subspace);
  obj.set_generators(p.generators);

  const std::vector<double> phi(p.x.begin(), p.x.begin() + obj.n_phi());
  const double s_mu = tepid::shannon_entropy(tepid::polar_to_mu(phi));

  std::uniform_real_distribution<double> theta(-2.0, 2.0);
  for (int draw = 0; draw < 20; ++draw) {
    std::vector<double> x = p.x;
    for (int l = 0; l < obj.n_theta(); ++l) x[obj.n_phi() + l] = theta(rng);
    const StateVector psi = obj.state(x);
    const tepid::DensityMatrix rho =
        tepid::partial_trace_ancilla(psi, 3, tepid::ancilla_count(p.subspace.m()));
    CHECK(tepid::von_neumann_entropy(rho) == doctest::Approx(s_mu).epsilon(1e-10));
    // Equivalently, F and <H> differ by the same constant at every theta.
    const double f = obj.value(x);
    const double e = tepid::expectation(p.h, psi);
    CHECK(f - (e - s_mu / 2.0) == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("pool gradients match finite differences of an appended exponential") {
  std::mt19937_64 rng(34);
  RandomProblem p = random_problem(rng, 3, 3, 2);
  FreeEnergyObjective obj(p.h, 2.0, p.subspace);
  obj.set_generators(p.generators);
  const StateVector psi = obj.state(p.x);

  const std::vector<PauliString> pool = tepid::full_pauli_pool(3);
  const std::vector<double> grads = tepid::pool_gradients(psi, pool, p.h);
  REQUIRE(grads.size() == pool.size());

  const double h = 1e-5;
  for (std::size_t t = 0; t < pool.size(); t += 7) {  // sample the pool
    auto value_at = [&](double theta) {
      std::vector<double> x = p.x;
      FreeEnergyObjective probe(p.h, 2.0, p.subspace);
      std::vector<PauliString> gens = p.generators;
      gens.push_back(pool[t]);
      probe.set_generators(gens);
      x.push_back(theta);
      return probe.value(x);
    };
    const double fd = (value_at(h) - value_at(-h)) / (2.0 * h);
    CHECK(std::abs(grads[t] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }

  // Splitting the pool across workers cannot change any entry.
  const std::vector<double> grads4 = tepid::pool_gradients(psi, pool, p.h, 4);
  REQUIRE(grads4.size() == grads.size());
  for (std::size_t t = 0; t < grads.size(); ++t) CHECK(grads[t] == grads4[t]);
}

TEST_CASE("full pool enumerates non-identity words lexicographically") {
  const std::vector<PauliString> pool1 = tepid::full_pauli_pool(1);
  REQUIRE(pool1.size() == 3);
  CHECK(pool1[0].word() == "X");
  CHECK(pool1[1].word() == "Y");
  CHECK(pool1[2].word() == "Z");

  const std::vector<PauliString> pool2 = tepid::full_pauli_pool(2);
  REQUIRE(pool2.size() == 15);  // 4^2 - 1
  CHECK(pool2[0].word() == "IX");
  CHECK(pool2[1].word() == "IY");
  CHECK(pool2[2].word() == "IZ");
  CHECK(pool2[3].word() == "XI");
  CHECK(pool2[4].word() == "XX");
  CHECK(pool2.back().word() == "ZZ");
  for (std::size_t i = 1; i < pool2.size(); ++i) CHECK(pool2[i - 1].word() < pool2[i].word());

  CHECK(tepid::full_pauli_pool(3).size() == 63);

  const std::vector<PauliString> light = tepid::full_pauli_pool(2, 1);
  REQUIRE(light.size() == 6);
  CHECK(light[0].word() == "IX");
  CHECK(light[5].word() == "ZI");
}

TEST_CASE("generator bookkeeping tracks parameter counts") {
  const Observable h = tepid::build_xxz(tepid::XXZConfig{2, 0.5});
  const ComputationalSubspace sub = ComputationalSubspace::from_bitstrings(2, {"01", "10"});
  FreeEnergyObjective obj(h, 1.0, sub);
  CHECK(obj.n_phi() == 1);
  CHECK(obj.n_theta() == 0);
  CHECK(obj.n_parameters() == 1);
  obj.push_generator(PauliString("XY"));
  CHECK(obj.n_theta() == 1);
  obj.set_generators({PauliString("XY"), PauliString("ZZ"), PauliString("IX")});
  CHECK(obj.n_theta() == 3);
  CHECK(obj.n_parameters() == 4);

  // Parameter size mismatch is rejected.
  std::vector<double> bad(2, 0.1);
  CHECK_THROWS_AS(obj.value(bad), std::invalid_argument);
}
