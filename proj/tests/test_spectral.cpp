#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "tepid/errors.hpp"
#include "tepid/pauli.hpp"
#include "tepid/spectral.hpp"
#include "tepid/state.hpp"

using tepid::DensityMatrix;
using tepid::Observable;
using tepid::StateVector;

namespace {

DensityMatrix diagonal_state(int n, const std::vector<double>& probs) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(1 << n, 1 << n);
  for (std::size_t k = 0; k < probs.size(); ++k)
    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = probs[k];
  return DensityMatrix(n, m);
}

StateVector normalized(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  StateVector v = StateVector::zero_workspace(n);
  double nrm = 0.0;
  for (std::size_t k = 0; k < v.dim(); ++k) {
    v.data()[k] = {g(rng), g(rng)};
    nrm += std::norm(v.data()[k]);
  }
  for (std::size_t k = 0; k < v.dim(); ++k) v.data()[k] /= std::sqrt(nrm);
  return v;
}

}  // namespace

TEST_CASE("eigensystem sorts energies and groups degeneracies") {
  // H = Z on one qubit of two: spectrum {-1, -1, +1, +1}.
  const Observable h(2, {{1.0, "ZI"}});
  const tepid::EigenSystem es = tepid::eigensystem(h);
  CHECK(es.energies.size() == 4);
  CHECK(es.energies(0) == doctest::Approx(-1.0));
  CHECK(es.energies(1) == doctest::Approx(-1.0));
  CHECK(es.energies(2) == doctest::Approx(1.0));
  CHECK(es.energies(3) == doctest::Approx(1.0));
  REQUIRE(es.degeneracy_groups.size() == 2);
  CHECK(es.degeneracy_groups[0].size() == 2);
  CHECK(es.degeneracy_groups[1].size() == 2);
  CHECK(es.group_of(1) == es.degeneracy_groups[0]);

  // Eigenvectors actually diagonalize: H v = E v.
  for (int k = 0; k < 4; ++k) {
    const Eigen::VectorXcd v = es.vectors.col(k);
    const Eigen::VectorXcd hv = h.to_dense() * v;
    CHECK((hv - es.energies(k) * v).norm() < 1e-12);
  }
}

TEST_CASE("eigenvalues_only matches the full decomposition") {
  const Observable h(3, {{1.0, "XXI"}, {1.0, "IYY"}, {0.7, "ZZZ"}, {0.3, "IZI"}});
  const tepid::EigenSystem es = tepid::eigensystem(h);
  const Eigen::VectorXd only = tepid::eigenvalues_only(h);
  REQUIRE(only.size() == es.energies.size());
  for (Eigen::Index k = 0; k < only.size(); ++k)
    CHECK(only(k) == doctest::Approx(es.energies(k)).epsilon(1e-12));
}

TEST_CASE("fidelity of commuting diagonal states is the Bhattacharyya overlap") {
  const std::vector<double> p{0.5, 0.3, 0.2, 0.0};
  const std::vector<double> q{0.25, 0.25, 0.25, 0.25};
  double bh = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) bh += std::sqrt(p[k] * q[k]);
  const double expect = bh * bh;
  CHECK(tepid::fidelity(diagonal_state(2, p), diagonal_state(2, q)) ==
        doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("fidelity is symmetric, bounded, and 1 on identical states") {
  std::mt19937_64 rng(11);
  // Random mixed states from random purifications.
  for (int rep = 0; rep < 5; ++rep) {
    const StateVector a = normalized(rng, 4);
    const StateVector b = normalized(rng, 4);
    const DensityMatrix ra = tepid::partial_trace_ancilla(a, 2, 2);
    const DensityMatrix rb = tepid::partial_trace_ancilla(b, 2, 2);
    const double fab = tepid::fidelity(ra, rb);
    const double fba = tepid::fidelity(rb, ra);
    CHECK(fab == doctest::Approx(fba).epsilon(1e-8));
    CHECK(fab >= 0.0);
    CHECK(fab <= 1.0 + 1e-10);
    CHECK(tepid::fidelity(ra, ra) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("fidelity between pure density matrices matches pure_fidelity") {
  std::mt19937_64 rng(22);
  const StateVector a = normalized(rng, 3);
  const StateVector b = normalized(rng, 3);
  auto as_dm = [](const StateVector& s) {
    Eigen::MatrixXcd m(s.dim(), s.dim());
    for (std::size_t r = 0; r < s.dim(); ++r)
      for (std::size_t c = 0; c < s.dim(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            s.amplitude(r) * std::conj(s.amplitude(c));
    return DensityMatrix(s.n_qubits(), m);
  };
  CHECK(tepid::fidelity(as_dm(a), as_dm(b)) ==
        doctest::Approx(tepid::pure_fidelity(a, b)).epsilon(1e-8));
}

TEST_CASE("subspace fidelity sums component overlaps and checks orthonormality") {
  const StateVector e0 = StateVector::basis_state(2, 0);
  const StateVector e1 = StateVector::basis_state(2, 1);
  StateVector mix = StateVector::zero_workspace(2);
  mix.data()[0] = std::sqrt(0.5);
  mix.data()[1] = std::sqrt(0.3);
  mix.data()[2] = std::sqrt(0.2);
  CHECK(tepid::subspace_fidelity(mix, {e0, e1}) == doctest::Approx(0.8).epsilon(1e-12));

  // Non-orthonormal basis is a caller error.
  StateVector bad = StateVector::zero_workspace(2);
  bad.data()[0] = 0.5;
  CHECK_THROWS_AS(tepid::subspace_fidelity(mix, {e0, bad}), std::invalid_argument);
}

TEST_CASE("von Neumann entropy of a diagonal state is the Shannon entropy") {
  const std::vector<double> p{0.5, 0.25, 0.125, 0.125};
  double expect = 0.0;
  for (double v : p) expect -= v * std::log(v);
  CHECK(tepid::von_neumann_entropy(diagonal_state(2, p)) ==
        doctest::Approx(expect).epsilon(1e-10));
  CHECK(tepid::von_neumann_entropy(diagonal_state(2, {1.0, 0.0, 0.0, 0.0})) ==
        doctest::Approx(0.0));
}

TEST_CASE("free energy of a state combines energy and entropy") {
  const Observable h(2, {{1.0, "ZI"}, {0.5, "IZ"}});
  const std::vector<double> p{0.4, 0.3, 0.2, 0.1};
  const DensityMatrix rho = diagonal_state(2, p);
  const double beta = 2.0;
  double energy = 0.0, entropy = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    energy += p[k] * h.diagonal_element(k);
    entropy -= p[k] * std::log(p[k]);
  }
  CHECK(tepid::free_energy_of_state(h, rho, beta) ==
        doctest::Approx(energy - entropy / beta).epsilon(1e-12));
}
