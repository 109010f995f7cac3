#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "tepid/errors.hpp"
#include "tepid/pauli.hpp"
#include "tepid/state.hpp"

using tepid::Observable;
using tepid::PauliString;
using tepid::StateVector;
using cplx = std::complex<double>;

namespace {

StateVector random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  StateVector v = StateVector::zero_workspace(n);
  double nrm = 0.0;
  for (std::size_t k = 0; k < v.dim(); ++k) {
    v.data()[k] = cplx(g(rng), g(rng));
    nrm += std::norm(v.data()[k]);
  }
  nrm = std::sqrt(nrm);
  for (std::size_t k = 0; k < v.dim(); ++k) v.data()[k] /= nrm;
  return v;
}

}  // namespace

TEST_CASE("pauli string parsing and masks") {
  const PauliString p("XYZI");
  CHECK(p.n_qubits() == 4);
  CHECK(p.word() == "XYZI");
  CHECK(p.weight() == 3);

  // Qubit 0 is the leftmost letter and owns the most significant bit.
  const auto masks = p.masks();
  CHECK(masks.flip == 0b1100);   // X on qubit 0, Y on qubit 1
  CHECK(masks.phase == 0b0110);  // Y on qubit 1, Z on qubit 2
  CHECK(masks.i_power == 1);     // one Y

  CHECK(PauliString::identity(3).word() == "III");
  CHECK(PauliString("II").weight() == 0);
  CHECK(PauliString("").n_qubits() == 0);  // trivial register
  CHECK_THROWS_AS(PauliString("XQ"), std::invalid_argument);
}

TEST_CASE("padding shifts masks onto the left register") {
  const PauliString p("ZX");
  const auto padded = tepid::pad_masks(p.masks(), 3);
  // On 5 qubits the word becomes ZXIII: qubit 0 -> bit 4, qubit 1 -> bit 3.
  CHECK(padded.flip == (1ull << 3));
  CHECK(padded.phase == (1ull << 4));
  CHECK(padded.i_power == p.masks().i_power);
}

TEST_CASE("observable canonicalizes terms") {
  const Observable h(2, {{0.5, "XX"}, {0.25, "XX"}, {1.0, "ZI"}, {0.0, "YY"}, {-1.0, "ZI"}});
  // Merged: XX -> 0.75; ZI cancels; YY dropped.
  CHECK(h.terms().size() == 1);
  CHECK(h.terms()[0].op.word() == "XX");
  CHECK(h.terms()[0].weight == doctest::Approx(0.75));

  CHECK_THROWS_AS(Observable(2, {{1.0, "XXX"}}), std::invalid_argument);
}

TEST_CASE("diagonal elements pick out flip-free terms") {
  const Observable h(2, {{2.0, "ZZ"}, {3.0, "ZI"}, {5.0, "XX"}});
  // |00> : ZZ=+1, ZI=+1 -> 5 ; |01> : ZZ=-1, ZI=+1 -> 1
  CHECK(h.diagonal_element(0b00) == doctest::Approx(5.0));
  CHECK(h.diagonal_element(0b01) == doctest::Approx(1.0));
  CHECK(h.diagonal_element(0b10) == doctest::Approx(-5.0));
  CHECK(h.diagonal_element(0b11) == doctest::Approx(-1.0));
}

TEST_CASE("apply_pauli acts like the dense matrix") {
  // Y|0> = i|1>, Y|1> = -i|0>; on two qubits IY touches the low bit.
  const StateVector s0 = StateVector::basis_state(2, 0b00);
  const StateVector out = tepid::apply_pauli(PauliString("IY"), s0);
  CHECK(std::abs(out.amplitude(0b01) - cplx(0, 1)) < 1e-15);
  CHECK(std::abs(out.amplitude(0b00)) < 1e-15);

  const StateVector s1 = StateVector::basis_state(2, 0b10);
  const StateVector out2 = tepid::apply_pauli(PauliString("ZX"), s1);
  // ZX|10> = (Z on qubit0=1 -> -1) (X on qubit1: 0->1) = -|11>
  CHECK(std::abs(out2.amplitude(0b11) - cplx(-1, 0)) < 1e-15);
}

TEST_CASE("to_dense agrees with term-by-term application") {
  std::mt19937_64 rng(5150);
  const Observable h(3, {{1.0, "XXI"}, {0.5, "IYY"}, {-2.0, "ZIZ"}, {0.75, "IZI"}});
  const auto dense = h.to_dense();
  for (int rep = 0; rep < 5; ++rep) {
    const StateVector psi = random_state(rng, 3);
    const StateVector hpsi = tepid::apply_observable(h, psi);
    for (std::size_t r = 0; r < psi.dim(); ++r) {
      cplx expect(0, 0);
      for (std::size_t c = 0; c < psi.dim(); ++c)
        expect += dense(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                  psi.amplitude(c);
      CHECK(std::abs(hpsi.amplitude(r) - expect) < 1e-12);
    }
  }
}

TEST_CASE("apply_observable pads a narrow observable onto the left register") {
  std::mt19937_64 rng(808);
  const Observable h(2, {{1.0, "XY"}, {0.5, "ZZ"}});
  const Observable h_wide(4, {{1.0, "XYII"}, {0.5, "ZZII"}});
  const StateVector psi = random_state(rng, 4);
  const StateVector a = tepid::apply_observable(h, psi);
  const StateVector b = tepid::apply_observable(h_wide, psi);
  for (std::size_t k = 0; k < psi.dim(); ++k)
    CHECK(std::abs(a.amplitude(k) - b.amplitude(k)) < 1e-14);
}

TEST_CASE("expectation values are real for Hermitian observables") {
  std::mt19937_64 rng(99);
  const Observable h(3, {{1.0, "XXI"}, {1.0, "IYY"}, {1.5, "ZZZ"}, {-0.5, "IIZ"}});
  const auto dense = h.to_dense();
  for (int rep = 0; rep < 5; ++rep) {
    const StateVector psi = random_state(rng, 3);
    const double got = tepid::expectation(h, psi);
    cplx expect(0, 0);
    for (std::size_t r = 0; r < psi.dim(); ++r)
      for (std::size_t c = 0; c < psi.dim(); ++c)
        expect += std::conj(psi.amplitude(r)) *
                  dense(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                  psi.amplitude(c);
    CHECK(std::abs(expect.imag()) < 1e-12);
    CHECK(got == doctest::Approx(expect.real()).epsilon(1e-10));
  }
}

TEST_CASE("density-matrix expectation matches the pure-state one") {
  std::mt19937_64 rng(1234);
  const Observable h(2, {{1.0, "XY"}, {0.5, "ZI"}, {0.25, "IZ"}});
  const StateVector psi = random_state(rng, 2);
  Eigen::MatrixXcd rho(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      rho(r, c) = psi.amplitude(static_cast<std::uint64_t>(r)) *
                  std::conj(psi.amplitude(static_cast<std::uint64_t>(c)));
  const tepid::DensityMatrix dm(2, rho);
  CHECK(tepid::expectation(h, dm) == doctest::Approx(tepid::expectation(h, psi)).epsilon(1e-12));
}

TEST_CASE("partial trace over the ancilla register matches brute force") {
  std::mt19937_64 rng(777);
  for (int n_sys : {1, 2, 3}) {
    for (int n_anc : {1, 2}) {
      const StateVector psi = random_state(rng, n_sys + n_anc);
      const tepid::DensityMatrix rho = tepid::partial_trace_ancilla(psi, n_sys, n_anc);
      const std::size_t ds = 1ull << n_sys, da = 1ull << n_anc;
      for (std::size_t s = 0; s < ds; ++s) {
        for (std::size_t t = 0; t < ds; ++t) {
          cplx expect(0, 0);
          for (std::size_t a = 0; a < da; ++a)
            expect += psi.amplitude(s * da + a) * std::conj(psi.amplitude(t * da + a));
          CHECK(std::abs(rho.entries()(static_cast<Eigen::Index>(s),
                                       static_cast<Eigen::Index>(t)) -
                         expect) < 1e-13);
        }
      }
      CHECK(rho.contract_residue() < 1e-12);
    }
  }
}

TEST_CASE("zero-qubit register is the trivial one-dimensional space") {
  const StateVector v(0);
  CHECK(v.dim() == 1);
  CHECK(std::abs(v.amplitude(0) - cplx(1, 0)) < 1e-15);
}

TEST_CASE("register width limits are enforced") {
  CHECK_THROWS_AS(StateVector(31), tepid::ResourceError);
  CHECK_THROWS_AS(StateVector(-1), std::invalid_argument);
}
