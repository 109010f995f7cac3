#pragma once

// Low-level statevector kernels. Every hot loop of the simulator funnels
// through these five operations on contiguous complex<double> arrays:
//
//   pauli_apply   dst = P src          (P a Pauli word: index XOR + unit phase)
//   pauli_dot     <bra| P |ket>
//   dot           <bra|ket>
//   axpby         y = a y + b x
//   norm_sq       sum |v_k|^2
//
// Two implementations exist: a scalar reference (always available, also the
// oracle for equivalence tests) and an AVX2+FMA variant compiled in its own
// translation unit. The active backend is chosen once at startup from CPUID,
// can be forced via the TEPID_KERNELS environment variable ("scalar"/"avx2"),
// and can be switched programmatically with set_backend (intended for tests;
// not thread-safe against concurrent kernel calls).
//
// pauli_apply performs no arithmetic beyond sign flips and component swaps,
// so the scalar and AVX2 paths agree bit for bit. The reductions (pauli_dot,
// dot, norm_sq) accumulate in a different order under AVX2 and agree only to
// rounding.

#include <complex>
#include <cstddef>
#include <cstdint>

namespace tepid::kernels {

using cplx = std::complex<double>;

// Bit-mask form of a Pauli word on n qubits, acting on indices of a
// 2^n-dimensional array. Qubit q (0 = leftmost label of the ket) maps to bit
// n-1-q of the index. X and Y letters set a bit in `flip`; Y and Z letters set
// a bit in `phase`; `i_power` counts Y letters mod 4. The action is
//
//   P |x> = i^{i_power} * (-1)^{popcount(x & phase)} |x XOR flip>.
struct PauliMasks {
  std::uint64_t flip = 0;
  std::uint64_t phase = 0;
  unsigned i_power = 0;
};

void pauli_apply(cplx* dst, const cplx* src, std::size_t dim, const PauliMasks& pm);
cplx pauli_dot(const cplx* bra, const cplx* ket, std::size_t dim, const PauliMasks& pm);
cplx dot(const cplx* bra, const cplx* ket, std::size_t dim);
void axpby(cplx a, cplx* y, cplx b, const cplx* x, std::size_t dim);
double norm_sq(const cplx* v, std::size_t dim);

enum class Backend { scalar, avx2 };

Backend active_backend();
// Returns false (and leaves the backend unchanged) if the requested variant
// is not supported on this machine.
bool set_backend(Backend backend);
bool backend_supported(Backend backend);

// Scalar reference implementations, callable regardless of the active
// backend. The equivalence tests pit these against the dispatched kernels.
namespace scalar {
void pauli_apply(cplx* dst, const cplx* src, std::size_t dim, const PauliMasks& pm);
cplx pauli_dot(const cplx* bra, const cplx* ket, std::size_t dim, const PauliMasks& pm);
cplx dot(const cplx* bra, const cplx* ket, std::size_t dim);
void axpby(cplx a, cplx* y, cplx b, const cplx* x, std::size_t dim);
double norm_sq(const cplx* v, std::size_t dim);
}  // namespace scalar

}  // namespace tepid::kernels
