#pragma once

// Internal declarations shared between the kernel dispatcher (kernels.cpp)
// and the AVX2 translation unit (kernels_avx2.cpp). Not installed.

#include "tepid/kernels.hpp"

namespace tepid::kernels::avx2 {

// True when this binary contains the AVX2 variants (the TU was compiled with
// -mavx2 -mfma). Runtime CPU support is checked separately by the dispatcher.
bool compiled();

void pauli_apply(cplx* dst, const cplx* src, std::size_t dim, const PauliMasks& pm);
cplx pauli_dot(const cplx* bra, const cplx* ket, std::size_t dim, const PauliMasks& pm);
cplx dot(const cplx* bra, const cplx* ket, std::size_t dim);
void axpby(cplx a, cplx* y, cplx b, const cplx* x, std::size_t dim);
double norm_sq(const cplx* v, std::size_t dim);

}  // namespace tepid::kernels::avx2
