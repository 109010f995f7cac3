// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; everything else in the library stays generic. A
// complex<double> occupies one 128-bit half of a ymm register, so each
// register carries two amplitudes and the block size is four.

#include "kernels_detail.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <bit>
#include <cstdint>

namespace tepid::kernels::avx2 {

bool compiled() { return true; }

namespace {

inline __m256d load2(const cplx* p) {
  return _mm256_loadu_pd(reinterpret_cast<const double*>(p));
}

inline void store2(cplx* p, __m256d v) {
  _mm256_storeu_pd(reinterpret_cast<double*>(p), v);
}

// (re, im | re, im) -> (im, re | im, re)
inline __m256d swap_reim(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

// Exchange the two complex elements of a register.
inline __m256d swap128(__m256d v) { return _mm256_permute2f128_pd(v, v, 0x01); }

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(s, s);
  return _mm_cvtsd_f64(_mm_add_sd(s, sh));
}

inline std::uint64_t sign_bit(bool neg) { return neg ? 0x8000000000000000ull : 0ull; }

// Per-register sign masks implementing multiplication by i^{i_power} times
// the block-local (-1)^{popcount(o & phase & 3)} pattern. When i_power is odd
// the caller swaps re/im first; the mask then fixes the signs.
struct PhasePlan {
  __m256d m0;     // elements 0,1 of each 4-block
  __m256d m1;     // elements 2,3
  bool do_swap;   // i_power odd: swap re/im before applying masks
};

PhasePlan make_phase_plan(const PauliMasks& pm) {
  bool neg_re = false, neg_im = false;  // signs of the (re', im') slots
  switch (pm.i_power & 3u) {
    case 0: break;
    case 1: neg_re = true; break;              // (re,im) -> (-im, re)
    case 2: neg_re = neg_im = true; break;     // -> (-re, -im)
    default: neg_im = true; break;             // -> (im, -re)
  }
  const std::uint64_t low_phase = pm.phase & 3u;
  bool bs[4];
  for (unsigned o = 0; o < 4; ++o) bs[o] = std::popcount(o & low_phase) & 1u;
  PhasePlan plan;
  plan.do_swap = pm.i_power & 1u;
  plan.m0 = _mm256_castsi256_pd(_mm256_setr_epi64x(
      sign_bit(neg_re ^ bs[0]), sign_bit(neg_im ^ bs[0]),
      sign_bit(neg_re ^ bs[1]), sign_bit(neg_im ^ bs[1])));
  plan.m1 = _mm256_castsi256_pd(_mm256_setr_epi64x(
      sign_bit(neg_re ^ bs[2]), sign_bit(neg_im ^ bs[2]),
      sign_bit(neg_re ^ bs[3]), sign_bit(neg_im ^ bs[3])));
  return plan;
}

// dst block placement for a 4-block with source base `base`: the whole block
// lands at (base ^ flip) & ~3, with elements permuted by low2 = flip & 3.
template <int LOW2>
void pauli_apply_loop(cplx* dst, const cplx* src, std::size_t dim, const PauliMasks& pm) {
  const PhasePlan plan = make_phase_plan(pm);
  const std::uint64_t flip = pm.flip;
  const std::uint64_t phase = pm.phase;
  for (std::size_t base = 0; base < dim; base += 4) {
    __m256d r0 = load2(src + base);
    __m256d r1 = load2(src + base + 2);
    if (plan.do_swap) {
      r0 = swap_reim(r0);
      r1 = swap_reim(r1);
    }
    const bool neg = std::popcount(base & phase) & 1u;
    const __m256d bm = _mm256_set1_pd(neg ? -0.0 : 0.0);
    r0 = _mm256_xor_pd(r0, _mm256_xor_pd(plan.m0, bm));
    r1 = _mm256_xor_pd(r1, _mm256_xor_pd(plan.m1, bm));
    cplx* d = dst + ((base ^ flip) & ~std::uint64_t(3));
    if constexpr (LOW2 == 0) {
      store2(d, r0);
      store2(d + 2, r1);
    } else if constexpr (LOW2 == 1) {
      store2(d, swap128(r0));
      store2(d + 2, swap128(r1));
    } else if constexpr (LOW2 == 2) {
      store2(d, r1);
      store2(d + 2, r0);
    } else {
      store2(d, swap128(r1));
      store2(d + 2, swap128(r0));
    }
  }
}

template <int LOW2>
cplx pauli_dot_loop(const cplx* bra, const cplx* ket, std::size_t dim, const PauliMasks& pm) {
  const PhasePlan plan = make_phase_plan(pm);
  const std::uint64_t flip = pm.flip;
  const std::uint64_t phase = pm.phase;
  const __m256d odd_neg = _mm256_castsi256_pd(
      _mm256_setr_epi64x(0, sign_bit(true), 0, sign_bit(true)));
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  for (std::size_t base = 0; base < dim; base += 4) {
    __m256d c0 = load2(ket + base);
    __m256d c1 = load2(ket + base + 2);
    if (plan.do_swap) {
      c0 = swap_reim(c0);
      c1 = swap_reim(c1);
    }
    const bool neg = std::popcount(base & phase) & 1u;
    const __m256d bm = _mm256_set1_pd(neg ? -0.0 : 0.0);
    c0 = _mm256_xor_pd(c0, _mm256_xor_pd(plan.m0, bm));
    c1 = _mm256_xor_pd(c1, _mm256_xor_pd(plan.m1, bm));
    const cplx* a = bra + ((base ^ flip) & ~std::uint64_t(3));
    __m256d a0 = load2(a);
    __m256d a1 = load2(a + 2);
    __m256d A0, A1;
    if constexpr (LOW2 == 0) {
      A0 = a0; A1 = a1;
    } else if constexpr (LOW2 == 1) {
      A0 = swap128(a0); A1 = swap128(a1);
    } else if constexpr (LOW2 == 2) {
      A0 = a1; A1 = a0;
    } else {
      A0 = swap128(a1); A1 = swap128(a0);
    }
    acc_re = _mm256_fmadd_pd(A0, c0, acc_re);
    acc_re = _mm256_fmadd_pd(A1, c1, acc_re);
    acc_im = _mm256_fmadd_pd(A0, _mm256_xor_pd(swap_reim(c0), odd_neg), acc_im);
    acc_im = _mm256_fmadd_pd(A1, _mm256_xor_pd(swap_reim(c1), odd_neg), acc_im);
  }
  return {hsum(acc_re), hsum(acc_im)};
}

}  // namespace

void pauli_apply(cplx* dst, const cplx* src, std::size_t dim, const PauliMasks& pm) {
  if (dim < 4 || (dim & 3u)) {
    scalar::pauli_apply(dst, src, dim, pm);
    return;
  }
  switch (pm.flip & 3u) {
    case 0: pauli_apply_loop<0>(dst, src, dim, pm); break;
    case 1: pauli_apply_loop<1>(dst, src, dim, pm); break;
    case 2: pauli_apply_loop<2>(dst, src, dim, pm); break;
    default: pauli_apply_loop<3>(dst, src, dim, pm); break;
  }
}

cplx pauli_dot(const cplx* bra, const cplx* ket, std::size_t dim, const PauliMasks& pm) {
  if (dim < 4 || (dim & 3u)) return scalar::pauli_dot(bra, ket, dim, pm);
  switch (pm.flip & 3u) {
    case 0: return pauli_dot_loop<0>(bra, ket, dim, pm);
    case 1: return pauli_dot_loop<1>(bra, ket, dim, pm);
    case 2: return pauli_dot_loop<2>(bra, ket, dim, pm);
    default: return pauli_dot_loop<3>(bra, ket, dim, pm);
  }
}

cplx dot(const cplx* bra, const cplx* ket, std::size_t dim) {
  const __m256d odd_neg = _mm256_castsi256_pd(
      _mm256_setr_epi64x(0, sign_bit(true), 0, sign_bit(true)));
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= dim; i += 4) {
    const __m256d b0 = load2(bra + i);
    const __m256d b1 = load2(bra + i + 2);
    const __m256d k0 = load2(ket + i);
    const __m256d k1 = load2(ket + i + 2);
    acc_re = _mm256_fmadd_pd(b0, k0, acc_re);
    acc_re = _mm256_fmadd_pd(b1, k1, acc_re);
    acc_im = _mm256_fmadd_pd(b0, _mm256_xor_pd(swap_reim(k0), odd_neg), acc_im);
    acc_im = _mm256_fmadd_pd(b1, _mm256_xor_pd(swap_reim(k1), odd_neg), acc_im);
  }
  double re = hsum(acc_re);
  double im = hsum(acc_im);
  for (; i < dim; ++i) {
    re += bra[i].real() * ket[i].real() + bra[i].imag() * ket[i].imag();
    im += bra[i].real() * ket[i].imag() - bra[i].imag() * ket[i].real();
  }
  return {re, im};
}

void axpby(cplx a, cplx* y, cplx b, const cplx* x, std::size_t dim) {
  const __m256d a_re = _mm256_set1_pd(a.real());
  const __m256d b_re = _mm256_set1_pd(b.real());
  const __m256d a_im = _mm256_setr_pd(-a.imag(), a.imag(), -a.imag(), a.imag());
  const __m256d b_im = _mm256_setr_pd(-b.imag(), b.imag(), -b.imag(), b.imag());
  std::size_t i = 0;
  for (; i + 4 <= dim; i += 4) {
    const __m256d y0 = load2(y + i);
    const __m256d y1 = load2(y + i + 2);
    const __m256d x0 = load2(x + i);
    const __m256d x1 = load2(x + i + 2);
    const __m256d u0 = _mm256_fmadd_pd(y0, a_re, _mm256_mul_pd(swap_reim(y0), a_im));
    const __m256d u1 = _mm256_fmadd_pd(y1, a_re, _mm256_mul_pd(swap_reim(y1), a_im));
    const __m256d w0 = _mm256_fmadd_pd(x0, b_re, _mm256_mul_pd(swap_reim(x0), b_im));
    const __m256d w1 = _mm256_fmadd_pd(x1, b_re, _mm256_mul_pd(swap_reim(x1), b_im));
    store2(y + i, _mm256_add_pd(u0, w0));
    store2(y + i + 2, _mm256_add_pd(u1, w1));
  }
  for (; i < dim; ++i) y[i] = a * y[i] + b * x[i];
}

double norm_sq(const cplx* v, std::size_t dim) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= dim; i += 4) {
    const __m256d v0 = load2(v + i);
    const __m256d v1 = load2(v + i + 2);
    acc = _mm256_fmadd_pd(v0, v0, acc);
    acc = _mm256_fmadd_pd(v1, v1, acc);
  }
  double s = hsum(acc);
  for (; i < dim; ++i) s += v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
  return s;
}

}  // namespace tepid::kernels::avx2

#else  // AVX2 not available at compile time: keep the dispatcher linkable.

namespace tepid::kernels::avx2 {

bool compiled() { return false; }

void pauli_apply(cplx* dst, const cplx* src, std::size_t dim, const PauliMasks& pm) {
  scalar::pauli_apply(dst, src, dim, pm);
}
cplx pauli_dot(const cplx* bra, const cplx* ket, std::size_t dim, const PauliMasks& pm) {
  return scalar::pauli_dot(bra, ket, dim, pm);
}
cplx dot(const cplx* bra, const cplx* ket, std::size_t dim) {
  return scalar::dot(bra, ket, dim);
}
void axpby(cplx a, cplx* y, cplx b, const cplx* x, std::size_t dim) {
  scalar::axpby(a, y, b, x, dim);
}
double norm_sq(const cplx* v, std::size_t dim) { return scalar::norm_sq(v, dim); }

}  // namespace tepid::kernels::avx2

#endif
