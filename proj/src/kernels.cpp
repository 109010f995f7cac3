#include "tepid/kernels.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>

#include "kernels_detail.hpp"

namespace tepid::kernels {

// ============================================================
// Scalar reference implementations
// ============================================================

namespace scalar {

// i^{i_power} * (-1)^{neg} * v, computed with component swaps and sign flips
// only (no multiplies), so the result is bit-identical to the vector path.
static inline cplx unit_phase_mul(unsigned i_power, bool neg, cplx v) {
  double re = v.real();
  double im = v.imag();
  double outr, outi;
  switch (i_power & 3u) {
    case 0: outr = re;  outi = im;  break;
    case 1: outr = -im; outi = re;  break;
    case 2: outr = -re; outi = -im; break;
    default: outr = im; outi = -re; break;
  }
  return neg ? cplx(-outr, -outi) : cplx(outr, outi);
}

void pauli_apply(cplx* dst, const cplx* src, std::size_t dim, const PauliMasks& pm) {
  for (std::size_t x = 0; x < dim; ++x) {
    const bool neg = std::popcount(x & pm.phase) & 1u;
    dst[x ^ pm.flip] = unit_phase_mul(pm.i_power, neg, src[x]);
  }
}

cplx pauli_dot(const cplx* bra, const cplx* ket, std::size_t dim, const PauliMasks& pm) {
  double acc_re = 0.0, acc_im = 0.0;
  for (std::size_t x = 0; x < dim; ++x) {
    const bool neg = std::popcount(x & pm.phase) & 1u;
    const cplx v = unit_phase_mul(pm.i_power, neg, ket[x]);
    const cplx b = bra[x ^ pm.flip];
    acc_re += b.real() * v.real() + b.imag() * v.imag();
    acc_im += b.real() * v.imag() - b.imag() * v.real();
  }
  return {acc_re, acc_im};
}

cplx dot(const cplx* bra, const cplx* ket, std::size_t dim) {
  double acc_re = 0.0, acc_im = 0.0;
  for (std::size_t x = 0; x < dim; ++x) {
    const cplx b = bra[x];
    const cplx k = ket[x];
    acc_re += b.real() * k.real() + b.imag() * k.imag();
    acc_im += b.real() * k.imag() - b.imag() * k.real();
  }
  return {acc_re, acc_im};
}

void axpby(cplx a, cplx* y, cplx b, const cplx* x, std::size_t dim) {
  for (std::size_t i = 0; i < dim; ++i) {
    y[i] = a * y[i] + b * x[i];
  }
}

double norm_sq(const cplx* v, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    acc += v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
  }
  return acc;
}

}  // namespace scalar

// ============================================================
// Runtime dispatch
// ============================================================

namespace {

struct Vtable {
  void (*pauli_apply)(cplx*, const cplx*, std::size_t, const PauliMasks&);
  cplx (*pauli_dot)(const cplx*, const cplx*, std::size_t, const PauliMasks&);
  cplx (*dot)(const cplx*, const cplx*, std::size_t);
  void (*axpby)(cplx, cplx*, cplx, const cplx*, std::size_t);
  double (*norm_sq)(const cplx*, std::size_t);
};

constexpr Vtable kScalarVtable = {&scalar::pauli_apply, &scalar::pauli_dot,
                                  &scalar::dot, &scalar::axpby, &scalar::norm_sq};
constexpr Vtable kAvx2Vtable = {&avx2::pauli_apply, &avx2::pauli_dot,
                                &avx2::dot, &avx2::axpby, &avx2::norm_sq};

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Dispatch {
  Backend backend;
  Vtable table;

  Dispatch() : backend(Backend::scalar), table(kScalarVtable) {
    Backend wanted = Backend::avx2;
    if (const char* env = std::getenv("TEPID_KERNELS")) {
      if (std::strcmp(env, "scalar") == 0) wanted = Backend::scalar;
      // "avx2" (or anything else) keeps the default preference.
    }
    if (wanted == Backend::avx2 && avx2::compiled() && cpu_has_avx2_fma()) {
      backend = Backend::avx2;
      table = kAvx2Vtable;
    }
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_supported(Backend backend) {
  if (backend == Backend::scalar) return true;
  return avx2::compiled() && cpu_has_avx2_fma();
}

bool set_backend(Backend backend) {
  if (!backend_supported(backend)) return false;
  dispatch().backend = backend;
  dispatch().table = (backend == Backend::avx2) ? kAvx2Vtable : kScalarVtable;
  return true;
}

void pauli_apply(cplx* dst, const cplx* src, std::size_t dim, const PauliMasks& pm) {
  dispatch().table.pauli_apply(dst, src, dim, pm);
}

cplx pauli_dot(const cplx* bra, const cplx* ket, std::size_t dim, const PauliMasks& pm) {
  return dispatch().table.pauli_dot(bra, ket, dim, pm);
}

cplx dot(const cplx* bra, const cplx* ket, std::size_t dim) {
  return dispatch().table.dot(bra, ket, dim);
}

void axpby(cplx a, cplx* y, cplx b, const cplx* x, std::size_t dim) {
  dispatch().table.axpby(a, y, b, x, dim);
}

double norm_sq(const cplx* v, std::size_t dim) {
  return dispatch().table.norm_sq(v, dim);
}

}  // namespace tepid::kernels
