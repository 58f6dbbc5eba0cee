#include "ends/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define ENDS_HAVE_X86 1
#else
#define ENDS_HAVE_X86 0
#endif

namespace ends::kernels {

#if ENDS_HAVE_X86

namespace {

#define ENDS_AVX2 __attribute__((target("avx2,fma")))

ENDS_AVX2 inline __m256d load2(const cplx* p)
{
    return _mm256_loadu_pd(reinterpret_cast<const double*>(p));
}

ENDS_AVX2 inline void store2(cplx* p, __m256d v)
{
    _mm256_storeu_pd(reinterpret_cast<double*>(p), v);
}

// (d_j, d_j, d_{j+1}, d_{j+1})
ENDS_AVX2 inline __m256d spread2(const double* d)
{
    __m128d dd = _mm_loadu_pd(d);
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(dd), 0x50);
}

inline cplx at(const cplx* x, std::ptrdiff_t j, std::size_t n)
{
    return (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) ? cplx(0.0) : x[j];
}

// Scalar tail shared by both stencil kernels: out_j = (dscale d_j + dshift) x_j + ... - xm1_j.
void edge(const Stencil& s, double dscale, double dshift, double k1, double k2, const cplx* x,
          const cplx* xm1, cplx* out, std::ptrdiff_t j)
{
    cplx v = (dscale * s.diag[j] + dshift) * x[j] + k1 * (at(x, j - 1, s.n) + at(x, j + 1, s.n));
    if (k2 != 0.0) v += k2 * (at(x, j - 2, s.n) + at(x, j + 2, s.n));
    out[j] = xm1 ? v - xm1[j] : v;
}

ENDS_AVX2 void banded(const Stencil& s, double dscale, double dshift, double k1, double k2,
                      const cplx* x, const cplx* xm1, cplx* out)
{
    const auto n = static_cast<std::ptrdiff_t>(s.n);
    const std::ptrdiff_t lo = 2, hi = n - 3;  // vector body covers j, j+1 in [lo, hi]
    std::ptrdiff_t j = 0;
    for (; j < lo && j < n; ++j) edge(s, dscale, dshift, k1, k2, x, xm1, out, j);
    const __m256d vk1 = _mm256_set1_pd(k1), vk2 = _mm256_set1_pd(k2);
    const __m256d vsc = _mm256_set1_pd(dscale), vsh = _mm256_set1_pd(dshift);
    for (; j + 1 <= hi; j += 2) {
        __m256d d = _mm256_fmadd_pd(vsc, spread2(s.diag + j), vsh);
        __m256d v = _mm256_mul_pd(d, load2(x + j));
        v = _mm256_fmadd_pd(vk1, _mm256_add_pd(load2(x + j - 1), load2(x + j + 1)), v);
        v = _mm256_fmadd_pd(vk2, _mm256_add_pd(load2(x + j - 2), load2(x + j + 2)), v);
        if (xm1) v = _mm256_sub_pd(v, load2(xm1 + j));
        store2(out + j, v);
    }
    for (; j < n; ++j) edge(s, dscale, dshift, k1, k2, x, xm1, out, j);
}

ENDS_AVX2 void apply_avx2(const Stencil& s, const cplx* x, cplx* y)
{
    banded(s, 1.0, 0.0, s.c1, s.c2, x, nullptr, y);
}

ENDS_AVX2 void cheb_avx2(const Stencil& s, double alpha, double beta, const cplx* x,
                         const cplx* xm1, cplx* out)
{
    banded(s, 2.0 * alpha, 2.0 * beta, 2.0 * alpha * s.c1, 2.0 * alpha * s.c2, x, xm1, out);
}

ENDS_AVX2 void axpy_avx2(cplx a, const cplx* x, cplx* y, std::size_t n)
{
    const __m256d ar = _mm256_set1_pd(a.real()), ai = _mm256_set1_pd(a.imag());
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        __m256d xv = load2(x + j);
        __m256d xs = _mm256_permute_pd(xv, 0x5);
        __m256d t = _mm256_addsub_pd(_mm256_mul_pd(ar, xv), _mm256_mul_pd(ai, xs));
        store2(y + j, _mm256_add_pd(load2(y + j), t));
    }
    for (; j < n; ++j) y[j] += a * x[j];
}

ENDS_AVX2 cplx dot_avx2(const cplx* x, const cplx* y, std::size_t n)
{
    __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        __m256d xv = load2(x + j), yv = load2(y + j);
        acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
        acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), acc_im);
    }
    alignas(32) double re[4], im[4];
    _mm256_store_pd(re, acc_re);
    _mm256_store_pd(im, acc_im);
    double sr = (re[0] + re[1]) + (re[2] + re[3]);
    double si = (im[0] - im[1]) + (im[2] - im[3]);
    for (; j < n; ++j) {
        sr += x[j].real() * y[j].real() + x[j].imag() * y[j].imag();
        si += x[j].real() * y[j].imag() - x[j].imag() * y[j].real();
    }
    return {sr, si};
}

ENDS_AVX2 double norm2_avx2(const cplx* x, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        __m256d xv = load2(x + j);
        acc = _mm256_fmadd_pd(xv, xv, acc);
    }
    alignas(32) double a[4];
    _mm256_store_pd(a, acc);
    double s = (a[0] + a[1]) + (a[2] + a[3]);
    for (; j < n; ++j) s += x[j].real() * x[j].real() + x[j].imag() * x[j].imag();
    return s;
}

}  // namespace

bool avx2_supported()
{
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Table& avx2_table()
{
    static const Table t{apply_avx2, cheb_avx2, axpy_avx2, dot_avx2, norm2_avx2, "avx2"};
    return t;
}

#else

bool avx2_supported() { return false; }
const Table& avx2_table() { return scalar_table(); }

#endif

}  // namespace ends::kernels
