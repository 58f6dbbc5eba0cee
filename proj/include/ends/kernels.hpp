#pragma once

#include <complex>
#include <cstddef>

namespace ends::kernels {

using cplx = std::complex<double>;

// Symmetric banded operator with a variable real diagonal and constant
// off-diagonals: (S x)_j = d_j x_j + c1 (x_{j-1} + x_{j+1}) + c2 (x_{j-2} + x_{j+2}),
// with x = 0 outside [0, n).
struct Stencil {
    const double* diag = nullptr;
    double c1 = 0.0;
    double c2 = 0.0;
    std::size_t n = 0;
};

struct Table {
    void (*apply)(const Stencil&, const cplx*, cplx*);
    // out = 2 (alpha S x + beta x) - xm1
    void (*cheb_step)(const Stencil&, double, double, const cplx*, const cplx*, cplx*);
    void (*axpy)(cplx, const cplx*, cplx*, std::size_t);
    cplx (*dot)(const cplx*, const cplx*, std::size_t);  // sum conj(x_j) y_j
    double (*norm2)(const cplx*, std::size_t);           // sum |x_j|^2
    const char* name;
};

const Table& scalar_table();
const Table& avx2_table();
bool avx2_supported();

// Selected once: AVX2+FMA when the CPU has it, unless ENDS_SCATTER_SIMD=scalar.
const Table& active();

inline void apply(const Stencil& s, const cplx* x, cplx* y) { active().apply(s, x, y); }
inline void cheb_step(const Stencil& s, double alpha, double beta, const cplx* x, const cplx* xm1,
                      cplx* out)
{
    active().cheb_step(s, alpha, beta, x, xm1, out);
}
inline void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) { active().axpy(a, x, y, n); }
inline cplx dot(const cplx* x, const cplx* y, std::size_t n) { return active().dot(x, y, n); }
inline double norm2(const cplx* x, std::size_t n) { return active().norm2(x, n); }

}  // namespace ends::kernels
