#include "ends/kernels.hpp"

namespace ends::kernels {

namespace {

inline cplx at(const cplx* x, std::ptrdiff_t j, std::size_t n)
{
    return (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) ? cplx(0.0) : x[j];
}

void apply_scalar(const Stencil& s, const cplx* x, cplx* y)
{
    const auto n = static_cast<std::ptrdiff_t>(s.n);
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        cplx v = s.diag[j] * x[j] + s.c1 * (at(x, j - 1, s.n) + at(x, j + 1, s.n));
        if (s.c2 != 0.0) v += s.c2 * (at(x, j - 2, s.n) + at(x, j + 2, s.n));
        y[j] = v;
    }
}

void cheb_scalar(const Stencil& s, double alpha, double beta, const cplx* x, const cplx* xm1,
                 cplx* out)
{
    const auto n = static_cast<std::ptrdiff_t>(s.n);
    const double a1 = 2.0 * alpha * s.c1, a2 = 2.0 * alpha * s.c2;
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        double dj = 2.0 * (alpha * s.diag[j] + beta);
        cplx v = dj * x[j] + a1 * (at(x, j - 1, s.n) + at(x, j + 1, s.n));
        if (s.c2 != 0.0) v += a2 * (at(x, j - 2, s.n) + at(x, j + 2, s.n));
        out[j] = v - xm1[j];
    }
}

void axpy_scalar(cplx a, const cplx* x, cplx* y, std::size_t n)
{
    for (std::size_t j = 0; j < n; ++j) y[j] += a * x[j];
}

cplx dot_scalar(const cplx* x, const cplx* y, std::size_t n)
{
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        re += x[j].real() * y[j].real() + x[j].imag() * y[j].imag();
        im += x[j].real() * y[j].imag() - x[j].imag() * y[j].real();
    }
    return {re, im};
}

double norm2_scalar(const cplx* x, std::size_t n)
{
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += x[j].real() * x[j].real() + x[j].imag() * x[j].imag();
    return s;
}

}  // namespace

const Table& scalar_table()
{
    static const Table t{apply_scalar, cheb_scalar, axpy_scalar, dot_scalar, norm2_scalar,
                         "scalar"};
    return t;
}

}  // namespace ends::kernels
