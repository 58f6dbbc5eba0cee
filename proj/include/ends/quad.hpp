#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace ends::quad {

using cplx = std::complex<double>;

// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12, double* error = nullptr);
cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b,
                       double tol = 1e-12, double* error = nullptr);

// Integral over [a, inf) summed over dyadic segments [a + L(2^k - 1), a + L(2^(k+1) - 1)],
// the remainder closed by geometric extrapolation of the segment contributions.
// Throws a convergence error when the segment sequence does not decay.
double integrate_tail(const std::function<double(double)>& f, double a, double length,
                      double abs_tol, int max_segments = 60);

struct Node {
    double x;
    double w;
};

// Composite 8-point Gauss-Legendre: each [breaks[i], breaks[i+1]] split into
// panels[i] equal panels (panels.size() == breaks.size() - 1).
std::vector<Node> gauss_legendre_panels(const std::vector<double>& breaks,
                                        const std::vector<int>& panels);
std::vector<Node> gauss_legendre_panels(double a, double b, int panels);

// Fourth-order cumulative integral on a uniform grid: out[0] = 0,
// out[j] ~ integral from x_0 to x_j. Requires n >= 4 (falls back to trapezoid below).
void cumulative(const double* f, std::size_t n, double h, double* out);
void cumulative(const cplx* f, std::size_t n, double h, cplx* out);

}  // namespace ends::quad
