#include "ends/quad.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

#include "ends/errors.hpp"

namespace ends::quad {

namespace bq = boost::math::quadrature;

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 double* error)
{
    if (a == b) {
        if (error) *error = 0.0;
        return 0.0;
    }
    double err = 0.0;
    double v = bq::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &err);
    if (error) *error = err;
    return v;
}

cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b, double tol,
                     double* error)
{
    double er = 0.0, ei = 0.0;
    std::function<double(double)> fr = [&](double x) { return f(x).real(); };
    std::function<double(double)> fi = [&](double x) { return f(x).imag(); };
    double re = integrate(fr, a, b, tol, &er);
    double im = integrate(fi, a, b, tol, &ei);
    if (error) *error = std::hypot(er, ei);
    return {re, im};
}

double integrate_tail(const std::function<double(double)>& f, double a, double length,
                      double abs_tol, int max_segments)
{
    double sum = 0.0;
    double lo = a;
    double width = length;
    double prev = 0.0;
    double prev_ratio = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k < max_segments; ++k) {
        double seg = integrate(f, lo, lo + width, 1e-11);
        sum += seg;
        lo += width;
        width *= 2.0;
        if (k >= 2 && std::abs(seg) < 1e-3 * abs_tol && std::abs(prev) < 1e-2 * abs_tol)
            return sum;
        if (k >= 1 && prev != 0.0) {
            double ratio = seg / prev;
            if (ratio > 0.0 && ratio < 0.95 && std::isfinite(prev_ratio)) {
                double rest = seg * ratio / (1.0 - ratio);
                double unsure = std::abs(rest) * std::abs(ratio - prev_ratio) / (1.0 - ratio) +
                                std::abs(seg) * 1e-12;
                if (unsure <= abs_tol) return sum + rest;
            }
            prev_ratio = ratio;
        }
        prev = seg;
    }
    fail(ErrorKind::convergence, "tail integral does not decay geometrically");
}

std::vector<Node> gauss_legendre_panels(const std::vector<double>& breaks,
                                        const std::vector<int>& panels)
{
    using G = bq::gauss<double, 8>;
    const auto& xs = G::abscissa();
    const auto& ws = G::weights();
    std::vector<Node> out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        int np = panels[i] < 1 ? 1 : panels[i];
        double a = breaks[i];
        double step = (breaks[i + 1] - a) / np;
        for (int p = 0; p < np; ++p) {
            double c = a + (p + 0.5) * step;
            double half = 0.5 * step;
            // abscissa() holds the non-negative half of the symmetric rule
            for (std::size_t k = xs.size(); k-- > 0;) {
                if (xs[k] == 0.0) continue;
                out.push_back({c - half * xs[k], half * ws[k]});
            }
            if (xs[0] == 0.0) out.push_back({c, half * ws[0]});
            for (std::size_t k = 0; k < xs.size(); ++k) {
                if (xs[k] == 0.0) continue;
                out.push_back({c + half * xs[k], half * ws[k]});
            }
        }
    }
    return out;
}

std::vector<Node> gauss_legendre_panels(double a, double b, int panels)
{
    return gauss_legendre_panels(std::vector<double>{a, b}, std::vector<int>{panels});
}

namespace {

template <class T>
void cumulative_impl(const T* f, std::size_t n, double h, T* out)
{
    if (n == 0) return;
    out[0] = T(0);
    if (n < 4) {
        for (std::size_t j = 1; j < n; ++j) out[j] = out[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
        return;
    }
    const double c = h / 24.0;
    out[1] = c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    for (std::size_t j = 1; j + 2 < n; ++j)
        out[j + 1] = out[j] + c * (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2]);
    out[n - 1] = out[n - 2] + c * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
}

}  // namespace

void cumulative(const double* f, std::size_t n, double h, double* out)
{
    cumulative_impl(f, n, h, out);
}

void cumulative(const cplx* f, std::size_t n, double h, cplx* out)
{
    cumulative_impl(f, n, h, out);
}

}  // namespace ends::quad
