#include "ends/spline.hpp"

#include <algorithm>

#include "ends/errors.hpp"

namespace ends {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y))
{
    const std::size_t n = x_.size();
    require(n >= 2 && y_.size() == n, ErrorKind::validation, "spline needs >= 2 matching samples");
    for (std::size_t i = 1; i < n; ++i)
        require(x_[i] > x_[i - 1], ErrorKind::validation, "spline abscissae must increase");
    m_.assign(n, 0.0);
    if (n == 2) return;
    // tridiagonal system for interior second derivatives
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        diag[i] = (h0 + h1) / 3.0;
        upper[i] = h1 / 6.0;
        rhs[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
        double h0 = x_[i] - x_[i - 1];
        double lower = h0 / 6.0;
        double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
        if (i == 1) break;
    }
}

std::size_t CubicSpline::segment(double x) const
{
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(k, x_.size() - 2);
}

double CubicSpline::operator()(double x) const
{
    std::size_t k = segment(x);
    double h = x_[k + 1] - x_[k];
    double a = (x_[k + 1] - x) / h, b = (x - x_[k]) / h;
    return a * y_[k] + b * y_[k + 1] +
           ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double x) const
{
    std::size_t k = segment(x);
    double h = x_[k + 1] - x_[k];
    double a = (x_[k + 1] - x) / h, b = (x - x_[k]) / h;
    return (y_[k + 1] - y_[k]) / h +
           (-(3.0 * a * a - 1.0) * m_[k] + (3.0 * b * b - 1.0) * m_[k + 1]) * h / 6.0;
}

double CubicSpline::deriv2(double x) const
{
    std::size_t k = segment(x);
    double h = x_[k + 1] - x_[k];
    double a = (x_[k + 1] - x) / h, b = (x - x_[k]) / h;
    return a * m_[k] + b * m_[k + 1];
}

double CubicSpline::deriv3(double x) const
{
    std::size_t k = segment(x);
    return (m_[k + 1] - m_[k]) / (x_[k + 1] - x_[k]);
}

}  // namespace ends
