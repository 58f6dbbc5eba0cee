#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>

#include "ends/dynamics.hpp"
#include "ends/errors.hpp"
#include "ends/quad.hpp"

namespace ends {

cplx SpectralChannel::operator()(double lambda) const
{
    if (!(lambda > lo && lambda < hi)) return 0.0;
    return h(lambda);
}

cplx SpectralProfile::value(int end, int m, double lambda) const
{
    cplx v = 0.0;
    for (const auto& c : channels)
        if (c.end == end && c.m == m) v += c(lambda);
    return v;
}

std::vector<int> SpectralProfile::modes() const
{
    std::set<int> s;
    for (const auto& c : channels) s.insert(c.m);
    return {s.begin(), s.end()};
}

double SpectralProfile::lo() const
{
    double v = std::numeric_limits<double>::infinity();
    for (const auto& c : channels) v = std::min(v, c.lo);
    return v;
}

double SpectralProfile::hi() const
{
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& c : channels) v = std::max(v, c.hi);
    return v;
}

double SpectralProfile::norm() const
{
    return std::sqrt(std::max(0.0, profile_inner(*this, *this).real()));
}

SpectralProfile SpectralProfile::conj() const
{
    return multiplied(nullptr);
}

SpectralProfile SpectralProfile::multiplied(
    const std::function<cplx(const SpectralChannel&, double)>& mult) const
{
    SpectralProfile out;
    out.smoothness = smoothness;
    for (const auto& c : channels) {
        SpectralChannel n = c;
        auto base = c.h;
        if (mult) {
            SpectralChannel key = c;
            key.h = nullptr;
            n.h = [base, mult, key](double l) { return mult(key, l) * base(l); };
        } else {
            n.h = [base](double l) { return std::conj(base(l)); };
        }
        out.channels.push_back(std::move(n));
    }
    return out;
}

SpectralProfile SpectralProfile::bump(int end, int m, double lo, double hi, cplx amp)
{
    if (!(hi > lo)) fail(ErrorKind::validation, "bump profile needs lo < hi");
    SpectralProfile p;
    p.smoothness = 2;
    SpectralChannel c;
    c.end = end;
    c.m = m;
    c.lo = lo;
    c.hi = hi;
    c.h = [lo, hi, amp](double l) {
        double x = (2.0 * l - lo - hi) / (hi - lo);
        if (std::abs(x) >= 1.0) return cplx(0.0);
        return amp * std::exp(-1.0 / (1.0 - x * x));
    };
    p.channels.push_back(std::move(c));
    return p;
}

SpectralProfile SpectralProfile::samples(int end, int m, const std::vector<double>& lambda,
                                         const std::vector<cplx>& values)
{
    if (lambda.size() != values.size() || lambda.size() < 4)
        fail(ErrorKind::validation, "spectral samples need >= 4 matching points");
    for (std::size_t i = 1; i < lambda.size(); ++i)
        if (!(lambda[i] > lambda[i - 1]))
            fail(ErrorKind::validation, "spectral sample grid must increase strictly");
    if (std::abs(values.front()) > 0.0 || std::abs(values.back()) > 0.0)
        fail(ErrorKind::validation, "spectral samples must vanish at both ends of the grid");
    std::vector<double> re(values.size()), im(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        re[i] = values[i].real();
        im[i] = values[i].imag();
    }
    auto sr = std::make_shared<CubicSpline>(lambda, re);
    auto si = std::make_shared<CubicSpline>(lambda, im);
    SpectralProfile p;
    p.smoothness = 2;
    SpectralChannel c;
    c.end = end;
    c.m = m;
    c.lo = lambda.front();
    c.hi = lambda.back();
    c.h = [sr, si](double l) { return cplx((*sr)(l), (*si)(l)); };
    p.channels.push_back(std::move(c));
    return p;
}

cplx profile_inner(const SpectralProfile& a, const SpectralProfile& b)
{
    cplx acc = 0.0;
    // (end, m) keys present in both
    std::set<std::pair<int, int>> keys;
    for (const auto& c : a.channels) keys.insert({c.end, c.m});
    for (const auto& [end, m] : keys) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        bool in_b = false;
        for (const auto& c : a.channels)
            if (c.end == end && c.m == m) lo = std::min(lo, c.lo), hi = std::max(hi, c.hi);
        for (const auto& c : b.channels)
            if (c.end == end && c.m == m) in_b = true;
        if (!in_b) continue;
        acc += quad::integrate_complex(
            [&](double l) { return std::conj(a.value(end, m, l)) * b.value(end, m, l); }, lo, hi,
            1e-13);
    }
    return acc / (2.0 * M_PI);
}

}  // namespace ends
