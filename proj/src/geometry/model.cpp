#include <algorithm>
#include <cmath>

#include "ends/errors.hpp"
#include "ends/geometry.hpp"

namespace ends {

namespace {

// Degree-9 p(t) on [0, 1] with derivatives 0..4 prescribed at both ends.
std::array<double, 10> hermite9(const std::array<double, 5>& y0, const std::array<double, 5>& y1)
{
    std::array<double, 10> c{};
    double fact = 1.0;
    for (int i = 0; i < 5; ++i) {
        if (i > 0) fact *= i;
        c[i] = y0[i] / fact;
    }
    // p^(i)(1) = sum_k c_k k!/(k-i)!, unknowns c_5..c_9
    double A[5][6];
    for (int i = 0; i < 5; ++i) {
        auto falling = [](int k, int i) {
            double v = 1.0;
            for (int q = 0; q < i; ++q) v *= double(k - q);
            return v;
        };
        double known = 0.0;
        for (int k = i; k < 5; ++k) known += c[k] * falling(k, i);
        for (int k = 5; k < 10; ++k) A[i][k - 5] = falling(k, i);
        A[i][5] = y1[i] - known;
    }
    for (int col = 0; col < 5; ++col) {
        int piv = col;
        for (int r = col + 1; r < 5; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        for (int q = 0; q < 6; ++q) std::swap(A[col][q], A[piv][q]);
        for (int r = 0; r < 5; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            for (int q = col; q < 6; ++q) A[r][q] -= f * A[col][q];
        }
    }
    for (int k = 0; k < 5; ++k) c[5 + k] = A[k][5] / A[k][k];
    return c;
}

// value, first and second t-derivative
void poly_eval(const std::array<double, 10>& c, double t, double& v, double& d1, double& d2)
{
    v = d1 = d2 = 0.0;
    for (int k = 9; k >= 0; --k) {
        d2 = d2 * t + 2.0 * d1;
        d1 = d1 * t + v;
        v = v * t + c[k];
    }
}

// t-derivatives 0..4 of a radial jet at the junction of end `end` (t = 0 for end 0).
std::array<double, 5> t_jet(const Jet& j, double L, int end)
{
    double sgn = end == 0 ? -L : L;
    return {j.v, j.d1 * sgn, j.d2 * sgn * sgn, j.d3 * sgn * sgn * sgn,
            j.d4 * sgn * sgn * sgn * sgn};
}

}  // namespace

double EndProfile::f(double r) const { return std::exp(warp.log_f(r).v); }

Jet EndProfile::curvature(double r) const
{
    Jet L = warp.log_f(r);
    double g = L.d1, gp = L.d2, gpp = L.d3, gppp = L.d4;
    return Jet{(g * g + 2.0 * gp) / 8.0, (2.0 * g * gp + 2.0 * gpp) / 8.0,
               (2.0 * gp * gp + 2.0 * g * gpp + 2.0 * gppp) / 8.0, 0.0, 0.0};
}

Jet EndProfile::V(double r) const
{
    Jet a = v_long(r), b = v_short(r);
    return Jet{a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3, a.d4 + b.d4};
}

Jet EndProfile::q1(double r) const
{
    Jet out = v_long(r);
    if (curvature_in_q1) {
        Jet c = curvature(r);
        out.v += c.v;
        out.d1 += c.d1;
        out.d2 += c.d2;
    }
    return out;
}

Jet EndProfile::q2(double r) const
{
    Jet out = v_short(r);
    if (!curvature_in_q1) {
        Jet c = curvature(r);
        out.v += c.v;
        out.d1 += c.d1;
        out.d2 += c.d2;
    }
    return out;
}

double EndProfile::q(double r) const { return V(r).v + curvature(r).v; }

bool EndProfile::q1_constant() const
{
    return v_long.constant && (!curvature_in_q1 || warp.constant_curvature);
}

ManifoldModel::Location ManifoldModel::locate(double s) const
{
    const double w = core_half_width;
    if (s >= w) return {1, 0.5 * r0 + s - w};
    if (s <= -w) return {0, 0.5 * r0 - s - w};
    return {-1, 0.0};
}

double ManifoldModel::s_of(int end, double r) const
{
    double d = r - 0.5 * r0 + core_half_width;
    return end == 1 ? d : -d;
}

double ManifoldModel::s_extent(double rmax) const { return rmax - 0.5 * r0 + core_half_width; }

LineJet ManifoldModel::line(double s) const
{
    LineJet out;
    Location loc = locate(s);
    if (loc.end >= 0) {
        const EndProfile& e = ends[loc.end];
        const double sgn = loc.end == 1 ? 1.0 : -1.0;
        Jet L = e.log_f(loc.r);
        Jet v = e.V(loc.r);
        out.log_f = L.v;
        out.g = sgn * L.d1;
        out.dg = L.d2;
        out.V = v.v;
        out.dV = sgn * v.d1;
    } else {
        const double L = 2.0 * core_half_width;
        const double t = (s + core_half_width) / L;
        double v, d1, d2;
        poly_eval(core_logf, t, v, d1, d2);
        out.log_f = v;
        out.g = d1 / L;
        out.dg = d2 / (L * L);
        poly_eval(core_v, t, v, d1, d2);
        out.V = v;
        out.dV = d1 / L;
    }
    if (well.enabled && std::abs(s) < well.a) out.V += well.V0;
    return out;
}

double ManifoldModel::W(int m, double s) const
{
    LineJet j = line(s);
    return j.V + (j.g * j.g + 2.0 * j.dg) / 8.0 + 0.5 * double(m) * double(m) * std::exp(-2.0 * j.log_f);
}

double ManifoldModel::W_end(int m, int end, double r) const { return W(m, s_of(end, r)); }

double ManifoldModel::dW_end_dr(int m, int end, double r) const
{
    const EndProfile& e = ends[end];
    Jet L = e.log_f(r);
    double dv = e.V(r).d1 + e.curvature(r).d1;
    return dv - double(m) * double(m) * L.d1 * std::exp(-2.0 * L.v);
}

std::vector<double> ManifoldModel::breakpoints() const
{
    if (!well.enabled || well.a <= 0.0) return {};
    return {-well.a, well.a};
}

void ManifoldModel::finalize()
{
    if (ends.size() != 2)
        fail(ErrorKind::validation, "the surface model needs exactly two ends");
    if (!(r0 >= 2.0)) fail(ErrorKind::validation, "r0 must be >= 2");
    if (!(core_half_width > 0.0)) fail(ErrorKind::validation, "core_half_width must be > 0");
    if (!(horizon >= 64.0 * r0)) fail(ErrorKind::validation, "horizon must be >= 64 r0");
    if (well.enabled && !(well.a > 0.0)) fail(ErrorKind::validation, "square well needs a > 0");

    const double L = 2.0 * core_half_width;
    const double rj = 0.5 * r0;
    {
        core_logf = hermite9(t_jet(ends[0].log_f(rj), L, 0), t_jet(ends[1].log_f(rj), L, 1));
        core_v = hermite9(t_jet(ends[0].V(rj), L, 0), t_jet(ends[1].V(rj), L, 1));
    }

    CriticalEnergy ce = critical_energy(*this);
    lambda0 = ce.lambda0;
    for (std::size_t i = 0; i < ends.size(); ++i) ends[i].lambda0_end = ce.per_end[i];

    const int n = 4000;
    for (auto& e : ends) {
        e.env_r.resize(n);
        e.env_sup.resize(n);
        const double lo = std::log(rj), hi = std::log(horizon);
        for (int i = 0; i < n; ++i) {
            e.env_r[i] = std::exp(lo + (hi - lo) * i / (n - 1));
            e.env_sup[i] = e.q1(e.env_r[i]).v;
        }
        for (int i = n - 2; i >= 0; --i) e.env_sup[i] = std::max(e.env_sup[i], e.env_sup[i + 1]);
    }

    std::vector<ClassFit> fits = classify_fit(*this);
    for (std::size_t i = 0; i < ends.size(); ++i) {
        ends[i].class_tag = fits[i].tag;
        ends[i].class_exponent = fits[i].exponent;
    }
}

}  // namespace ends
