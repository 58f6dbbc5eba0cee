#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ends/dynamics.hpp"
#include "ends/errors.hpp"
#include "ends/parallel.hpp"
#include "ends/quad.hpp"

namespace ends {

namespace {

// int_{r1}^r (2 (l - q1))^{p} ds with l the shifted energy
double power_integral(const ManifoldModel& model, const StationarySetup& st, double l, double r,
                      double p)
{
    if (!(r > st.r1)) return 0.0;
    const EndProfile& e = model.ends[st.end];
    if (e.q1_constant()) {
        double d = 2.0 * (l - e.q1(st.r1).v);
        if (!(d > 0.0)) fail(ErrorKind::domain, "energy below q1 beyond r1");
        return std::pow(d, p) * (r - st.r1);
    }
    auto f = [&](double s) {
        double d = 2.0 * (l - e.q1(s).v);
        if (!(d > 0.0)) fail(ErrorKind::domain, "energy below q1 beyond r1");
        return std::pow(d, p);
    };
    return quad::integrate(f, st.r1, r, 1e-14);
}

double local_b(const ManifoldModel& model, const StationarySetup& st, double l, double r)
{
    double d = 2.0 * (l - model.ends[st.end].q1(r).v);
    if (!(d > 0.0)) fail(ErrorKind::domain, "energy below q1 beyond r1");
    return std::sqrt(d);
}

}  // namespace

StationarySetup stationary_setup(const ManifoldModel& model, const RadialGrid* grid, int end, int m,
                                 double lo)
{
    StationarySetup st;
    st.end = end;
    st.m = m;
    st.shift = channel_shift(model, end, m);
    const double l0 = model.ends.at(end).lambda0_end;
    const double los = lo - st.shift;
    if (!(los > l0))
        fail(ErrorKind::precondition, "spectral support must lie above the end threshold");
    st.lambda1 = l0 + 0.9 * (los - l0);
    double rl = std::max(r_lambda(model, end, st.lambda1), model.r0);
    st.r1 = rl;
    if (grid) {
        auto nodes = grid->end_nodes(end, rl, std::numeric_limits<double>::infinity());
        if (nodes.empty()) fail(ErrorKind::validation, "grid does not reach r_lambda1");
        st.r1 = grid->r[nodes.front()];
    }
    return st;
}

double dtheta1(const ManifoldModel& model, const StationarySetup& st, double lambda, double t,
               double r)
{
    return power_integral(model, st, lambda - st.shift, r, -0.5) - t;
}

double stationary_radius(const ManifoldModel& model, const StationarySetup& st, double lambda,
                         double t)
{
    const double l = lambda - st.shift;
    if (!(l > st.lambda1)) fail(ErrorKind::domain, "stationary radius needs lambda > lambda1");
    const EndProfile& e = model.ends[st.end];
    if (e.q1_constant()) return st.r1 + t * local_b(model, st, l, st.r1);
    auto G = [&](double r) { return power_integral(model, st, l, r, -0.5) - t; };
    double a = st.r1, b = st.r1 + t * std::sqrt(2.0 * l);
    while (G(b) < 0.0) {
        a = b;
        b = st.r1 + 2.0 * (b - st.r1);
    }
    double r = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        double g = G(r);
        if (g == 0.0) break;
        if (g < 0.0)
            a = r;
        else
            b = r;
        double next = r - g * local_b(model, st, l, r);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        double step = std::abs(next - r);
        r = next;
        if (step <= 4e-16 * r) break;
    }
    return r;
}

bool in_omega_c(const ManifoldModel& model, const StationarySetup& st, double t, double r)
{
    return t > 0.0 && r > st.r1 && dtheta1(model, st, st.lambda1 + st.shift, t, r) > 0.0;
}

double stationary_point(const ManifoldModel& model, const StationarySetup& st, double t, double r)
{
    if (!in_omega_c(model, st, t, r)) {
        std::ostringstream os;
        os << "(t, r) = (" << t << ", " << r << ") outside Omega_c";
        fail(ErrorKind::domain, os.str());
    }
    // F(l) = I(l) - t is strictly decreasing in the shifted energy l
    auto F = [&](double l) { return power_integral(model, st, l, r, -0.5) - t; };
    double a = st.lambda1, fa = F(a);
    double d = 1.0;
    double b = a + d, fb = F(b);
    for (int k = 0; k < 200 && fb > 0.0; ++k) {
        a = b;
        fa = fb;
        d *= 2.0;
        b = a + d;
        fb = F(b);
    }
    if (!(fa > 0.0 && fb <= 0.0)) fail(ErrorKind::internal, "stationary point bracket failed");
    double l = a + (b - a) * fa / (fa - fb);
    for (int it = 0; it < 200; ++it) {
        double f = F(l);
        if (f == 0.0) break;
        if (f > 0.0)
            a = l;
        else
            b = l;
        double df = -power_integral(model, st, l, r, -1.5);
        double next = l - f / df;
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        double step = std::abs(next - l);
        l = next;
        if (step <= 4e-16 * std::abs(l) + 1e-300) break;
    }
    return l + st.shift;
}

EikonalPoint eikonal(const ManifoldModel& model, const StationarySetup& st, double t, double r)
{
    return eikonal_at(model, st, t, r, stationary_point(model, st, t, r));
}

EikonalPoint eikonal_at(const ManifoldModel& model, const StationarySetup& st, double t, double r,
                        double lambda_c)
{
    EikonalPoint p;
    p.lambda_c = lambda_c;
    const double l = p.lambda_c - st.shift;
    const double J = power_integral(model, st, l, r, -1.5);
    p.dr_lambda = 1.0 / (local_b(model, st, l, r) * J);
    p.dt_lambda = -1.0 / J;
    p.K1 = power_integral(model, st, l, r, 0.5) - t * p.lambda_c;
    auto bt = [&](double s) { return phase_b(model, cplx(l), s, st.end).bt; };
    double rl = r_lambda(model, st.end, l);
    double mid = std::clamp(0.5 * rl, model.r0, st.r1);
    double Phi1 = quad::integrate(bt, model.r0, mid, 1e-14) + quad::integrate(bt, mid, st.r1, 1e-14);
    p.K = p.K1 + Phi1;
    return p;
}

EikonalChecks eikonal_checks(const ManifoldModel& model, const StationarySetup& st, double t,
                             double r, double step)
{
    EikonalPoint c = eikonal(model, st, t, r);
    const double dt = step * t, dr = step * (r - st.r1);
    auto K1 = [&](double tt, double rr) { return eikonal(model, st, tt, rr).K1; };
    // fourth-order central differences
    double Kt = (-K1(t + 2 * dt, r) + 8 * K1(t + dt, r) - 8 * K1(t - dt, r) + K1(t - 2 * dt, r)) /
                (12.0 * dt);
    double Kr = (-K1(t, r + 2 * dr) + 8 * K1(t, r + dr) - 8 * K1(t, r - dr) + K1(t, r - 2 * dr)) /
                (12.0 * dr);
    const double l = c.lambda_c - st.shift;
    const double q1 = model.ends[st.end].q1(r).v;
    EikonalChecks out;
    out.dt_defect = std::abs(Kt + c.lambda_c);
    out.dr_defect = std::abs(Kr - local_b(model, st, l, r));
    // the channel shift enters as a constant energy offset
    out.hj_residual = std::abs(Kt + 0.5 * Kr * Kr + q1 + st.shift);
    return out;
}

StationaryField stationary_field(const ManifoldModel& model, const StationarySetup& st,
                                 const std::vector<double>& times, const std::vector<double>& radii)
{
    StationaryField f;
    f.setup = st;
    f.times = times;
    f.radii = radii;
    const std::size_t n = times.size() * radii.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    f.lambda_c.assign(n, nan);
    f.dr_lambda.assign(n, nan);
    f.dt_lambda.assign(n, nan);
    f.K1.assign(n, nan);
    f.K.assign(n, nan);
    f.in_omega.assign(n, 0);
    parallel_for(n, [&](std::size_t k) {
        double t = times[k / radii.size()], r = radii[k % radii.size()];
        if (!in_omega_c(model, st, t, r)) return;
        EikonalPoint p = eikonal(model, st, t, r);
        f.in_omega[k] = 1;
        f.lambda_c[k] = p.lambda_c;
        f.dr_lambda[k] = p.dr_lambda;
        f.dt_lambda[k] = p.dt_lambda;
        f.K1[k] = p.K1;
        f.K[k] = p.K;
    });
    return f;
}

}  // namespace ends
