#include <algorithm>
#include <cmath>
#include <limits>

#include "ends/errors.hpp"
#include "ends/geometry.hpp"

namespace ends {

double chi(double t)
{
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    auto psi = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    double a = psi(2.0 - t), b = psi(t - 1.0);
    return a / (a + b);
}

double r_lambda(const ManifoldModel& model, int end, double lambda)
{
    const EndProfile& e = model.ends.at(end);
    if (!(lambda > e.lambda0_end)) return std::numeric_limits<double>::infinity();
    const double level = lambda - 0.25 * (lambda - e.lambda0_end);
    // first envelope node at which sup of q1 beyond it stays below level
    auto it = std::find_if(e.env_sup.begin(), e.env_sup.end(),
                           [level](double v) { return v <= level; });
    double rho = model.horizon;
    if (it != e.env_sup.end()) {
        std::size_t i = it - e.env_sup.begin();
        rho = e.env_r[i];
        // linear in the envelope between nodes, so r_lambda is continuous in lambda
        if (i > 0 && e.env_sup[i - 1] > e.env_sup[i]) {
            double w = (e.env_sup[i - 1] - level) / (e.env_sup[i - 1] - e.env_sup[i]);
            rho = e.env_r[i - 1] + w * (e.env_r[i] - e.env_r[i - 1]);
        }
    }
    return std::max(2.0 * model.r0, 2.0 * rho);
}

double eta_lambda(const ManifoldModel& model, int end, double r, double lambda)
{
    double rl = r_lambda(model, end, lambda);
    if (!std::isfinite(rl)) return 0.0;
    return 1.0 - chi(2.0 * r / rl);
}

double effective_potential(const ManifoldModel& model, double r, int end)
{
    if (!(r > 0.5 * model.r0)) fail(ErrorKind::domain, "effective_potential needs r > r0/2");
    const EndProfile& e = model.ends.at(end);
    double f = e.f(r);
    if (!(f > 0.0) || !std::isfinite(f)) fail(ErrorKind::domain, "warp profile not positive");
    double q = e.q(r);
    if (model.well.enabled && std::abs(model.s_of(end, r)) < model.well.a) q += model.well.V0;
    return q;
}

double effective_potential_line(const ManifoldModel& model, double s)
{
    LineJet j = model.line(s);
    return j.V + (j.g * j.g + 2.0 * j.dg) / 8.0;
}

CriticalEnergy critical_energy(const ManifoldModel& model, double tol)
{
    CriticalEnergy out;
    const int segments = 7;
    for (const EndProfile& e : model.ends) {
        std::vector<double> sup(segments), ext;
        for (int k = 0; k < segments; ++k) {
            double R = model.horizon * std::ldexp(1.0, k - segments);
            double best = -std::numeric_limits<double>::infinity();
            for (int i = 0; i <= 128; ++i) best = std::max(best, e.q1(R * (1.0 + i / 128.0)).v);
            sup[k] = best;
        }
        for (int k = 2; k < segments; ++k) {
            double d1 = sup[k - 1] - sup[k - 2], d2 = sup[k] - sup[k - 1];
            double L = sup[k];
            if (std::abs(d2) > 1e-15 * (1.0 + std::abs(sup[k])) && d1 != 0.0) {
                double ratio = d2 / d1;
                if (ratio > 0.0 && ratio < 1.0) L = sup[k] + d2 * ratio / (1.0 - ratio);
            }
            ext.push_back(L);
        }
        auto tail = ext.end() - 3;
        double lo = *std::min_element(tail, ext.end()), hi = *std::max_element(tail, ext.end());
        if (hi - lo > tol)
            fail(ErrorKind::convergence,
                 "critical energy: tail sup of q1 on end " + std::to_string(e.id) +
                     " does not stabilize over three horizon doublings");
        out.per_end.push_back(ext.back());
    }
    out.lambda0 = *std::max_element(out.per_end.begin(), out.per_end.end());
    return out;
}

PhaseB phase_b(const ManifoldModel& model, cplx z, double r, int end)
{
    double eta = eta_lambda(model, end, r, z.real());
    if (eta == 0.0) return {cplx(0.0), 0.0};
    double q1 = model.ends.at(end).q1(r).v;
    cplx w = 2.0 * (z - q1);
    if (z.imag() == 0.0 && w.real() < 0.0)
        fail(ErrorKind::domain, "phase_b: energy below q1 inside the cutoff support");
    cplx b = eta * std::sqrt(w);
    return {b, b.real()};
}

double channel_shift(const ManifoldModel& model, int end, int m)
{
    const EndProfile& e = model.ends.at(end);
    Jet L = e.log_f(model.horizon);
    if (!(e.warp.constant_curvature && L.d1 == 0.0)) return 0.0;
    return 0.5 * double(m) * double(m) * std::exp(-2.0 * L.v);
}

PhaseA phase_a(const ManifoldModel& model, cplx z, double r, int end)
{
    PhaseB pb = phase_b(model, z, r, end);
    if (pb.b == 0.0) return {cplx(0.0), cplx(0.0)};
    const EndProfile& e = model.ends.at(end);
    double eta = eta_lambda(model, end, r, z.real());
    Jet q1 = e.q1(r);
    cplx corr = cplx(0.0, 0.25) * eta * q1.d1 / (z - q1.v);
    return {pb.b - corr, pb.b + corr};
}

double riccati_residual(const ManifoldModel& model, cplx z, double r, int end, Branch which,
                        bool use_b)
{
    const double h = std::max(1e-5, 1e-5 * r);
    auto phase = [&](double x) -> cplx {
        if (use_b) return phase_b(model, z, x, end).b;
        PhaseA a = phase_a(model, z, x, end);
        return which == Branch::plus ? a.plus : a.minus;
    };
    cplx a = phase(r);
    cplx da = (phase(r + h) - phase(r - h)) / (2.0 * h);
    cplx pa = cplx(0.0, -1.0) * da;
    double q1 = model.ends.at(end).q1(r).v;
    cplx res = (which == Branch::plus ? pa : -pa) + a * a - 2.0 * (z - q1);
    return std::abs(res);
}

std::vector<ClassFit> classify_fit(const ManifoldModel& model)
{
    std::vector<ClassFit> out;
    for (const EndProfile& e : model.ends) {
        ClassFit fit;
        std::vector<double> lx, ly;
        int samples = 0;
        for (double r = model.r0; r <= model.horizon * (1.0 + 1e-12); r *= 2.0) {
            ++samples;
            double d = std::abs(e.q1(r).v - e.lambda0_end);
            if (d > 1e-300) {
                lx.push_back(std::log(r));
                ly.push_back(std::log(d));
            }
        }
        fit.samples = samples;
        if (samples < 8)
            fail(ErrorKind::validation, "classification needs >= 8 dyadic samples below horizon");
        if (lx.size() < 2) {
            fit.exponent = std::numeric_limits<double>::infinity();
            fit.tag = PotentialClass::short_range;
            out.push_back(fit);
            continue;
        }
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= lx.size();
        my /= ly.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        double slope = sxy / sxx;
        fit.exponent = -slope;
        fit.constant = std::exp(my - slope * mx);
        const double eps = model.class_eps;
        if (fit.exponent >= 1.0 + eps)
            fit.tag = PotentialClass::short_range;
        else if (fit.exponent >= 0.5 * (1.0 + eps))
            fit.tag = PotentialClass::dollard;
        else
            fit.tag = PotentialClass::long_range;
        out.push_back(fit);
    }
    return out;
}

std::vector<PotentialClass> classify_potential(const ManifoldModel& model)
{
    std::vector<PotentialClass> out;
    for (const ClassFit& f : classify_fit(model)) out.push_back(f.tag);
    return out;
}

}  // namespace ends
