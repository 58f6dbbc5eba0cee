#include <algorithm>
#include <cmath>
#include <limits>

#include "ends/errors.hpp"
#include "ends/fourier.hpp"
#include "ends/quad.hpp"

namespace ends {

EndPhase end_phase(const ManifoldModel& model, const RadialGrid& grid, int end, int m,
                   double lambda)
{
    EndPhase ph;
    ph.end = end;
    ph.m = m;
    ph.lambda = lambda;
    ph.shift = channel_shift(model, end, m);
    const double le = lambda - ph.shift;
    ph.nodes = grid.end_nodes(end, 0.0, std::numeric_limits<double>::infinity());
    const std::size_t n = ph.nodes.size();
    ph.r.resize(n);
    ph.b.resize(n);
    ph.eta.resize(n);
    ph.q1.resize(n);
    ph.Phi.assign(n, 0.0);
    const EndProfile& e = model.ends.at(end);
    for (std::size_t k = 0; k < n; ++k) {
        double r = grid.r[ph.nodes[k]];
        ph.r[k] = r;
        ph.eta[k] = eta_lambda(model, end, r, le);
        ph.q1[k] = e.q1(r).v;
        ph.b[k] = phase_b(model, cplx(le), r, end).bt;
    }
    if (n > 0) quad::cumulative(ph.b.data(), n, grid.h, ph.Phi.data());
    return ph;
}

std::vector<double> wkb_tail(const ManifoldModel& model, int end, int m, double lambda,
                             const std::vector<double>& r, double r_from, double h)
{
    std::vector<double> out(r.size(), 0.0);
    const EndProfile& e = model.ends.at(end);
    const double shift = channel_shift(model, end, m);
    const double le = lambda - shift;
    auto integrand = [&](double x) {
        double d = lambda - model.W_end(m, end, x);
        if (!(d > 0.0)) fail(ErrorKind::domain, "wkb tail: closed channel");
        double k = std::sqrt(2.0 * d);
        double b = phase_b(model, cplx(le), x, end).bt;
        if (eta_lambda(model, end, x, le) < 1.0) return k - b;
        // k - b = 2 (q1 + shift - W) / (k + b) without cancellation
        double excess = e.q2(x).v +
                        0.5 * double(m) * double(m) * std::exp(-2.0 * e.log_f(x).v) - shift;
        return -2.0 * excess / (k + b);
    };
    auto first = std::lower_bound(r.begin(), r.end(), r_from);
    const std::size_t k0 = first - r.begin();
    const std::size_t n = r.size() - k0;
    if (n == 0) return out;
    std::vector<double> f(n), cum(n);
    // reversed so that the cumulative runs inward from the outermost node
    for (std::size_t k = 0; k < n; ++k) f[k] = integrand(r[r.size() - 1 - k]);
    quad::cumulative(f.data(), n, h, cum.data());
    double rl = r.back();
    double tail = quad::integrate_tail(integrand, rl, rl, 1e-12);
    for (std::size_t k = 0; k < n; ++k) out[r.size() - 1 - k] = tail + cum[k];
    return out;
}

std::vector<cplx> boundary_limit(const ManifoldModel& model, const RadialGrid& grid,
                                 const EndPhase& ph, int m, int sign, const std::vector<cplx>& u,
                                 const FtOptions& opt, std::vector<double>* windows)
{
    const double rmax = grid.rmax;
    const double r_from = rmax / 8.0;
    std::vector<double> tail;
    if (opt.tail_correction) tail = wkb_tail(model, ph.end, m, ph.lambda, ph.r, r_from, grid.h);
    if (ph.m != m) fail(ErrorKind::internal, "end phase built for another mode");
    auto xi = [&](std::size_t k) {
        cplx v = std::sqrt(ph.b[k]) * std::polar(1.0, -sign * ph.Phi[k]) * u[k];
        if (opt.tail_correction) {
            double kw = std::sqrt(2.0 * (ph.lambda - model.W_end(m, ph.end, ph.r[k])));
            v *= std::sqrt(kw / ph.b[k]) * std::polar(1.0, sign * tail[k]);
        }
        return v;
    };
    std::vector<cplx> est;
    if (windows) windows->clear();
    for (int w = 0; w < 3; ++w) {
        double R = rmax / 8.0 * std::ldexp(1.0, w);
        if (windows) windows->push_back(R);
        auto lo = std::lower_bound(ph.r.begin(), ph.r.end(), R) - ph.r.begin();
        auto hi = std::upper_bound(ph.r.begin(), ph.r.end(), 2.0 * R) - ph.r.begin();
        if (hi - lo < 2) fail(ErrorKind::validation, "averaging window holds fewer than two nodes");
        if (!opt.averaged) {
            est.push_back(xi(hi - 1));
            continue;
        }
        cplx acc = 0.0;
        for (auto k = lo; k + 1 < hi; ++k) acc += 0.5 * (xi(k) + xi(k + 1)) * (ph.r[k + 1] - ph.r[k]);
        est.push_back(acc / (ph.r[hi - 1] - ph.r[lo]));
    }
    return est;
}

}  // namespace ends
