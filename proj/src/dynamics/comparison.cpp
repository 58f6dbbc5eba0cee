#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "ends/dynamics.hpp"
#include "ends/errors.hpp"
#include "ends/parallel.hpp"
#include "ends/quad.hpp"

namespace ends {

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);

cplx eph(double x)
{
    return {std::cos(x), std::sin(x)};
}

// e^{-+ 3 pi i / 4}
cplx corner(int sign)
{
    return eph(-sign * 0.75 * M_PI);
}

const SpectralChannel* find_channel(const SpectralProfile& h, int end, int m)
{
    const SpectralChannel* out = nullptr;
    for (const auto& c : h.channels)
        if (c.end == end && c.m == m) {
            if (out) fail(ErrorKind::validation, "profile repeats an (end, mode) channel");
            out = &c;
        }
    return out;
}

double dollard_integral(const ManifoldModel& model, int end, double r)
{
    const EndProfile& e = model.ends[end];
    if (!(r > model.r0)) return 0.0;
    if (e.q1_constant()) return (e.q1(model.r0).v - e.lambda0_end) * (r - model.r0);
    return quad::integrate([&](double s) { return e.q1(s).v - e.lambda0_end; }, model.r0, r, 1e-13);
}

// shared body of U_sr and U_do; extra = t / (r - r0) int_{r0}^r (q1 - lambda0)
PointValue free_point(const ManifoldModel& model, const SpectralChannel& ch, double t, double r,
                      int sign, double extra)
{
    PointValue pv;
    if (!(t > 0.0) || !(r > model.r0)) return pv;
    const double c = channel_shift(model, ch.end, ch.m);
    const double l0 = model.ends[ch.end].lambda0_end + c;
    const double x = r - model.r0;
    cplx hv = ch(0.5 * x * x / (t * t) + l0);
    if (hv == 0.0) return pv;
    pv.amp = inv_sqrt_2pi * corner(sign) * std::sqrt(x / (t * t)) * hv;
    pv.phase = sign * (0.5 * x * x / t - t * l0 - extra);
    return pv;
}

// r range of one channel for an explicit variant
std::pair<double, double> channel_range(const ManifoldModel& model, const StationarySetup& st,
                                        const SpectralChannel& ch, double t, Variant v)
{
    if (v == Variant::leading)
        return {stationary_radius(model, st, ch.lo, t), stationary_radius(model, st, ch.hi, t)};
    const double l0 = model.ends[ch.end].lambda0_end + channel_shift(model, ch.end, ch.m);
    auto rad = [&](double l) { return model.r0 + t * std::sqrt(2.0 * std::max(0.0, l - l0)); };
    return {rad(ch.lo), rad(ch.hi)};
}

PointValue point(const ManifoldModel& model, const StationarySetup& st, const SpectralChannel& ch,
                 double t, double r, Variant v, int sign)
{
    switch (v) {
    case Variant::leading:
        return leading_point(model, st, ch, t, r, sign);
    case Variant::sr:
        return shortrange_point(model, ch, t, r, sign);
    case Variant::dollard:
        return dollard_point(model, ch, t, r, sign);
    default:
        fail(ErrorKind::precondition, "no pointwise formula for the exact comparison dynamics");
    }
}

RadialState explicit_state(const Problem& problem, const SpectralProfile& h, double t, Variant v,
                           int sign)
{
    const ManifoldModel& model = problem.model();
    const RadialGrid& g = *problem.grid();
    RadialState out = RadialState::zeros(problem.grid(), h.modes());
    auto setups = stationary_setups(model, &g, h);
    for (std::size_t c = 0; c < h.channels.size(); ++c) {
        const SpectralChannel& ch = h.channels[c];
        const StationarySetup& st = setups[c];
        find_channel(h, ch.end, ch.m);
        auto nodes = g.end_nodes(ch.end, 0.0, std::numeric_limits<double>::infinity());
        std::vector<double> extra(nodes.size(), 0.0);
        if (v == Variant::dollard && !model.ends[ch.end].q1_constant()) {
            // cumulative int_{r0}^r (q1 - lambda0) segment by segment
            const EndProfile& e = model.ends[ch.end];
            auto f = [&](double s) { return e.q1(s).v - e.lambda0_end; };
            std::vector<double> seg(nodes.size(), 0.0);
            parallel_for(nodes.size(), [&](std::size_t k) {
                double r = g.r[nodes[k]];
                if (!(r > model.r0)) return;
                double prev = k > 0 ? std::max(model.r0, g.r[nodes[k - 1]]) : model.r0;
                seg[k] = quad::integrate(f, prev, r, 1e-13);
            });
            double acc = 0.0;
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                acc += seg[k];
                double r = g.r[nodes[k]];
                if (r > model.r0) extra[k] = t / (r - model.r0) * acc;
            }
        } else if (v == Variant::dollard) {
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                double r = g.r[nodes[k]];
                if (r > model.r0) extra[k] = t / (r - model.r0) * dollard_integral(model, ch.end, r);
            }
        }
        std::vector<cplx>& u = out.mode(ch.m);
        parallel_for(nodes.size(), [&](std::size_t k) {
            double r = g.r[nodes[k]];
            PointValue pv;
            if (v == Variant::leading)
                pv = leading_point(model, st, ch, t, r, sign);
            else
                pv = free_point(model, ch, t, r, sign, extra[k]);
            if (pv.amp != 0.0) u[nodes[k]] += pv.amp * eph(pv.phase);
        });
    }
    return out;
}

}  // namespace

const char* to_string(Variant v)
{
    switch (v) {
    case Variant::exact:
        return "exact";
    case Variant::leading:
        return "leading";
    case Variant::sr:
        return "sr";
    case Variant::dollard:
        return "do";
    }
    return "?";
}

PointValue leading_point(const ManifoldModel& model, const StationarySetup& st,
                         const SpectralChannel& ch, double t, double r, int sign)
{
    PointValue pv;
    if (!in_omega_c(model, st, t, r)) return pv;
    double lc = stationary_point(model, st, t, r);
    if (ch(lc) == 0.0) return pv;
    EikonalPoint e = eikonal_at(model, st, t, r, lc);
    pv.amp = inv_sqrt_2pi * corner(sign) * std::sqrt(e.dr_lambda) * ch(e.lambda_c);
    pv.phase = sign * e.K;
    return pv;
}

PointValue shortrange_point(const ManifoldModel& model, const SpectralChannel& ch, double t, double r,
                            int sign)
{
    return free_point(model, ch, t, r, sign, 0.0);
}

PointValue dollard_point(const ManifoldModel& model, const SpectralChannel& ch, double t, double r,
                         int sign)
{
    if (!(t > 0.0) || !(r > model.r0)) return {};
    return free_point(model, ch, t, r, sign, t / (r - model.r0) * dollard_integral(model, ch.end, r));
}

std::vector<StationarySetup> stationary_setups(const ManifoldModel& model, const RadialGrid* grid,
                                               const SpectralProfile& h)
{
    std::vector<StationarySetup> out;
    for (const auto& c : h.channels) out.push_back(stationary_setup(model, grid, c.end, c.m, c.lo));
    return out;
}

RadialState leading_term(const Problem& problem, const SpectralProfile& h, double t, int sign)
{
    if (!(t > 0.0)) fail(ErrorKind::precondition, "leading term needs t > 0");
    return explicit_state(problem, h, t, Variant::leading, sign);
}

RadialState shortrange_state(const Problem& problem, const SpectralProfile& h, double t, int sign)
{
    return explicit_state(problem, h, t, Variant::sr, sign);
}

RadialState dollard_state(const Problem& problem, const SpectralProfile& h, double t, int sign)
{
    return explicit_state(problem, h, t, Variant::dollard, sign);
}

RadialState comparison_state(const Problem& problem, const SpectralProfile& h, double t, int sign,
                             const QuadratureBudget& budget)
{
    if (t < 0.0) fail(ErrorKind::precondition, "comparison dynamics needs t >= 0");
    const ManifoldModel& model = problem.model();
    const RadialGrid& g = *problem.grid();
    RadialState out = RadialState::zeros(problem.grid(), h.modes());
    for (const SpectralChannel& ch : h.channels) {
        find_channel(h, ch.end, ch.m);
        const EndProfile& e = model.ends[ch.end];
        const double c = channel_shift(model, ch.end, ch.m);
        if (!(ch.lo - c > e.lambda0_end))
            fail(ErrorKind::precondition, "spectral support must lie above the end threshold");
        auto nodes = g.end_nodes(ch.end, 0.0, std::numeric_limits<double>::infinity());
        const std::size_t n = nodes.size();
        std::vector<double> r(n), q1(n);
        for (std::size_t k = 0; k < n; ++k) {
            r[k] = g.r[nodes[k]];
            q1[k] = e.q1(r[k]).v;
        }
        // oscillation count of Theta in lambda, bounded through the lowest energy
        double inv_b = 0.0;
        {
            double l = ch.lo - c, rl = r_lambda(model, ch.end, l);
            for (std::size_t k = 0; k < n; ++k) {
                double eta = 1.0 - chi(2.0 * r[k] / rl);
                if (eta > 0.0 && l > q1[k]) inv_b += eta / std::sqrt(2.0 * (l - q1[k])) * g.h;
            }
        }
        double variation = (ch.hi - ch.lo) * std::max(inv_b, t);
        double nodes_needed = std::max(128.0, budget.points_per_oscillation * variation / (2.0 * M_PI));
        int panels = int(std::ceil(nodes_needed / 8.0));
        if (long(panels) * 8 > budget.max_nodes) {
            std::ostringstream os;
            os << "comparison dynamics needs " << long(panels) * 8 << " energy nodes (budget "
               << budget.max_nodes << ")";
            fail(ErrorKind::convergence, os.str());
        }
        auto lnodes = quad::gauss_legendre_panels(ch.lo, ch.hi, panels);
        // (+-2 pi i)^{-1}
        const cplx pref = 1.0 / cplx(0.0, sign * 2.0 * M_PI);
        std::vector<cplx>& u = out.mode(ch.m);
        std::vector<double> bt(n), amp(n), Phi(n);
        std::vector<cplx> acc(n, 0.0);
        for (const auto& nd : lnodes) {
            cplx hv = ch(nd.x);
            if (hv == 0.0) continue;
            const double l = nd.x - c;
            const double rl = r_lambda(model, ch.end, l);
            for (std::size_t k = 0; k < n; ++k) {
                double eta = 1.0 - chi(2.0 * r[k] / rl);
                bt[k] = 0.0;
                amp[k] = 0.0;
                if (eta <= 0.0) continue;
                double d = 2.0 * (l - q1[k]);
                if (!(d > 0.0)) fail(ErrorKind::domain, "energy below q1 inside the cutoff support");
                double b = std::sqrt(d);
                bt[k] = eta * b;
                amp[k] = eta / std::sqrt(b);
            }
            quad::cumulative(bt.data(), n, g.h, Phi.data());
            const cplx w = nd.w * hv * eph(-sign * t * nd.x);
            for (std::size_t k = 0; k < n; ++k)
                if (amp[k] != 0.0) acc[k] += w * amp[k] * eph(sign * Phi[k]);
        }
        for (std::size_t k = 0; k < n; ++k) u[nodes[k]] += pref * acc[k];
    }
    return out;
}

RadialState dynamics_state(const Problem& problem, const SpectralProfile& h, double t, Variant v,
                           int sign)
{
    switch (v) {
    case Variant::exact:
        return comparison_state(problem, h, t, sign);
    case Variant::leading:
        return leading_term(problem, h, t, sign);
    case Variant::sr:
        return shortrange_state(problem, h, t, sign);
    case Variant::dollard:
        return dollard_state(problem, h, t, sign);
    }
    fail(ErrorKind::internal, "unknown dynamics variant");
}

double leading_norm(const ManifoldModel& model, const SpectralProfile& h, double t, int sign)
{
    return explicit_norm(model, h, t, Variant::leading, sign);
}

double explicit_norm(const ManifoldModel& model, const SpectralProfile& h, double t, Variant v,
                     int sign)
{
    SpectralProfile zero;
    return explicit_distance(model, h, v, zero, v, t, sign);
}

double explicit_distance(const ManifoldModel& model, const SpectralProfile& a, Variant va,
                         const SpectralProfile& b, Variant vb, double t, int sign)
{
    if (!(t > 0.0)) fail(ErrorKind::precondition, "explicit dynamics need t > 0");
    std::set<std::pair<int, int>> keys;
    for (const auto& c : a.channels) keys.insert({c.end, c.m});
    for (const auto& c : b.channels) keys.insert({c.end, c.m});
    double total = 0.0;
    for (const auto& [end, m] : keys) {
        const SpectralChannel* ca = find_channel(a, end, m);
        const SpectralChannel* cb = find_channel(b, end, m);
        StationarySetup sa, sb;
        std::vector<double> breaks;
        if (ca) {
            sa = stationary_setup(model, nullptr, end, m, ca->lo);
            auto [lo, hi] = channel_range(model, sa, *ca, t, va);
            breaks.push_back(lo);
            breaks.push_back(hi);
        }
        if (cb) {
            sb = stationary_setup(model, nullptr, end, m, cb->lo);
            auto [lo, hi] = channel_range(model, sb, *cb, t, vb);
            breaks.push_back(lo);
            breaks.push_back(hi);
        }
        std::sort(breaks.begin(), breaks.end());
        auto f = [&](double r) {
            PointValue pa = ca ? point(model, sa, *ca, t, r, va, sign) : PointValue{};
            PointValue pb = cb ? point(model, sb, *cb, t, r, vb, sign) : PointValue{};
            if (pa.amp == 0.0) return std::norm(pb.amp);
            if (pb.amp == 0.0) return std::norm(pa.amp);
            return std::norm(pa.amp - pb.amp * eph(pb.phase - pa.phase));
        };
        // composite Gauss-Legendre: panels of width <= 1/2, at least 64 per piece
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
            double len = breaks[i + 1] - breaks[i];
            if (!(len > 0.0)) continue;
            int panels = std::max(64, int(std::ceil(2.0 * len)));
            for (const auto& nd : quad::gauss_legendre_panels(breaks[i], breaks[i + 1], panels))
                total += nd.w * f(nd.x);
        }
    }
    return std::sqrt(total);
}

}  // namespace ends
