#include <algorithm>
#include <cmath>
#include <sstream>

#include "ends/errors.hpp"
#include "ends/parallel.hpp"
#include "ends/propagator.hpp"
#include "ends/quad.hpp"

namespace ends {

namespace {

double end_mass(const RadialState& u, int end, double r0)
{
    const RadialGrid& g = *u.grid;
    double acc = 0.0;
    for (const auto& v : u.values)
        for (std::size_t j = 0; j < g.size(); ++j)
            if (g.region[j] == end && g.r[j] > r0) acc += std::norm(v[j]) * g.weights[j];
    return std::sqrt(acc);
}

void restrict_to_end(RadialState& u, int end, double r0)
{
    const RadialGrid& g = *u.grid;
    for (auto& v : u.values)
        for (std::size_t j = 0; j < g.size(); ++j)
            if (!(g.region[j] == end && g.r[j] > r0)) v[j] = 0.0;
}

}  // namespace

RadialState gaussian_packet(const Problem& problem, const Packet& p)
{
    if (p.end < 0 || p.end > 1) fail(ErrorKind::validation, "packet end must be 0 or 1");
    if (!(p.width > 0.0)) fail(ErrorKind::validation, "packet width must be positive");
    const RadialGrid& g = *problem.grid();
    RadialState u = RadialState::zeros(problem.grid(), {p.m});
    auto& v = u.mode(p.m);
    const double dir = p.incoming ? -1.0 : 1.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (g.region[j] != p.end) continue;
        double x = g.r[j] - p.r_center;
        double a = -x * x / (4.0 * p.width * p.width);
        if (a < -700.0) continue;
        v[j] = std::exp(a) * std::polar(1.0, dir * p.k * g.r[j]);
    }
    double n = u.norm();
    if (!(n > 0.0)) fail(ErrorKind::validation, "packet misses the grid");
    u *= 1.0 / n;
    return u;
}

ProjectionReport end_projection(const Problem& problem, const RadialState& psi, int end, int sign,
                                const std::vector<double>& t_grid, const EvolutionConfig& cfg,
                                double stab_tol)
{
    if (end < 0 || end > 1) fail(ErrorKind::validation, "end index must be 0 or 1");
    if (t_grid.empty()) fail(ErrorKind::validation, "projection needs a time grid");
    for (std::size_t k = 0; k < t_grid.size(); ++k)
        if (!(t_grid[k] > 0.0) || (k > 0 && !(t_grid[k] > t_grid[k - 1])))
            fail(ErrorKind::validation, "time grid must be positive and increasing");
    const double r0 = problem.model().r0;
    ProjectionReport rep;
    rep.end = end;
    rep.sign = sign;
    rep.times = t_grid;
    RadialState u = psi;
    double t = 0.0;
    for (double tk : t_grid) {
        u = evolve(problem, u, sign * (tk - t), cfg);
        t = tk;
        rep.masses.push_back(end_mass(u, end, r0));
    }
    const double scale = std::max(psi.norm(), 1e-300);
    if (rep.masses.size() >= 2)
        rep.change = std::abs(rep.masses.back() - rep.masses[rep.masses.size() - 2]) / scale;
    rep.stable = rep.masses.size() >= 2 && rep.change <= stab_tol;
    restrict_to_end(u, end, r0);
    EvolutionConfig back = cfg;
    back.absorber = {};
    rep.state = evolve(problem, u, -sign * t, back);
    return rep;
}

TransmissionReport transmission_experiment(const Problem& problem, int from, int to,
                                           const RadialState& psi, const TransmissionOptions& opt)
{
    if (from == to) fail(ErrorKind::precondition, "transmission needs two distinct ends");
    if (from < 0 || from > 1 || to < 0 || to > 1)
        fail(ErrorKind::precondition, "end index must be 0 or 1");
    const ManifoldModel& model = problem.model();
    const RadialGrid& g = *problem.grid();
    TransmissionReport rep;
    rep.from = from;
    rep.to = to;
    rep.psi_norm = psi.norm();
    if (!(rep.psi_norm > 0.0)) fail(ErrorKind::precondition, "transmission needs psi != 0");
    for (const auto& v : psi.values)
        for (std::size_t j = 0; j < g.size(); ++j)
            if (g.region[j] >= 0 && g.r[j] > g.rmax / 8.0 && std::abs(v[j]) > 1e-12 * rep.psi_norm)
                fail(ErrorKind::precondition, "transmission packet must vanish beyond rmax / 8");

    double lo = opt.lambda_lo, hi = opt.lambda_hi;
    if (!(hi > lo)) {
        // mean energy +- 6 standard deviations
        double e = 0.0, e2 = 0.0;
        for (std::size_t i = 0; i < psi.modes.size(); ++i) {
            std::vector<cplx> hv(g.size());
            problem.mode(psi.modes[i]).apply(psi.values[i].data(), hv.data());
            e += kernels::dot(psi.values[i].data(), hv.data(), g.size()).real() * g.h;
            e2 += kernels::norm2(hv.data(), g.size()) * g.h;
        }
        const double n2 = rep.psi_norm * rep.psi_norm;
        e /= n2;
        double sd = std::sqrt(std::max(0.0, e2 / n2 - e * e));
        lo = e - 6.0 * sd;
        hi = e + 6.0 * sd;
    }
    lo = std::max(lo, model.lambda0 + 1e-3);
    if (!(hi > lo)) fail(ErrorKind::precondition, "packet energies lie below the threshold");

    int mabs = 0;
    for (int m : psi.modes) mabs = std::max(mabs, std::abs(m));
    auto nodes = quad::gauss_legendre_panels(lo, hi, opt.panels);
    struct Cell {
        double in = 0.0, pred = 0.0, direct = 0.0, sv = 0.0;
    };
    std::vector<Cell> cells(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t c) {
        const double l = nodes[c].x;
        SmatrixOptions so;
        so.ft = opt.ft;
        so.mmax = mabs;
        ScatteringData sd = scattering_matrix(problem, l, so);
        cells[c].sv = transmission_metric(sd, to, from);
        for (std::size_t i = 0; i < psi.modes.size(); ++i) {
            const int m = psi.modes[i];
            ChannelKernel km = channel_kernel(problem, l, m, -1, opt.ft);
            ChannelKernel kp = channel_kernel(problem, l, m, 1, opt.ft);
            cplx fm[2], fp[2];
            for (int e = 0; e < 2; ++e) {
                fm[e] = apply_kernel(km, e, g, psi.values[i]);
                fp[e] = apply_kernel(kp, e, g, psi.values[i]);
            }
            const ModeScattering& ms = sd.mode(m);
            cplx out = ms.entry(to, 0) * fm[0] + ms.entry(to, 1) * fm[1];
            cells[c].in += std::norm(fm[from]);
            cells[c].pred += std::norm(out);
            cells[c].direct += std::norm(fp[to]);
        }
    });
    double in = 0.0, pred = 0.0, direct = 0.0;
    rep.sigma_min = 1.0;
    for (std::size_t c = 0; c < nodes.size(); ++c) {
        in += nodes[c].w * cells[c].in;
        pred += nodes[c].w * cells[c].pred;
        direct += nodes[c].w * cells[c].direct;
        rep.sigma_min = std::min(rep.sigma_min, cells[c].sv);
    }
    const double n2 = rep.psi_norm * rep.psi_norm;
    rep.incoming_fraction = in / (2.0 * M_PI) / n2;
    if (rep.incoming_fraction < opt.incoming_min) {
        std::ostringstream os;
        os << "packet is not incoming from end " << from + 1 << ": ||1_j F^- psi||^2 / ||psi||^2 = "
           << rep.incoming_fraction;
        fail(ErrorKind::precondition, os.str());
    }
    rep.predicted = std::sqrt(pred / (2.0 * M_PI));
    rep.predicted_direct = std::sqrt(direct / (2.0 * M_PI));
    rep.lower_bound = rep.sigma_min * rep.psi_norm;

    rep.projection = end_projection(problem, psi, to, 1, opt.t_grid, opt.evolution, opt.stab_tol);
    rep.dynamic = rep.projection.masses.back();
    rep.ratio = rep.predicted > 0.0 ? rep.dynamic / rep.predicted : 0.0;
    rep.verdict = rep.sigma_min > 0.0 && rep.projection.stable && rep.dynamic > 1e-8 * rep.psi_norm
                      ? "nonzero"
                      : "indeterminate";
    return rep;
}

}  // namespace ends
