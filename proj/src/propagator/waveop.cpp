#include <algorithm>
#include <cmath>
#include <map>

#include "ends/errors.hpp"
#include "ends/parallel.hpp"
#include "ends/propagator.hpp"
#include "ends/quad.hpp"

namespace ends {

namespace {

RadialState comparison(const Problem& problem, const SpectralProfile& h, double t, int sign,
                       const WaveOpOptions& opt)
{
    if (opt.comparison == Variant::exact) return comparison_state(problem, h, t, sign, opt.budget);
    return dynamics_state(problem, h, t, opt.comparison, sign);
}

}  // namespace

WaveOpReport wave_operator(const Problem& problem, const SpectralProfile& h,
                           const std::vector<double>& t_grid, int sign, const WaveOpOptions& opt)
{
    if (t_grid.size() < 2) fail(ErrorKind::validation, "wave operator needs at least two times");
    for (std::size_t k = 0; k < t_grid.size(); ++k)
        if (!(t_grid[k] > 0.0) || (k > 0 && !(t_grid[k] > t_grid[k - 1])))
            fail(ErrorKind::validation, "time grid must be positive and increasing");
    WaveOpReport rep;
    rep.times = t_grid;
    rep.h_norm = h.norm();
    const double scale = rep.h_norm > 0.0 ? rep.h_norm : 1.0;
    RadialState prev = comparison(problem, h, t_grid[0], sign, opt);
    rep.comparison_norms.push_back(prev.norm());
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        RadialState cur = comparison(problem, h, t_grid[k], sign, opt);
        rep.comparison_norms.push_back(cur.norm());
        // e^{+-itH} is evolve by -+t
        RadialState back = evolve(problem, cur, -sign * (t_grid[k] - t_grid[k - 1]), opt.evolution);
        rep.cauchy.push_back((back - prev).norm() / scale);
        if (k + 1 == t_grid.size())
            rep.estimate = evolve(problem, cur, -sign * t_grid[k], opt.evolution);
        prev = std::move(cur);
    }
    rep.estimate_norm = rep.estimate.norm();
    bool monotone = true;
    for (std::size_t k = 1; k < rep.cauchy.size(); ++k)
        if (!(rep.cauchy[k] < rep.cauchy[k - 1])) monotone = false;
    rep.converged = monotone && rep.cauchy.back() < opt.tol_W;
    return rep;
}

AdjointReport adjoint_identity_check(const Problem& problem, const SpectralProfile& h,
                                     const RadialState& Wh, const std::vector<RadialState>& family,
                                     int sign, int panels_per_channel, const FtOptions& ft)
{
    const RadialGrid& g = *problem.grid();
    for (const auto& psi : family) {
        const double cut = 1e-12 * psi.norm();
        for (std::size_t i = 0; i < psi.modes.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j)
                if (g.region[j] >= 0 && g.r[j] > g.rmax / 8.0 && std::abs(psi.values[i][j]) > cut)
                    fail(ErrorKind::precondition, "adjoint check states must vanish beyond rmax / 8");
    }
    AdjointReport rep;
    const std::size_t nf = family.size();
    rep.lhs.assign(nf, 0.0);
    rep.rhs.assign(nf, 0.0);
    rep.defects.assign(nf, 0.0);
    for (std::size_t f = 0; f < nf; ++f) rep.lhs[f] = family[f].inner(Wh);
    // (end, mode) channels and their energy nodes
    struct Cell {
        const SpectralChannel* ch;
        double x, w;
    };
    std::vector<Cell> cells;
    for (const auto& ch : h.channels)
        for (const auto& nd : quad::gauss_legendre_panels(ch.lo, ch.hi, panels_per_channel))
            cells.push_back({&ch, nd.x, nd.w});
    rep.lambda_nodes = int(cells.size());
    std::vector<std::vector<cplx>> contrib(cells.size(), std::vector<cplx>(nf, 0.0));
    parallel_for(cells.size(), [&](std::size_t c) {
        const Cell& cell = cells[c];
        cplx hv = (*cell.ch)(cell.x);
        if (hv == 0.0) return;
        ChannelKernel k = channel_kernel(problem, cell.x, cell.ch->m, sign, ft);
        for (std::size_t f = 0; f < nf; ++f) {
            int idx = family[f].index_of(cell.ch->m);
            if (idx < 0) continue;
            cplx Fpsi = apply_kernel(k, cell.ch->end, g, family[f].values[idx]);
            contrib[c][f] = cell.w * std::conj(Fpsi) * hv;
        }
    });
    const double hn = h.norm();
    for (std::size_t f = 0; f < nf; ++f) {
        cplx s = 0.0;
        for (std::size_t c = 0; c < cells.size(); ++c) s += contrib[c][f];
        rep.rhs[f] = s / (2.0 * M_PI);
        double scale = family[f].norm() * hn;
        rep.defects[f] = scale > 0.0 ? std::abs(rep.lhs[f] - rep.rhs[f]) / scale : 0.0;
        rep.max_defect = std::max(rep.max_defect, rep.defects[f]);
    }
    return rep;
}

}  // namespace ends
