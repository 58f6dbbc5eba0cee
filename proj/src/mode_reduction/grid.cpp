#include <algorithm>
#include <cmath>

#include "ends/errors.hpp"
#include "ends/mode_reduction.hpp"

namespace ends {

GridSpec grid_from_config(const Config& cfg, GridSpec spec)
{
    cfg.check_keys("grid", {"rmax", "dr", "stencil_order", "mmax"});
    spec.rmax = cfg.get_double("grid", "rmax", spec.rmax);
    spec.dr = cfg.get_double("grid", "dr", spec.dr);
    spec.stencil_order = cfg.get_int("grid", "stencil_order", spec.stencil_order);
    spec.mmax = cfg.get_int("grid", "mmax", spec.mmax);
    if (!(spec.dr > 0.0)) cfg.error_at("grid", "dr", "dr must be positive");
    if (spec.stencil_order != 2 && spec.stencil_order != 4)
        cfg.error_at("grid", "stencil_order", "stencil_order must be 2 or 4");
    if (spec.mmax < 0) cfg.error_at("grid", "mmax", "mmax must be >= 0");
    return spec;
}

std::shared_ptr<const RadialGrid> make_grid(const ManifoldModel& model, const GridSpec& spec)
{
    if (!(spec.dr > 0.0)) fail(ErrorKind::validation, "grid spacing must be positive");
    if (!(spec.rmax > model.r0)) fail(ErrorKind::validation, "rmax must exceed r0");
    auto g = std::make_shared<RadialGrid>();
    g->rmax = spec.rmax;
    g->S = model.s_extent(spec.rmax);
    const long intervals = std::lround(2.0 * g->S / spec.dr);
    if (intervals < 8) fail(ErrorKind::validation, "grid too coarse");
    g->h = 2.0 * g->S / double(intervals);
    const std::size_t n = static_cast<std::size_t>(intervals - 1);
    g->s.resize(n);
    g->r.resize(n);
    g->region.resize(n);
    g->weights.assign(n, g->h);
    for (std::size_t j = 0; j < n; ++j) {
        double s = -g->S + double(j + 1) * g->h;
        g->s[j] = s;
        auto loc = model.locate(s);
        g->region[j] = loc.end;
        g->r[j] = loc.end >= 0 ? loc.r : 0.0;
    }
    return g;
}

std::vector<std::size_t> RadialGrid::end_nodes(int end, double ra, double rb) const
{
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < s.size(); ++j)
        if (region[j] == end && r[j] >= ra && r[j] <= rb) out.push_back(j);
    if (end == 0) std::reverse(out.begin(), out.end());
    return out;
}

std::size_t RadialGrid::nearest(double s_val) const
{
    double x = (s_val + S) / h - 1.0;
    long j = std::lround(x);
    j = std::clamp<long>(j, 0, static_cast<long>(s.size()) - 1);
    return static_cast<std::size_t>(j);
}

}  // namespace ends
