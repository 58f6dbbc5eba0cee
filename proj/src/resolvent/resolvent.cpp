#include <algorithm>
#include <cmath>

#include "ends/errors.hpp"
#include "ends/parallel.hpp"
#include "ends/resolvent.hpp"

namespace ends {

namespace {

// Nodes whose stencil stays away from the grid ends and from jumps of W.
std::vector<std::uint8_t> interior_mask(const ManifoldModel& model, const RadialGrid& g)
{
    const std::size_t n = g.size();
    std::vector<std::uint8_t> mask(n, 1);
    for (std::size_t j = 0; j < n; ++j) {
        if (j < 3 || j + 3 >= n) mask[j] = 0;
        for (double b : model.breakpoints())
            if (std::abs(g.s[j] - b) < 3.0 * g.h) mask[j] = 0;
    }
    return mask;
}

}  // namespace

double interior_residual(const Problem& problem, double lambda, const RadialState& phi,
                         const RadialState& psi)
{
    const RadialGrid& g = *problem.grid();
    auto mask = interior_mask(problem.model(), g);
    double res2 = 0.0, ref2 = 0.0;
    std::vector<cplx> hphi(g.size());
    for (std::size_t i = 0; i < phi.modes.size(); ++i) {
        const ModeOperator& op = problem.mode(phi.modes[i]);
        op.apply(phi.values[i].data(), hphi.data());
        int k = psi.index_of(phi.modes[i]);
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (!mask[j]) continue;
            cplx rhs = k >= 0 ? psi.values[k][j] : cplx(0.0);
            res2 += std::norm(hphi[j] - lambda * phi.values[i][j] - rhs);
        }
    }
    for (const auto& v : psi.values)
        for (std::size_t j = 0; j < v.size(); ++j)
            if (mask[j]) ref2 += std::norm(v[j]);
    double res = std::sqrt(res2 * g.h);
    double ref = std::sqrt(ref2 * g.h);
    return ref > 0.0 ? res / ref : res;
}

ResolventResult limiting_resolvent(const Problem& problem, double lambda, const RadialState& psi,
                                   int sign, const ResolventOptions& opt)
{
    const ManifoldModel& model = problem.model();
    if (!(lambda > model.lambda0 + opt.margin))
        fail(ErrorKind::precondition, "limiting resolvent needs lambda > lambda0 + margin");
    if (psi.grid != problem.grid()) fail(ErrorKind::precondition, "state lives on another grid");
    ResolventResult out;
    out.phi = RadialState::zeros(problem.grid(), psi.modes);
    out.dphi = RadialState::zeros(problem.grid(), psi.modes);
    std::vector<double> drift(psi.modes.size(), 0.0);
    parallel_for(psi.modes.size(), [&](std::size_t i) {
        const std::vector<cplx>& v = psi.values[i];
        bool any = std::any_of(v.begin(), v.end(), [](cplx x) { return x != 0.0; });
        if (!any) return;
        problem.mode(psi.modes[i]);
        JostPair jp = jost_pair(model, problem.grid(), psi.modes[i], lambda, sign);
        out.phi.values[i] = green_apply(jp, v, &out.dphi.values[i]);
        drift[i] = jp.wr_drift;
    });
    for (double d : drift) out.wronskian_drift = std::max(out.wronskian_drift, d);
    out.residual = interior_residual(problem, lambda, out.phi, psi);
    if (out.residual > opt.tol_res)
        fail(ErrorKind::convergence, "limiting resolvent residual " +
                                         std::to_string(out.residual) + " exceeds tolerance");
    return out;
}

std::vector<cplx> radial_derivative(const RadialGrid& g, const std::vector<cplx>& u)
{
    const std::size_t n = u.size();
    std::vector<cplx> d(n, 0.0);
    if (n < 5) return d;
    const double h = g.h;
    for (std::size_t j = 0; j < n; ++j) {
        cplx ds;
        if (j >= 2 && j + 2 < n)
            ds = (-u[j + 2] + 8.0 * u[j + 1] - 8.0 * u[j - 1] + u[j - 2]) / (12.0 * h);
        else if (j == 0)
            ds = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        else if (j + 1 == n)
            ds = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
        else
            ds = (u[j + 1] - u[j - 1]) / (2.0 * h);
        double dir = g.region[j] == 0 ? -1.0 : 1.0;
        d[j] = cplx(0.0, -1.0) * dir * ds;
    }
    return d;
}

namespace {

std::vector<double> radiation_field(const ManifoldModel& model, const RadialState& phi,
                                    double lambda, int sign, double beta)
{
    const RadialGrid& g = *phi.grid;
    std::vector<double> weight(g.size(), 1.0);
    for (std::size_t j = 0; j < g.size(); ++j)
        weight[j] = std::pow(g.region[j] < 0 ? 0.5 * model.r0 : g.r[j], beta);
    std::vector<double> abs2(g.size(), 0.0);
    std::vector<cplx> a(g.size(), 0.0);
    for (std::size_t i = 0; i < phi.modes.size(); ++i) {
        const int m = phi.modes[i];
        const double shift[2] = {channel_shift(model, 0, m), channel_shift(model, 1, m)};
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (g.region[j] < 0) continue;
            PhaseA pa = phase_a(model, cplx(lambda - shift[g.region[j]]), g.r[j], g.region[j]);
            a[j] = sign > 0 ? pa.plus : -pa.minus;
        }
        const std::vector<cplx>& u = phi.values[i];
        std::vector<cplx> Au = radial_derivative(g, u);
        for (std::size_t j = 0; j < g.size(); ++j)
            abs2[j] += std::norm(weight[j] * (Au[j] - a[j] * u[j]));
    }
    return abs2;
}

}  // namespace

double radiation_residual(const ManifoldModel& model, const RadialState& phi, double lambda,
                          int sign, double beta)
{
    if (beta < 0.0) fail(ErrorKind::precondition, "beta must be >= 0");
    return besov_norms(*phi.grid, radiation_field(model, phi, lambda, sign, beta)).Bstar;
}

SommerfeldReport sommerfeld_check(const Problem& problem, const RadialState& phi,
                                  const RadialState& psi, double lambda, int sign, double tol_res)
{
    SommerfeldReport rep;
    rep.residual = interior_residual(problem, lambda, phi, psi);
    rep.equation_ok = rep.residual <= tol_res;
    BesovNorms rad = besov_norms(*phi.grid, radiation_field(problem.model(), phi, lambda, sign, 0.0));
    BesovNorms own = besov_norms(phi);
    rep.phi_bstar = own.Bstar;
    const std::size_t na = rad.annulus.size();
    for (std::size_t k = na >= 3 ? na - 3 : 0; k < na; ++k)
        rep.tail_defects.push_back(rad.annulus[k] / std::sqrt(std::ldexp(1.0, int(k))));
    double last = rep.tail_defects.empty() ? 0.0 : rep.tail_defects.back();
    double first = rep.tail_defects.empty() ? 0.0 : rep.tail_defects.front();
    rep.radiation_ok = last <= 0.05 * rep.phi_bstar && last <= first;
    rep.pass = rep.equation_ok && rep.radiation_ok;
    return rep;
}

}  // namespace ends
