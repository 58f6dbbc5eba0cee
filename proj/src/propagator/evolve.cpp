#include <algorithm>
#include <cmath>
#include <sstream>

#include "ends/errors.hpp"
#include "ends/parallel.hpp"
#include "ends/propagator.hpp"

namespace ends {

namespace {

// LU without pivoting of a complex band matrix with half-bandwidth p; I + i a H has a
// positive definite Hermitian part, so no pivoting is needed.
struct BandLU {
    std::size_t n = 0;
    int p = 0;
    std::vector<cplx> a;  // row j, column j + k at a[j * (2p + 1) + k + p]

    cplx& at(std::size_t j, int k) { return a[j * (2 * p + 1) + k + p]; }

    void factor()
    {
        for (std::size_t j = 0; j < n; ++j) {
            const cplx piv = at(j, 0);
            for (int i = 1; i <= p && j + i < n; ++i) {
                cplx l = at(j + i, -i) / piv;
                at(j + i, -i) = l;
                for (int k = 1; k <= p && j + k < n; ++k) at(j + i, k - i) -= l * at(j, k);
            }
        }
    }

    void solve(std::vector<cplx>& x)
    {
        for (std::size_t j = 0; j < n; ++j)
            for (int i = 1; i <= p && j >= std::size_t(i); ++i) x[j] -= at(j, -i) * x[j - i];
        for (std::size_t jj = n; jj-- > 0;) {
            cplx v = x[jj];
            for (int k = 1; k <= p && jj + k < n; ++k) v -= at(jj, k) * x[jj + k];
            x[jj] = v / at(jj, 0);
        }
    }
};

std::vector<double> absorber_profile(const RadialGrid& g, const Absorber& ab)
{
    std::vector<double> x2(g.size(), 0.0);
    if (!(ab.width > 0.0) || !(ab.strength > 0.0)) return x2;
    const double start = g.rmax - ab.width;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (g.region[j] < 0 || g.r[j] <= start) continue;
        double x = (g.r[j] - start) / ab.width;
        x2[j] = x * x;
    }
    return x2;
}

void apply_mask(std::vector<cplx>& u, const std::vector<double>& x2, double strength, double tau)
{
    for (std::size_t j = 0; j < u.size(); ++j)
        if (x2[j] > 0.0) u[j] *= std::exp(-strength * std::abs(tau) * x2[j]);
}

struct ModeRun {
    long steps = 0;
    long matvecs = 0;
};

ModeRun evolve_cn(const ModeOperator& op, std::vector<cplx>& u, double t, const EvolutionConfig& cfg,
                  const std::vector<double>& mask)
{
    ModeRun run;
    const long nsteps = std::max<long>(1, long(std::ceil(std::abs(t) / cfg.dt - 1e-12)));
    const double tau = t / double(nsteps);
    const cplx ia(0.0, 0.5 * tau);
    const std::size_t n = u.size();
    BandLU lu;
    lu.n = n;
    lu.p = op.c2 != 0.0 ? 2 : 1;
    lu.a.assign(n * (2 * lu.p + 1), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        lu.at(j, 0) = 1.0 + ia * op.diag[j];
        if (j + 1 < n) lu.at(j, 1) = ia * op.c1;
        if (j >= 1) lu.at(j, -1) = ia * op.c1;
        if (lu.p == 2) {
            if (j + 2 < n) lu.at(j, 2) = ia * op.c2;
            if (j >= 2) lu.at(j, -2) = ia * op.c2;
        }
    }
    lu.factor();
    std::vector<cplx> hu(n);
    for (long s = 0; s < nsteps; ++s) {
        op.apply(u.data(), hu.data());
        for (std::size_t j = 0; j < n; ++j) u[j] -= ia * hu[j];
        lu.solve(u);
        if (cfg.absorber.width > 0.0) apply_mask(u, mask, cfg.absorber.strength, tau);
        ++run.matvecs;
    }
    run.steps = nsteps;
    return run;
}

// e^{-i tau H} = e^{-i tau c} sum_k a_k T_k((H - c) / d), a_k = (2 - delta_k0) (-i sgn tau)^k J_k(|tau| d)
std::vector<cplx> chebyshev_coefficients(double rho, double sgn)
{
    const int kmax = int(rho + 12.0 * std::cbrt(rho) + 40.0);
    std::vector<cplx> a;
    const cplx unit(0.0, -sgn);
    cplx pw = 1.0;
    int small = 0;
    for (int k = 0; k <= kmax; ++k) {
        double j = rho == 0.0 ? (k == 0 ? 1.0 : 0.0) : std::cyl_bessel_j(double(k), rho);
        a.push_back((k == 0 ? 1.0 : 2.0) * pw * j);
        pw *= unit;
        if (double(k) > rho && std::abs(j) < 1e-17) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
    }
    return a;
}

ModeRun evolve_cheb(const ModeOperator& op, std::vector<cplx>& u, double t,
                    const EvolutionConfig& cfg, const std::vector<double>& mask)
{
    ModeRun run;
    if (!op.dirichlet_mask.empty())
        fail(ErrorKind::precondition, "Chebyshev evolution needs an operator without mask");
    const double lo = op.spectrum_min(), hi = op.spectrum_max();
    const double c = 0.5 * (hi + lo), d = 0.5 * (hi - lo);
    double seg = cfg.max_rho / d;
    if (cfg.absorber.width > 0.0) seg = std::min(seg, 1.0);
    const long nseg = std::max<long>(1, long(std::ceil(std::abs(t) / seg - 1e-12)));
    const double tau = t / double(nseg);
    const double sgn = tau < 0.0 ? -1.0 : 1.0;
    const std::vector<cplx> a = chebyshev_coefficients(std::abs(tau) * d, sgn);
    const cplx phase = std::polar(1.0, -tau * c);
    const std::size_t n = u.size();
    const kernels::Stencil st = op.stencil();
    const double alpha = 1.0 / d, beta = -c / d;
    std::vector<cplx> v0(n), v1(n), v2(n), acc(n);
    for (long s = 0; s < nseg; ++s) {
        v0 = u;
        std::fill(acc.begin(), acc.end(), cplx(0.0));
        kernels::axpy(a[0], v0.data(), acc.data(), n);
        if (a.size() > 1) {
            kernels::apply(st, v0.data(), v1.data());
            for (std::size_t j = 0; j < n; ++j) v1[j] = alpha * v1[j] + beta * v0[j];
            kernels::axpy(a[1], v1.data(), acc.data(), n);
            ++run.matvecs;
        }
        for (std::size_t k = 2; k < a.size(); ++k) {
            kernels::cheb_step(st, alpha, beta, v1.data(), v0.data(), v2.data());
            kernels::axpy(a[k], v2.data(), acc.data(), n);
            std::swap(v0, v1);
            std::swap(v1, v2);
            ++run.matvecs;
        }
        for (std::size_t j = 0; j < n; ++j) u[j] = phase * acc[j];
        if (cfg.absorber.width > 0.0) apply_mask(u, mask, cfg.absorber.strength, tau);
    }
    run.steps = nseg;
    return run;
}

}  // namespace

const char* to_string(Scheme s)
{
    return s == Scheme::chebyshev ? "chebyshev" : "crank_nicolson";
}

void validate(const EvolutionConfig& cfg, const Problem& problem)
{
    if (!(cfg.dt > 0.0)) fail(ErrorKind::validation, "time step must be positive");
    if (!(cfg.max_rho > 0.0)) fail(ErrorKind::validation, "Chebyshev segment cap must be positive");
    const Absorber& ab = cfg.absorber;
    if (ab.width < 0.0 || ab.strength < 0.0)
        fail(ErrorKind::validation, "absorber width and strength must be >= 0");
    if (ab.width > 0.5 * problem.grid()->rmax)
        fail(ErrorKind::validation, "absorbing layer must lie outside rmax / 2");
}

RadialState evolve(const Problem& problem, const RadialState& psi, double t,
                   const EvolutionConfig& cfg, EvolutionReport* report)
{
    validate(cfg, problem);
    if (psi.grid != problem.grid()) fail(ErrorKind::precondition, "state lives on another grid");
    RadialState out = psi;
    const double n0 = psi.norm();
    if (cfg.scheme == Scheme::crank_nicolson) {
        for (int m : psi.modes) {
            const ModeOperator& op = problem.mode(m);
            double wmax = 0.0;
            for (double w : op.W) wmax = std::max(wmax, std::abs(w));
            if (cfg.dt * wmax > cfg.cfl_limit) {
                std::ostringstream os;
                os << "dt * max|W_" << m << "| = " << cfg.dt * wmax << " exceeds " << cfg.cfl_limit;
                fail(ErrorKind::validation, os.str());
            }
        }
    }
    std::vector<ModeRun> runs(psi.modes.size());
    const std::vector<double> mask = absorber_profile(*problem.grid(), cfg.absorber);
    if (t != 0.0) {
        parallel_for(psi.modes.size(), [&](std::size_t i) {
            const ModeOperator& op = problem.mode(psi.modes[i]);
            runs[i] = cfg.scheme == Scheme::chebyshev ? evolve_cheb(op, out.values[i], t, cfg, mask)
                                                      : evolve_cn(op, out.values[i], t, cfg, mask);
        });
    }
    const double n1 = out.norm();
    if (report) {
        report->norm_initial = n0;
        report->norm_final = n1;
        report->steps = 0;
        report->matvecs = 0;
        for (const auto& r : runs) {
            report->steps = std::max(report->steps, r.steps);
            report->matvecs += r.matvecs;
        }
    }
    if (!(n1 <= n0 * (1.0 + 1e-3))) {
        std::ostringstream os;
        os << "evolution unstable: norm grew from " << n0 << " to " << n1;
        fail(ErrorKind::convergence, os.str());
    }
    return out;
}

}  // namespace ends
