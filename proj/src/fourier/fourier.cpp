#include <algorithm>
#include <cmath>
#include <sstream>

#include "ends/errors.hpp"
#include "ends/fourier.hpp"
#include "ends/parallel.hpp"

namespace ends {

BoundaryField BoundaryField::zeros(std::vector<int> modes)
{
    BoundaryField f;
    f.xi[0].assign(modes.size(), 0.0);
    f.xi[1].assign(modes.size(), 0.0);
    f.modes = std::move(modes);
    return f;
}

int BoundaryField::index_of(int m) const
{
    auto it = std::find(modes.begin(), modes.end(), m);
    return it == modes.end() ? -1 : int(it - modes.begin());
}

cplx& BoundaryField::at(int end, int m)
{
    int i = index_of(m);
    if (i < 0) fail(ErrorKind::precondition, "boundary field has no mode " + std::to_string(m));
    return xi.at(end)[i];
}

cplx BoundaryField::at(int end, int m) const
{
    int i = index_of(m);
    return i < 0 ? cplx(0.0) : xi.at(end)[i];
}

double BoundaryField::norm() const
{
    double s = 0.0;
    for (const auto& v : xi)
        for (cplx x : v) s += std::norm(x);
    return std::sqrt(s);
}

namespace {

bool channel_open(const ManifoldModel& model, const RadialGrid& g, int m, int end, double lambda)
{
    return lambda > model.W_end(m, end, g.rmax);
}

}  // namespace

FtResult extract_ft(const Problem& problem, double lambda, const RadialState& phi, int sign,
                    const FtOptions& opt)
{
    const ManifoldModel& model = problem.model();
    const RadialGrid& g = *phi.grid;
    FtResult res;
    res.xi = BoundaryField::zeros(phi.modes);
    res.sequence.assign(3, res.xi);
    for (std::size_t i = 0; i < phi.modes.size(); ++i) {
        for (int e = 0; e < 2; ++e) {
            if (!channel_open(model, g, phi.modes[i], e, lambda)) continue;
            EndPhase ph = end_phase(model, g, e, phi.modes[i], lambda);
            std::vector<cplx> u(ph.nodes.size());
            for (std::size_t k = 0; k < u.size(); ++k) u[k] = phi.values[i][ph.nodes[k]];
            std::vector<cplx> est =
                boundary_limit(model, g, ph, phi.modes[i], sign, u, opt, &res.R);
            for (int w = 0; w < 3; ++w) res.sequence[w].xi[e][i] = est[w];
            res.xi.xi[e][i] = est.back();
        }
    }
    double scale = 0.0, diff = 0.0;
    for (int e = 0; e < 2; ++e)
        for (std::size_t i = 0; i < phi.modes.size(); ++i) {
            scale = std::max(scale, std::abs(res.sequence[2].xi[e][i]));
            diff = std::max(diff, std::abs(res.sequence[2].xi[e][i] - res.sequence[1].xi[e][i]));
        }
    res.change = scale > 0.0 ? diff / scale : 0.0;
    res.converged = res.change <= opt.tol_F;
    if (!res.converged && opt.throw_on_fail) {
        std::ostringstream os;
        os << "distorted Fourier transform did not stabilize: relative change " << res.change
           << " over windows R =";
        for (double R : res.R) os << ' ' << R;
        fail(ErrorKind::convergence, os.str());
    }
    return res;
}

FtResult distorted_ft(const Problem& problem, double lambda, const RadialState& psi, int sign,
                      const FtOptions& opt)
{
    ResolventResult rr = limiting_resolvent(problem, lambda, psi, sign);
    return extract_ft(problem, lambda, rr.phi, sign, opt);
}

ChannelKernel channel_kernel(const Problem& problem, double lambda, int m, int sign,
                             const FtOptions& opt)
{
    const ManifoldModel& model = problem.model();
    const RadialGrid& g = *problem.grid();
    problem.mode(m);
    ChannelKernel ck;
    ck.m = m;
    ck.lambda = lambda;
    ck.sign = sign;
    JostPair jp = jost_pair(model, problem.grid(), m, lambda, sign);
    const std::size_t n = g.size();
    for (int e = 0; e < 2; ++e) {
        ck.open[e] = jp.open[e] && channel_open(model, g, m, e, lambda);
        if (!ck.open[e]) continue;
        EndPhase ph = end_phase(model, g, e, m, lambda);
        const std::vector<cplx>& uo = e == 1 ? jp.uR : jp.uL;
        const std::vector<double>& so = e == 1 ? jp.scR : jp.scL;
        const std::vector<cplx>& ui = e == 1 ? jp.uL : jp.uR;
        const std::vector<double>& si = e == 1 ? jp.scL : jp.scR;
        const double sref = e == 1 ? so[n - 1] : so[0];
        std::vector<cplx> u(ph.nodes.size());
        for (std::size_t k = 0; k < u.size(); ++k)
            u[k] = uo[ph.nodes[k]] * std::exp(so[ph.nodes[k]] - sref);
        std::vector<cplx> est = boundary_limit(model, g, ph, m, sign, u, opt);
        double scale = std::abs(est[2]);
        if (scale > 0.0) ck.change = std::max(ck.change, std::abs(est[2] - est[1]) / scale);
        ck.K[e].resize(n);
        for (std::size_t j = 0; j < n; ++j)
            ck.K[e][j] = -2.0 / jp.wr * est[2] * ui[j] * std::exp(sref + si[j] - jp.wr_scale);
    }
    if (ck.change > opt.tol_F && opt.throw_on_fail) {
        std::ostringstream os;
        os << "boundary kernel did not stabilize at lambda = " << lambda << ", m = " << m
           << ": relative change " << ck.change;
        fail(ErrorKind::convergence, os.str());
    }
    return ck;
}

cplx apply_kernel(const ChannelKernel& k, int end, const RadialGrid& grid,
                  const std::vector<cplx>& psi)
{
    if (!k.open[end]) return 0.0;
    cplx acc = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) acc += k.K[end][j] * psi[j];
    return acc * grid.h;
}

RadialState adjoint_ft(const Problem& problem, double lambda, const BoundaryField& xi, int sign,
                       const FtOptions& opt)
{
    RadialState out = RadialState::zeros(problem.grid(), xi.modes);
    parallel_for(xi.modes.size(), [&](std::size_t i) {
        if (xi.xi[0][i] == 0.0 && xi.xi[1][i] == 0.0) return;
        ChannelKernel k = channel_kernel(problem, lambda, xi.modes[i], sign, opt);
        for (int e = 0; e < 2; ++e) {
            if (!k.open[e]) continue;
            for (std::size_t j = 0; j < out.values[i].size(); ++j)
                out.values[i][j] += std::conj(k.K[e][j]) * xi.xi[e][i];
        }
    });
    return out;
}

RadialState wkb_eigenfunction(const Problem& problem, double lambda, const BoundaryField& xi,
                              int sign)
{
    const ManifoldModel& model = problem.model();
    const RadialGrid& g = *problem.grid();
    RadialState out = RadialState::zeros(problem.grid(), xi.modes);
    for (int e = 0; e < 2; ++e) {
        for (std::size_t i = 0; i < xi.modes.size(); ++i) {
            if (xi.xi[e][i] == 0.0) continue;
            EndPhase ph = end_phase(model, g, e, xi.modes[i], lambda);
            if (!(lambda - ph.shift > model.ends[e].lambda0_end)) continue;
            for (std::size_t k = 0; k < ph.nodes.size(); ++k) {
                if (ph.eta[k] == 0.0) continue;
                double amp = ph.eta[k] * std::pow(2.0 * (lambda - ph.shift - ph.q1[k]), -0.25);
                out.values[i][ph.nodes[k]] = amp * std::polar(1.0, sign * ph.Phi[k]) * xi.xi[e][i];
            }
        }
    }
    return out;
}

Decomposition eigenfunction_decompose(const Problem& problem, const RadialState& phi,
                                      double lambda, const FtOptions& opt)
{
    const ManifoldModel& model = problem.model();
    const RadialGrid& g = *phi.grid;
    Decomposition dec;
    dec.xi_plus = BoundaryField::zeros(phi.modes);
    dec.xi_minus = BoundaryField::zeros(phi.modes);
    double scale = 0.0, diff = 0.0;
    for (int e = 0; e < 2; ++e) {
        for (std::size_t i = 0; i < phi.modes.size(); ++i) {
            if (!channel_open(model, g, phi.modes[i], e, lambda)) continue;
            EndPhase ph = end_phase(model, g, e, phi.modes[i], lambda);
            std::vector<cplx> Au = radial_derivative(g, phi.values[i]);
            for (int sign : {1, -1}) {
                // xi_+- = (1/2) lim exp(-+ i Phi) b^{-1/2} (A +- b) u; boundary_limit
                // multiplies by sqrt(b) exp(-+ i Phi), so pass (A +- b) u / (2 b)
                std::vector<cplx> v(ph.nodes.size(), 0.0);
                for (std::size_t k = 0; k < v.size(); ++k) {
                    if (ph.b[k] <= 0.0) continue;
                    std::size_t j = ph.nodes[k];
                    v[k] = (Au[j] + double(sign) * ph.b[k] * phi.values[i][j]) / (2.0 * ph.b[k]);
                    // (A +- b) already carries the amplitude (k_W + b) / (2 sqrt(b k_W)) ~ 1
                    if (opt.tail_correction) {
                        double d = lambda - model.W_end(phi.modes[i], e, ph.r[k]);
                        if (d > 0.0) v[k] *= std::sqrt(ph.b[k] / std::sqrt(2.0 * d));
                    }
                }
                std::vector<cplx> est = boundary_limit(model, g, ph, phi.modes[i], sign, v, opt);
                BoundaryField& target = sign > 0 ? dec.xi_plus : dec.xi_minus;
                target.xi[e][i] = est[2];
                scale = std::max(scale, std::abs(est[2]));
                diff = std::max(diff, std::abs(est[2] - est[1]));
            }
        }
    }
    dec.change = scale > 0.0 ? diff / scale : 0.0;
    dec.converged = dec.change <= opt.tol_F;
    if (!dec.converged && opt.throw_on_fail)
        fail(ErrorKind::convergence, "eigenfunction decomposition did not stabilize: change " +
                                         std::to_string(dec.change));
    RadialState rest = phi - wkb_eigenfunction(problem, lambda, dec.xi_plus, 1) +
                       wkb_eigenfunction(problem, lambda, dec.xi_minus, -1);
    BesovNorms bn = besov_norms(rest);
    const std::size_t na = bn.annulus.size();
    for (std::size_t k = na >= 3 ? na - 3 : 0; k < na; ++k)
        dec.tail_defects.push_back(bn.annulus[k] / std::sqrt(std::ldexp(1.0, int(k))));
    return dec;
}

}  // namespace ends
