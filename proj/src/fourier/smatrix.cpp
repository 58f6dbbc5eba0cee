#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ends/errors.hpp"
#include "ends/fourier.hpp"
#include "ends/parallel.hpp"

namespace ends {

namespace {

using Mat = Eigen::MatrixXcd;

double bump(double x)
{
    return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
}

// Test family: two smooth bumps per end (centres r0 + 1 and r0 + 2.5, half-width 2).
std::vector<std::vector<cplx>> test_family(const ManifoldModel& model, const RadialGrid& g)
{
    std::vector<std::vector<cplx>> fam;
    for (int e = 0; e < 2; ++e)
        for (double c : {model.r0 + 1.0, model.r0 + 2.5}) {
            std::vector<cplx> v(g.size(), 0.0);
            for (std::size_t j = 0; j < g.size(); ++j)
                if (g.region[j] == e) v[j] = bump((g.r[j] - c) / 2.0);
            fam.push_back(std::move(v));
        }
    return fam;
}

ModeScattering mode_scattering(const Problem& problem, double lambda, int m,
                               const SmatrixOptions& opt)
{
    const RadialGrid& g = *problem.grid();
    ModeScattering ms;
    ms.m = m;
    // closed (or at threshold) on every end: no channel, nothing to solve
    bool any_open = false;
    for (int e = 0; e < 2; ++e) any_open = any_open || lambda > problem.model().W_end(m, e, g.rmax) + 1e-8;
    if (!any_open) return ms;
    ChannelKernel kp = channel_kernel(problem, lambda, m, 1, opt.ft);
    ChannelKernel km = channel_kernel(problem, lambda, m, -1, opt.ft);
    for (int e = 0; e < 2; ++e)
        if (kp.open[e]) ms.open_ends.push_back(e);
    const int n = int(ms.open_ends.size());
    if (n == 0) return ms;
    auto fam = test_family(problem.model(), g);
    const int nk = int(fam.size());
    Mat Xp(n, nk), Xm(n, nk);
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < nk; ++k) {
            Xp(a, k) = apply_kernel(kp, ms.open_ends[a], g, fam[k]);
            Xm(a, k) = apply_kernel(km, ms.open_ends[a], g, fam[k]);
        }
    Eigen::JacobiSVD<Mat> svd(Xm.adjoint(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    ms.condition = sv(0) / sv(n - 1);
    if (!(ms.condition < opt.condition_cap))
        fail(ErrorKind::convergence, "F^- images of the test family do not span the channels (m = " +
                                         std::to_string(m) + ")");
    // S Xm = Xp in least squares, solved as Xm^* S^* = Xp^*
    Mat S = svd.solve(Xp.adjoint()).adjoint();
    Mat D = S.adjoint() * S - Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> dsvd(D);
    ms.unitarity_defect = dsvd.singularValues()(0);
    ms.S.resize(std::size_t(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) ms.S[std::size_t(a) * n + b] = S(a, b);
    return ms;
}

}  // namespace

cplx ModeScattering::entry(int i, int j) const
{
    auto ia = std::find(open_ends.begin(), open_ends.end(), i);
    auto ja = std::find(open_ends.begin(), open_ends.end(), j);
    if (ia == open_ends.end() || ja == open_ends.end()) return 0.0;
    const std::size_t n = open_ends.size();
    return S[std::size_t(ia - open_ends.begin()) * n + std::size_t(ja - open_ends.begin())];
}

const ModeScattering& ScatteringData::mode(int m) const
{
    for (const auto& ms : modes)
        if (ms.m == m) return ms;
    fail(ErrorKind::precondition, "scattering data has no mode " + std::to_string(m));
}

ScatteringData scattering_matrix(const Problem& problem, double lambda, const SmatrixOptions& opt)
{
    const int mmax = opt.mmax < 0 ? problem.spec().mmax : opt.mmax;
    if (mmax > problem.spec().mmax) fail(ErrorKind::precondition, "mmax exceeds the problem mmax");
    if (!(lambda > problem.model().lambda0))
        fail(ErrorKind::precondition, "scattering matrix needs lambda > lambda0");
    // S depends on m through m^2 only
    std::vector<ModeScattering> by_abs(mmax + 1);
    parallel_for(std::size_t(mmax + 1),
                 [&](std::size_t k) { by_abs[k] = mode_scattering(problem, lambda, int(k), opt); });
    ScatteringData data;
    data.lambda = lambda;
    for (int m = -mmax; m <= mmax; ++m) {
        ModeScattering ms = by_abs[std::abs(m)];
        ms.m = m;
        data.unitarity_defect = std::max(data.unitarity_defect, ms.unitarity_defect);
        data.modes.push_back(std::move(ms));
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            data.offdiag_sv[i][j] = -1.0;
            if (i == j) continue;
            double lo = std::numeric_limits<double>::infinity();
            for (const auto& ms : data.modes) {
                bool oi = std::count(ms.open_ends.begin(), ms.open_ends.end(), i) > 0;
                bool oj = std::count(ms.open_ends.begin(), ms.open_ends.end(), j) > 0;
                if (oi && oj) lo = std::min(lo, std::abs(ms.entry(i, j)));
            }
            if (std::isfinite(lo)) data.offdiag_sv[i][j] = lo;
        }
    return data;
}

double transmission_metric(const ScatteringData& data, int i, int j)
{
    if (i == j) fail(ErrorKind::precondition, "transmission metric needs distinct ends");
    if (i < 0 || i > 1 || j < 0 || j > 1) fail(ErrorKind::precondition, "end index out of range");
    return std::max(0.0, data.offdiag_sv[i][j]);
}

}  // namespace ends
