#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "ends/errors.hpp"
#include "ends/parallel.hpp"
#include "ends/propagator.hpp"

namespace ends {

namespace {

std::mutex fftw_planner;

// Chebyshev coefficients of g(c + d x) on [-1, 1] from N Chebyshev-Gauss samples (DCT-II).
std::vector<double> cheb_coefficients(const std::function<double(double)>& g, double c, double d,
                                      int N)
{
    std::vector<double> in(N), out(N);
    for (int j = 0; j < N; ++j) in[j] = g(c + d * std::cos(M_PI * (j + 0.5) / N));
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner);
        plan = fftw_plan_r2r_1d(N, in.data(), out.data(), FFTW_REDFT10, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner);
        fftw_destroy_plan(plan);
    }
    for (int k = 0; k < N; ++k) out[k] /= double(N);
    out[0] *= 0.5;
    return out;
}

}  // namespace

RadialState energy_filter(const Problem& problem, const RadialState& psi, double lo, double hi,
                          double width, FilterReport* report)
{
    if (!(width > 0.0)) fail(ErrorKind::validation, "filter width must be positive");
    if (!(hi > lo)) fail(ErrorKind::validation, "filter window needs lo < hi");
    auto g = [&](double l) {
        double up = std::isinf(hi) ? -1.0 : std::erf((l - hi) / width);
        return 0.5 * (std::erf((l - lo) / width) - up);
    };
    RadialState out = psi;
    std::vector<FilterReport> reps(psi.modes.size());
    parallel_for(psi.modes.size(), [&](std::size_t i) {
        const ModeOperator& op = problem.mode(psi.modes[i]);
        if (!op.dirichlet_mask.empty())
            fail(ErrorKind::precondition, "energy filter needs an operator without mask");
        const double emin = op.spectrum_min(), emax = op.spectrum_max();
        const double c = 0.5 * (emax + emin), d = 0.5 * (emax - emin);
        std::vector<double> a;
        double tail = 0.0;
        // start with the transition width resolved by ~4 samples
        int N0 = 512;
        while (N0 < (1 << 22) && M_PI * d / N0 > 0.25 * width) N0 *= 2;
        for (int N = N0;; N *= 2) {
            a = cheb_coefficients(g, c, d, N);
            double amax = 0.0;
            for (double v : a) amax = std::max(amax, std::abs(v));
            tail = 0.0;
            for (int k = N - N / 4; k < N; ++k) tail = std::max(tail, std::abs(a[k]));
            if (tail <= 1e-14 * std::max(amax, 1.0)) break;
            if (N >= (1 << 22)) fail(ErrorKind::convergence, "energy filter expansion too long");
        }
        std::size_t K = a.size();
        while (K > 1 && std::abs(a[K - 1]) <= 1e-15) --K;
        reps[i].terms = int(K);
        reps[i].tail = tail;
        const std::size_t n = psi.values[i].size();
        const kernels::Stencil st = op.stencil();
        const double alpha = 1.0 / d, beta = -c / d;
        std::vector<cplx> v0 = psi.values[i], v1(n), v2(n), acc(n, 0.0);
        kernels::axpy(a[0], v0.data(), acc.data(), n);
        if (K > 1) {
            kernels::apply(st, v0.data(), v1.data());
            for (std::size_t j = 0; j < n; ++j) v1[j] = alpha * v1[j] + beta * v0[j];
            kernels::axpy(a[1], v1.data(), acc.data(), n);
        }
        for (std::size_t k = 2; k < K; ++k) {
            kernels::cheb_step(st, alpha, beta, v1.data(), v0.data(), v2.data());
            kernels::axpy(a[k], v2.data(), acc.data(), n);
            std::swap(v0, v1);
            std::swap(v1, v2);
        }
        out.values[i] = std::move(acc);
    });
    if (report) {
        *report = {};
        for (const auto& r : reps) {
            report->terms = std::max(report->terms, r.terms);
            report->tail = std::max(report->tail, r.tail);
        }
    }
    return out;
}

}  // namespace ends
