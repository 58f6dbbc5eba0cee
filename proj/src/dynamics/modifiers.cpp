#include <cmath>
#include <memory>
#include <vector>

#include "ends/dynamics.hpp"
#include "ends/errors.hpp"
#include "ends/quad.hpp"

namespace ends {

double phase_modifier(const ManifoldModel& model, double lambda, int end, int m, ModifierKind kind,
                      double abs_tol)
{
    const EndProfile& e = model.ends.at(end);
    const double l = lambda - channel_shift(model, end, m);
    const double mu = l - e.lambda0_end;
    if (!(mu > 0.0)) fail(ErrorKind::precondition, "phase modifier needs lambda above the end threshold");
    const double k = std::sqrt(2.0 * mu);
    auto f = [&](double s) {
        const double q1 = e.q1(s).v;
        const double eta = eta_lambda(model, end, s, l);
        const double x = (q1 - e.lambda0_end) / mu;
        if (eta < 1.0) {
            double bk = kind == ModifierKind::sr ? k : k * (1.0 - 0.5 * x);
            double bt = eta > 0.0 ? eta * std::sqrt(2.0 * (l - q1)) : 0.0;
            return bk - bt;
        }
        // cancellation-free forms of b_kind - b with b = k sqrt(1 - x)
        double sq = std::sqrt(1.0 - x);
        if (kind == ModifierKind::sr) return k * x / (1.0 + sq);
        return 0.5 * k * x * x / ((1.0 + sq) * (1.0 + sq));
    };
    const double rl = r_lambda(model, end, l);
    const double mid = std::max(model.r0, 0.5 * rl);
    double v = quad::integrate(f, model.r0, mid, 1e-13) + quad::integrate(f, mid, rl, 1e-13);
    try {
        v += quad::integrate_tail(f, rl, rl, abs_tol);
    } catch (const Error&) {
        fail(ErrorKind::convergence, std::string("phase modifier diverges: q1 tail too slow for the ") +
                                         (kind == ModifierKind::sr ? "short-range" : "Dollard") +
                                         " modifier");
    }
    return v;
}

namespace {

// Barycentric interpolation on Chebyshev points of the second kind.
struct ChebInterp {
    std::vector<double> x, y, w;

    double operator()(double t) const
    {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = t - x[i];
            if (d == 0.0) return y[i];
            double c = w[i] / d;
            num += c * y[i];
            den += c;
        }
        return num / den;
    }
};

}  // namespace

SpectralProfile modified_profile(const ManifoldModel& model, const SpectralProfile& h,
                                 ModifierKind kind, int sign)
{
    SpectralProfile out;
    out.smoothness = h.smoothness;
    for (const auto& ch : h.channels) {
        auto ci = std::make_shared<ChebInterp>();
        const int n = 96;
        for (int i = 0; i <= n; ++i) {
            double x = 0.5 * (ch.lo + ch.hi) + 0.5 * (ch.hi - ch.lo) * std::cos(M_PI * i / n);
            ci->x.push_back(x);
            ci->y.push_back(phase_modifier(model, x, ch.end, ch.m, kind));
            ci->w.push_back((i == 0 || i == n ? 0.5 : 1.0) * (i % 2 ? -1.0 : 1.0));
        }
        SpectralChannel c2 = ch;
        auto base = ch.h;
        c2.h = [ci, base, sign](double l) {
            double th = (*ci)(l);
            return cplx(std::cos(th), -sign * std::sin(th)) * base(l);
        };
        out.channels.push_back(std::move(c2));
    }
    return out;
}

}  // namespace ends
