#include <algorithm>
#include <cmath>
#include <limits>

#include "ends/errors.hpp"
#include "ends/resolvent.hpp"

namespace ends {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
    cplx u, du;
};

inline State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> ks)
{
    State out = y;
    for (const auto& [c, k] : ks) {
        out.u += h * c * k->u;
        out.du += h * c * k->du;
    }
    return out;
}

class Integrator {
public:
    Integrator(const ManifoldModel& model, int m, double lambda)
        : model_(model), m_(m), lambda_(lambda)
    {}

    // Advances y from s0 to s1 (either direction) adaptively.
    void advance(State& y, double s0, double s1)
    {
        const double dir = s1 > s0 ? 1.0 : -1.0;
        double s = s0;
        while ((s1 - s) * dir > 0.0) {
            double step = std::min(hstep_, std::abs(s1 - s));
            bool last = step >= std::abs(s1 - s);
            double dt = dir * step;
            State y5;
            double err = trial(y, s, dt, y5);
            if (err <= 1.0) {
                y = y5;
                s = last ? s1 : s + dt;
                double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                if (!last) hstep_ = step * std::clamp(fac, 0.2, 5.0);
                else hstep_ = std::max(hstep_, step * std::clamp(fac, 0.2, 5.0));
            } else {
                hstep_ = step * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                if (hstep_ < 1e-12) fail(ErrorKind::convergence, "jost integration step underflow");
            }
        }
    }

    void set_step(double h) { hstep_ = h; }

private:
    // Stage evaluations stay strictly inside the step so that jumps of W at
    // breakpoints (step ends) are sampled from the correct side.
    State f(const State& y, double s0, double dt, double c) const
    {
        double cc = std::clamp(c, 1e-10, 1.0 - 1e-10);
        double w = model_.W(m_, s0 + cc * dt);
        return {y.du, 2.0 * (w - lambda_) * y.u};
    }

    double trial(const State& y, double s, double h, State& y5) const
    {
        State k1 = f(y, s, h, 0.0);
        State k2 = f(axpy(y, h, {{a21, &k1}}), s, h, c2);
        State k3 = f(axpy(y, h, {{a31, &k1}, {a32, &k2}}), s, h, c3);
        State k4 = f(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), s, h, c4);
        State k5 = f(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), s, h, c5);
        State k6 = f(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), s,
                     h, 1.0);
        y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        State k7 = f(y5, s, h, 1.0);
        State e = axpy(State{0.0, 0.0}, h,
                       {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
        double w = model_.W(m_, s + 0.5 * h);
        double kref = std::sqrt(2.0 * std::abs(lambda_ - w) + 1e-2);
        double mag = std::max({std::abs(y.u), std::abs(y5.u), std::abs(y.du) / kref,
                               std::abs(y5.du) / kref});
        double scale = rtol * mag + 1e-300;
        return std::max(std::abs(e.u), std::abs(e.du) / kref) / scale;
    }

    static constexpr double rtol = 1e-10;
    const ManifoldModel& model_;
    int m_;
    double lambda_;
    double hstep_ = 1e-3;
};

// Initial (u, du/ds) at r on the given end.
State boundary_data(const ManifoldModel& model, int m, int end, double r, double lambda, int sign,
                    bool& open)
{
    double w = model.W_end(m, end, r);
    double dw = model.dW_end_dr(m, end, r);
    double d = lambda - w;
    if (std::abs(d) < 1e-8)
        fail(ErrorKind::domain, "energy at the channel threshold at the truncation radius");
    State y;
    cplx dudr;
    if (d > 0.0) {
        open = true;
        double k = std::sqrt(2.0 * d);
        y.u = std::pow(2.0 * d, -0.25);
        dudr = (cplx(0.0, sign * k) + dw / (4.0 * d)) * y.u;
    } else {
        open = false;
        double kappa = std::sqrt(-2.0 * d);
        y.u = std::pow(-2.0 * d, -0.25);
        dudr = (-kappa + dw / (4.0 * d)) * y.u;
    }
    y.du = end == 1 ? dudr : -dudr;
    return y;
}

void renormalize(State& y, double& scale)
{
    double mag = std::max(std::abs(y.u), std::abs(y.du));
    if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
        y.u /= mag;
        y.du /= mag;
        scale += std::log(mag);
    }
}

// Integrates from the truncation radius of `end` across all nodes.
void sweep(const ManifoldModel& model, const RadialGrid& g, int m, double lambda, int sign, int end,
           double r_start, std::vector<cplx>& u, std::vector<cplx>& du, std::vector<double>& sc,
           bool& open)
{
    const std::size_t n = g.size();
    u.assign(n, 0.0);
    du.assign(n, 0.0);
    sc.assign(n, 0.0);
    State y = boundary_data(model, m, end, r_start, lambda, sign, open);
    double scale = 0.0;
    double s = model.s_of(end, r_start);
    std::vector<double> bps = model.breakpoints();
    std::sort(bps.begin(), bps.end());
    if (end == 1) std::reverse(bps.begin(), bps.end());
    Integrator integ(model, m, lambda);
    integ.set_step(std::min(g.h, 0.05));
    auto visit = [&](std::size_t j) {
        double target = g.s[j];
        for (double b : bps) {
            bool between = end == 1 ? (b < s && b > target) : (b > s && b < target);
            if (between) {
                integ.advance(y, s, b);
                s = b;
            }
        }
        integ.advance(y, s, target);
        s = target;
        renormalize(y, scale);
        u[j] = y.u;
        du[j] = y.du;
        sc[j] = scale;
    };
    if (end == 1)
        for (std::size_t j = n; j-- > 0;) visit(j);
    else
        for (std::size_t j = 0; j < n; ++j) visit(j);
}

}  // namespace

JostPair jost_pair(const ManifoldModel& model, std::shared_ptr<const RadialGrid> grid, int m,
                   double lambda, int sign, double r_start)
{
    if (sign != 1 && sign != -1) fail(ErrorKind::precondition, "sign must be +1 or -1");
    double r0 = r_start > 0.0 ? r_start : grid->rmax;
    for (int attempt = 0; attempt < 2; ++attempt) {
        JostPair jp;
        jp.m = m;
        jp.lambda = lambda;
        jp.sign = sign;
        jp.r_start = r0;
        jp.grid = grid;
        sweep(model, *grid, m, lambda, sign, 0, r0, jp.uL, jp.duL, jp.scL, jp.open[0]);
        sweep(model, *grid, m, lambda, sign, 1, r0, jp.uR, jp.duR, jp.scR, jp.open[1]);

        const std::size_t n = grid->size();
        std::size_t best = 0;
        double best_q = -1.0;
        std::vector<cplx> wv(n);
        std::vector<double> terms(n);
        for (std::size_t j = 0; j < n; ++j) {
            wv[j] = jp.uL[j] * jp.duR[j] - jp.duL[j] * jp.uR[j];
            terms[j] = std::abs(jp.uL[j] * jp.duR[j]) + std::abs(jp.duL[j] * jp.uR[j]);
            double q = std::abs(wv[j]) / (terms[j] + 1e-300);
            if (q > best_q) {
                best_q = q;
                best = j;
            }
        }
        jp.wr = wv[best];
        jp.wr_scale = jp.scL[best] + jp.scR[best];
        double drift = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double e = jp.scL[j] + jp.scR[j] - jp.wr_scale;
            cplx wj = wv[j] * std::exp(e);
            double denom = std::max(terms[j] * std::exp(e), std::abs(jp.wr));
            drift = std::max(drift, std::abs(wj - jp.wr) / denom);
        }
        jp.wr_drift = drift;
        if (best_q > 1e-10) return jp;
        r0 *= 1.1;
    }
    fail(ErrorKind::convergence,
         "wronskian degenerate at lambda = " + std::to_string(lambda) +
             " (resonance of the truncated problem)");
}

namespace {

// Cumulative integral of f_k = v_k exp(sc_k) from node 0, returned as A_j exp(-sc_j).
std::vector<cplx> scaled_cumulative(const std::vector<cplx>& v, const std::vector<double>& sc,
                                    double h)
{
    const std::size_t n = v.size();
    std::vector<cplx> out(n, 0.0);
    if (n < 2) return out;
    auto val = [&](std::size_t k, std::size_t ref) { return v[k] * std::exp(sc[k] - sc[ref]); };
    for (std::size_t j = 0; j + 1 < n; ++j) {
        cplx inc;
        if (n < 4) {
            inc = 0.5 * h * (val(j, j + 1) + val(j + 1, j + 1));
        } else if (j == 0) {
            inc = h / 24.0 *
                  (9.0 * val(0, 1) + 19.0 * val(1, 1) - 5.0 * val(2, 1) + val(3, 1));
        } else if (j + 2 == n) {
            inc = h / 24.0 *
                  (val(n - 4, j + 1) - 5.0 * val(n - 3, j + 1) + 19.0 * val(n - 2, j + 1) +
                   9.0 * val(n - 1, j + 1));
        } else {
            inc = h / 24.0 *
                  (-val(j - 1, j + 1) + 13.0 * val(j, j + 1) + 13.0 * val(j + 1, j + 1) -
                   val(j + 2, j + 1));
        }
        out[j + 1] = out[j] * std::exp(sc[j] - sc[j + 1]) + inc;
    }
    return out;
}

}  // namespace

std::vector<cplx> green_apply(const JostPair& jp, const std::vector<cplx>& psi,
                              std::vector<cplx>* dphi)
{
    const std::size_t n = jp.grid->size();
    if (psi.size() != n) fail(ErrorKind::precondition, "state size does not match the grid");
    const double h = jp.grid->h;
    std::vector<cplx> vl(n);
    for (std::size_t j = 0; j < n; ++j) vl[j] = jp.uL[j] * psi[j];
    std::vector<double> scr_rev(jp.scR.rbegin(), jp.scR.rend());
    std::vector<cplx> vr_rev(n);
    for (std::size_t j = 0; j < n; ++j) vr_rev[j] = jp.uR[n - 1 - j] * psi[n - 1 - j];
    std::vector<cplx> A = scaled_cumulative(vl, jp.scL, h);
    std::vector<cplx> Brev = scaled_cumulative(vr_rev, scr_rev, h);
    std::vector<cplx> phi(n);
    if (dphi) dphi->assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx B = Brev[n - 1 - j];
        const cplx pre = -2.0 * std::exp(jp.scL[j] + jp.scR[j] - jp.wr_scale) / jp.wr;
        phi[j] = pre * (jp.uR[j] * A[j] + jp.uL[j] * B);
        if (dphi) (*dphi)[j] = pre * (jp.duR[j] * A[j] + jp.duL[j] * B);
    }
    return phi;
}

}  // namespace ends
