#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "ends/errors.hpp"
#include "ends/resolvent.hpp"
#include "support.hpp"

using namespace ends;

TEST_CASE("free line resolvent equals the closed-form Green function")
{
    Problem p(model_free(), GridSpec{100.0, 0.05, 4, 0});
    auto g = p.grid();
    RadialState psi = test::gaussian(g, 0, 0.0, 2.0);
    const double lam = 0.5, k = std::sqrt(2.0 * lam);
    ResolventResult R = limiting_resolvent(p, lam, psi, 1);
    CHECK(R.residual < 1e-3);
    CHECK(R.wronskian_drift < 1e-8);
    // (H - k^2/2)^{-1} with H = -(1/2) d^2: G(s, s') = (i / k) e^{ik|s - s'|}; composite Simpson
    // on [-8, s] and [s, 8] so the kink sits on a panel edge
    auto simpson = [&](double a, double b, double s) {
        const int n = 4000;
        const double hh = (b - a) / n;
        cplx acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = a + i * hh;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * std::exp(cplx(0.0, k * std::abs(s - x))) * std::exp(-2.0 * x * x);
        }
        return acc * hh / 3.0;
    };
    double err = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < g->size(); j += 41) {
        const double s = g->s[j];
        cplx acc = cplx(0.0, 1.0 / k) * (simpson(-8.0, std::clamp(s, -8.0, 8.0), s) + simpson(std::clamp(s, -8.0, 8.0), 8.0, s));
        err = std::max(err, std::abs(acc - R.phi.values[0][j]));
        scale = std::max(scale, std::abs(acc));
    }
    CHECK(err < 1e-6 * scale);  // fourth-order cumulative kernel sums at dr = 0.05
}

TEST_CASE("Im <psi, R(lambda + i0) psi> is non-negative for random real sources")
{
    Problem p(model_A(), GridSpec{200.0, 0.05, 4, 0});
    auto g = p.grid();
    std::mt19937_64 rng(17);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 5; ++trial) {
        double c[4];
        for (double& x : c) x = d(rng);
        RadialState psi = test::sampled(g, 0, [&](double s) {
            return cplx(c[0] * std::exp(-s * s) + c[1] * std::exp(-(s - 3) * (s - 3)) + c[2] * std::exp(-(s + 4) * (s + 4)) +
                        c[3] * s * std::exp(-0.5 * s * s));
        });
        for (double lam : {0.2, 0.9}) {
            ResolventResult R = limiting_resolvent(p, lam, psi, 1);
            CHECK(psi.inner(R.phi).imag() >= 0.0);
            // incoming resolvent is the complex conjugate for real psi
            ResolventResult Rm = limiting_resolvent(p, lam, psi, -1);
            CHECK(std::abs(psi.inner(Rm.phi) - std::conj(psi.inner(R.phi))) < 1e-8 * std::abs(psi.inner(R.phi)));
        }
    }
}

TEST_CASE("Sommerfeld conditions separate outgoing from incoming solutions")
{
    Problem p(model_A(), GridSpec{400.0, 0.05, 4, 0});
    auto g = p.grid();
    RadialState psi = test::gaussian(g, 0, 1.0, 2.0);
    const double lam = 0.5;
    ResolventResult R = limiting_resolvent(p, lam, psi, 1);
    SommerfeldReport ok = sommerfeld_check(p, R.phi, psi, lam, 1);
    CHECK(ok.equation_ok);
    CHECK(ok.radiation_ok);
    CHECK(ok.pass);
    ResolventResult Rm = limiting_resolvent(p, lam, psi, -1);
    SommerfeldReport bad = sommerfeld_check(p, Rm.phi, psi, lam, 1);
    CHECK(bad.equation_ok);
    CHECK_FALSE(bad.radiation_ok);
    // sign mismatch doubles the phase: the tail defect is O(1)
    CHECK(bad.tail_defects.back() > 0.1);
    CHECK(bad.tail_defects.back() > 100.0 * ok.tail_defects.back());
    const double good_res = radiation_residual(p.model(), R.phi, lam, 1, 0.0);
    // weighted residual is bounded and grows with the weight exponent
    const double b4 = radiation_residual(p.model(), R.phi, lam, 1, 0.4);
    CHECK(std::isfinite(good_res));
    CHECK(std::isfinite(b4));
    CHECK(b4 > good_res);
}

TEST_CASE("closed channels and multi-mode sources")
{
    Problem p(model_D(), GridSpec{100.0, 0.05, 4, 2});
    auto g = p.grid();
    RadialState psi = RadialState::zeros(g, {2, 0});
    for (std::size_t j = 0; j < g->size(); ++j) {
        psi.values[0][j] = std::exp(-2.0 * g->s[j] * g->s[j]);
        psi.values[1][j] = std::exp(-(g->s[j] - 3.0) * (g->s[j] - 3.0));
    }
    ResolventResult R = limiting_resolvent(p, 0.5, psi, 1);
    CHECK(R.residual < 1e-3);
    CHECK(interior_residual(p, 0.5, R.phi, psi) == doctest::Approx(R.residual));
    // mode 2 (threshold 2 > 0.5) decays into both ends
    const auto& u2 = R.phi.mode(2);
    CHECK(std::abs(u2[g->nearest(30.0)]) < 1e-12 * std::abs(u2[g->nearest(0.0)]));
}

TEST_CASE("energies at or below the threshold are rejected")
{
    Problem p(model_B(), GridSpec{100.0, 0.05, 4, 0});
    RadialState psi = test::gaussian(p.grid(), 0, 0.0, 1.0);
    CHECK_THROWS_AS(limiting_resolvent(p, 0.1, psi, 1), Error);
}
