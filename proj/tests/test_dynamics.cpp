#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ends/dynamics.hpp"
#include "ends/errors.hpp"

using namespace ends;

namespace {

// Composite Simpson with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

// int_{r0}^inf (b_kind - eta sqrt(2 (lambda - q1))) dr for q1 = r^-2, lambda0 = 0, by Simpson
// on [r0, R] and on u = 1/r over the tail where eta = 1.
double theta_oracle(const ManifoldModel& m, double lam, bool dollard)
{
    const double k = std::sqrt(2.0 * lam);
    auto bk = [&](double r) { return dollard ? k * (1.0 - 0.5 / (r * r * lam)) : k; };
    auto inner = [&](double r) { return bk(r) - eta_lambda(m, 1, r, lam) * std::sqrt(2.0 * (lam - 1.0 / (r * r))); };
    const double R = 50.0;
    auto tail = [&](double u) {
        if (u == 0.0) return dollard ? 0.0 : k / (2.0 * lam);
        const double r = 1.0 / u;
        return (bk(r) - std::sqrt(2.0 * (lam - u * u))) / (u * u);
    };
    return simpson(inner, m.r0, R, 400000) + simpson(tail, 0.0, 1.0 / R, 20000);
}

}  // namespace

TEST_CASE("stationary point and eikonal in closed form when q1 = 0")
{
    ManifoldModel a = model_A();
    StationarySetup st = stationary_setup(a, nullptr, 1, 0, 0.2);
    CHECK(st.lambda1 == doctest::Approx(0.18));
    for (double t : {10.0, 100.0})
        for (double r : {30.0, 80.0, 200.0}) {
            const double d = r - st.r1;
            if (d / std::sqrt(2.0 * st.lambda1) <= t) {
                CHECK_FALSE(in_omega_c(a, st, t, r));
                CHECK_THROWS_AS(stationary_point(a, st, t, r), Error);
                continue;
            }
            CHECK(stationary_point(a, st, t, r) == doctest::Approx(d * d / (2.0 * t * t)).epsilon(1e-10));
            EikonalPoint e = eikonal(a, st, t, r);
            CHECK(e.K1 == doctest::Approx(d * d / (2.0 * t)).epsilon(1e-10));
            CHECK(e.dr_lambda == doctest::Approx(d / (t * t)).epsilon(1e-8));
            CHECK(e.dt_lambda == doctest::Approx(-d * d / (t * t * t)).epsilon(1e-8));
        }
}

TEST_CASE("Dollard model: eikonal identities, Hamilton-Jacobi and the two-sided bound")
{
    ManifoldModel c = model_C();
    StationarySetup st = stationary_setup(c, nullptr, 1, 0, 0.2);
    const double lam0 = c.ends[1].lambda0_end;
    std::vector<double> times{10.0, 40.0, 100.0}, radii;
    for (double r = 30.0; r <= 400.0; r += 10.0) radii.push_back(r);
    StationaryField f = stationary_field(c, st, times, radii);
    int inside = 0;
    for (std::size_t it = 0; it < times.size(); ++it)
        for (std::size_t ir = 0; ir < radii.size(); ++ir) {
            const std::size_t k = it * radii.size() + ir;
            if (!f.in_omega[k]) continue;
            ++inside;
            const double d = radii[ir] - st.r1;
            const double ratio = (f.lambda_c[k] - lam0) * times[it] * times[it] / (d * d);
            CHECK(ratio <= 1.0);
            CHECK(ratio >= 0.25);
            CHECK(f.dr_lambda[k] > 0.0);
            // residual of the defining equation
            CHECK(std::abs(dtheta1(c, st, f.lambda_c[k], times[it], radii[ir])) <= 1e-10 * times[it]);
        }
    CHECK(inside > 20);
    for (double t : {10.0, 100.0})
        for (double r : {150.0, 400.0}) {
            EikonalChecks ch = eikonal_checks(c, st, t, r, 1e-3);
            EikonalPoint e = eikonal(c, st, t, r);
            CHECK(ch.hj_residual <= 1e-6);
            CHECK(ch.dt_defect <= 1e-6 * std::max(1.0, e.lambda_c));
            CHECK(ch.dr_defect <= 1e-8);
            // O(step^2): a ten times larger step is about a hundred times worse
            EikonalChecks coarse = eikonal_checks(c, st, t, r, 1e-2);
            CHECK(coarse.hj_residual > 30.0 * ch.hj_residual);
        }
}

TEST_CASE("leading term is an exact isometry")
{
    SpectralProfile ha = SpectralProfile::bump(1, 0, 0.2, 0.6);
    SpectralProfile hc = SpectralProfile::bump(1, 0, 0.5, 1.5, cplx(0.3, -0.8));
    for (double t : {10.0, 100.0, 640.0}) {
        CHECK(std::abs(leading_norm(model_A(), ha, t) - ha.norm()) <= 1e-8 * ha.norm());
        CHECK(std::abs(leading_norm(model_C(), hc, t) - hc.norm()) <= 1e-8 * hc.norm());
    }
    // profile norm against (2 pi)^{-1} int |h|^2 by Simpson
    auto h2 = [&](double l) { return std::norm(ha.value(1, 0, l)); };
    CHECK(ha.norm() == doctest::Approx(std::sqrt(simpson(h2, 0.2, 0.6, 20000) / (2.0 * std::numbers::pi))).epsilon(1e-10));
}

TEST_CASE("short-range and Dollard comparison states on a flat tail")
{
    ManifoldModel a = model_A();
    SpectralProfile h = SpectralProfile::bump(1, 0, 0.2, 0.6);
    const double t = 50.0;
    for (double r : {30.0, 40.0, 45.0, 50.0}) {
        PointValue sr = shortrange_point(a, h.channels[0], t, r, 1);
        const double lam = (r - a.r0) * (r - a.r0) / (2.0 * t * t);
        // half-density variables absorb the (f(r0)/f(r))^{1/2} factor
        const double mod = std::sqrt((r - a.r0) / (t * t) / (2.0 * std::numbers::pi)) * std::abs(h.value(1, 0, lam));
        CHECK(std::abs(sr.amp) == doctest::Approx(mod).epsilon(1e-12));
        // K_do = K_sr when q1 = lambda0
        PointValue dd = dollard_point(a, h.channels[0], t, r, 1);
        CHECK(std::abs(sr.amp - dd.amp) <= 1e-14);
        CHECK(std::abs(sr.phase - dd.phase) <= 1e-12 * std::max(1.0, std::abs(sr.phase)));
    }
    CHECK(explicit_norm(a, h, 200.0, Variant::sr) <= h.norm() * (1.0 + 1e-10));
}

TEST_CASE("time reversal of the oscillatory comparison dynamics")
{
    Problem p(model_A(), GridSpec{150.0, 0.1, 4, 0});
    SpectralProfile h = SpectralProfile::bump(1, 0, 0.2, 0.6, cplx(0.6, 0.8));
    RadialState plus = comparison_state(p, h, 20.0, 1);
    RadialState minus = comparison_state(p, h.conj(), 20.0, -1);
    double d = 0.0;
    for (std::size_t j = 0; j < plus.values[0].size(); ++j) d = std::max(d, std::abs(std::conj(plus.values[0][j]) - minus.values[0][j]));
    CHECK(d <= 1e-13 * plus.norm());
    CHECK(plus.norm() > 0.5 * h.norm());
    // h = 0 gives the zero state
    SpectralProfile zero = SpectralProfile::bump(1, 0, 0.2, 0.6, 0.0);
    CHECK(comparison_state(p, zero, 20.0, 1).norm() == 0.0);
}

TEST_CASE("phase modifiers against a brute-force quadrature")
{
    ManifoldModel c2 = model_C(2.0);
    const double sr = phase_modifier(c2, 0.5, 1, 0, ModifierKind::sr);
    const double dd = phase_modifier(c2, 0.5, 1, 0, ModifierKind::dollard);
    CHECK(std::abs(sr - theta_oracle(c2, 0.5, false)) <= 1e-8);
    CHECK(std::abs(dd - theta_oracle(c2, 0.5, true)) <= 1e-8);
    CHECK(std::abs(dd) <= std::abs(sr));
    MESSAGE("theta_sr = " << sr << ", theta_do = " << dd);
    // q1 = lambda0: only the cutoff region contributes, int (1 - eta) k
    ManifoldModel a = model_A();
    const double cut = simpson([&](double r) { return 1.0 - eta_lambda(a, 1, r, 0.5); }, a.r0, 2.0 * r_lambda(a, 1, 0.5), 200000);
    CHECK(phase_modifier(a, 0.5, 1, 0, ModifierKind::sr) == doctest::Approx(cut).epsilon(1e-9));
    CHECK(phase_modifier(a, 0.5, 1, 0, ModifierKind::dollard) == doctest::Approx(cut).epsilon(1e-9));
    // r^-0.8 tail: the short-range modifier diverges, the Dollard one converges
    try {
        phase_modifier(model_C(), 0.5, 1, 0, ModifierKind::sr);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::convergence);
    }
    CHECK(std::isfinite(phase_modifier(model_C(), 0.5, 1, 0, ModifierKind::dollard)));
}

TEST_CASE("modified profile carries the phase modifier")
{
    ManifoldModel c2 = model_C(2.0);
    SpectralProfile h = SpectralProfile::bump(1, 0, 0.2, 0.6);
    SpectralProfile m = modified_profile(c2, h, ModifierKind::sr, 1);
    CHECK(m.norm() == doctest::Approx(h.norm()).epsilon(1e-12));
    for (double l : {0.25, 0.4, 0.55}) {
        const double th = phase_modifier(c2, l, 1, 0, ModifierKind::sr);
        // theta is only Lipschitz in lambda through the cutoff radius
        CHECK(std::abs(m.value(1, 0, l) - std::polar(1.0, -th) * h.value(1, 0, l)) <= 1e-5 * std::abs(h.value(1, 0, l)));
    }
}
