#include "doctest.h"

#include <cmath>

#include "ends/errors.hpp"
#include "ends/geometry.hpp"

using namespace ends;

namespace {

// Two Euclidean ends with the curvature term kept in q1.
ManifoldModel euclidean_q1()
{
    return model_from_config(Config::parse("[ends.1]\nprofile = euclidean\ncurvature = q1\n"
                                           "[ends.2]\nprofile = euclidean\ncurvature = q1\n"));
}

}  // namespace

TEST_CASE("effective potential of the reference ends")
{
    // f = r: g = 1/r, g' = -1/r^2, q = (1/8)(g^2 + 2 g')
    ManifoldModel a = model_A();
    for (double r : {2.0, 5.0, 40.0}) {
        const double g = 1.0 / r, dg = -1.0 / (r * r);
        CHECK(effective_potential(a, r, 0) == doctest::Approx(0.125 * (g * g + 2.0 * dg)).epsilon(1e-13));
    }
    CHECK(effective_potential(a, 2.0, 0) == doctest::Approx(-1.0 / 32.0).epsilon(1e-14));
    ManifoldModel b = model_B();
    for (double r : {2.0, 10.0, 300.0}) CHECK(effective_potential(b, r, 1) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("critical energies")
{
    CHECK(critical_energy(model_A()).lambda0 == doctest::Approx(0.0));
    CriticalEnergy b = critical_energy(model_B());
    CHECK(b.lambda0 == doctest::Approx(0.125).epsilon(1e-8));
    CHECK(b.per_end[0] == doctest::Approx(0.0));
    CHECK(b.per_end[1] == doctest::Approx(0.125).epsilon(1e-8));
}

TEST_CASE("WKB phases")
{
    ManifoldModel b = model_B();
    // sqrt(2 (5/8 - 1/8)) = 1
    CHECK(phase_b(b, cplx(0.625, 0.0), 200.0, 1).b.real() == doctest::Approx(1.0).epsilon(1e-12));

    ManifoldModel e = euclidean_q1();
    const double r = 10.0, lam = 0.5;
    const double q1 = -1.0 / (8.0 * r * r), dq1 = 1.0 / (4.0 * r * r * r);
    const double bb = std::sqrt(2.0 * (lam - q1));
    const cplx corr = cplx(0.0, 1.0) * (1.0 / (16.0 * r * r * r)) / (0.5 + 1.0 / (8.0 * r * r));
    CHECK(dq1 / (4.0 * (lam - q1)) == doctest::Approx(corr.imag()).epsilon(1e-14));
    PhaseA a = phase_a(e, cplx(lam, 0.0), r, 0);
    CHECK(std::abs(a.plus - (bb - corr)) < 1e-12);
    CHECK(std::abs(a.minus - (bb + corr)) < 1e-12);
}

TEST_CASE("Riccati residual decays and the corrected phase is better")
{
    ManifoldModel e = euclidean_q1();
    const cplx z(0.5, 0.0);
    double r10 = riccati_residual(e, z, 10.0, 0, Branch::plus);
    double r100 = riccati_residual(e, z, 100.0, 0, Branch::plus);
    CHECK(r100 < r10);
    for (double r : {50.0, 100.0, 400.0})
        CHECK(riccati_residual(e, z, r, 0, Branch::plus, true) >= riccati_residual(e, z, r, 0, Branch::plus));
}

TEST_CASE("potential classes")
{
    auto a = classify_potential(model_A());
    CHECK(a[0] == PotentialClass::short_range);
    CHECK(a[1] == PotentialClass::short_range);
    auto c = classify_fit(model_C());
    CHECK(c[1].tag == PotentialClass::dollard);
    CHECK(c[1].exponent == doctest::Approx(0.8).epsilon(1e-6));
    auto b = classify_potential(model_B());
    CHECK(b[0] == PotentialClass::short_range);
    CHECK(b[1] == PotentialClass::short_range);
}

TEST_CASE("line parametrisation and core glue")
{
    ManifoldModel a = model_A();
    const double w = a.core_half_width;
    CHECK(a.locate(-w - 3.0).end == 0);
    CHECK(a.locate(-w - 3.0).r == doctest::Approx(0.5 * a.r0 + 3.0));
    CHECK(a.locate(w + 3.0).end == 1);
    CHECK(a.locate(0.0).end == -1);
    CHECK(a.s_of(1, 10.0) == doctest::Approx(10.0 - 0.5 * a.r0 + w));
    // derivatives of log F continuous across the junction (C^4 glue)
    for (double s : {-w, w}) {
        LineJet in = a.line(s * (1.0 - 1e-9)), out = a.line(s * (1.0 + 1e-9));
        CHECK(in.log_f == doctest::Approx(out.log_f).epsilon(1e-7));
        CHECK(in.g == doctest::Approx(out.g).epsilon(1e-6));
        CHECK(in.dg == doctest::Approx(out.dg).epsilon(1e-5));
    }
    // g = d log F / ds by central differences inside the core
    const double h = 1e-5;
    for (double s : {-0.6, 0.1, 0.7})
        CHECK(a.line(s).g == doctest::Approx((a.line(s + h).log_f - a.line(s - h).log_f) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("config validation")
{
    CHECK_THROWS_AS(model_from_config(Config::parse("[ends.1]\nprofile = sphere\n[ends.2]\n")), Error);
    CHECK_THROWS_AS(model_from_config(Config::parse("[bogus]\n")), Error);
    CHECK_THROWS_AS(model_preset("Z"), Error);
    ManifoldModel d = model_from_config(Config::parse("[model]\npreset = D\n"));
    CHECK(d.well.enabled);
}
