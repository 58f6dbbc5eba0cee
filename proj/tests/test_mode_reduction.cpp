#include "doctest.h"

#include <cmath>
#include <random>

#include "ends/errors.hpp"
#include "ends/mode_reduction.hpp"
#include "support.hpp"

using namespace ends;

TEST_CASE("mode potentials of the reference ends")
{
    Problem a(model_A(), GridSpec{60.0, 0.1, 4, 1});
    const ModeOperator& op = a.mode(0);
    const RadialGrid& g = *a.grid();
    for (std::size_t j = 0; j < g.size(); j += 37)
        if (g.region[j] >= 0 && g.r[j] > 3.0) CHECK(op.W[j] == doctest::Approx(-1.0 / (8.0 * g.r[j] * g.r[j])).epsilon(1e-12));
    ManifoldModel b = model_B();
    for (double r : {2.0, 3.0, 8.0})
        CHECK(b.W_end(1, 1, r) == doctest::Approx(0.125 + 0.5 * std::exp(-2.0 * r)).epsilon(1e-12));
}

TEST_CASE("stencil order on a smooth function")
{
    // free flat line: H u = -(1/2) u''
    auto err = [](int order, double dr) {
        Problem p(model_free(), GridSpec{30.0, dr, order, 0});
        auto g = p.grid();
        RadialState u = test::gaussian(g, 0, 0.5, 0.3);
        std::vector<cplx> hu(g->size());
        p.mode(0).apply(u.values[0].data(), hu.data());
        double e = 0.0;
        for (std::size_t j = 0; j < g->size(); ++j) {
            const double x = g->s[j] - 0.5;
            const double d2 = (4.0 * 0.09 * x * x - 0.6) * std::exp(-0.3 * x * x);
            e = std::max(e, std::abs(hu[j] + 0.5 * d2));
        }
        return e;
    };
    CHECK(std::log2(err(2, 0.2) / err(2, 0.1)) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::log2(err(4, 0.2) / err(4, 0.1)) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("mode operator is symmetric and bounded by Gershgorin")
{
    Problem p(model_B(), GridSpec{40.0, 0.1, 4, 2});
    const ModeOperator& op = p.mode(2);
    auto g = p.grid();
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    std::vector<cplx> x(g->size()), y(g->size()), hx(g->size()), hy(g->size());
    for (std::size_t j = 0; j < g->size(); ++j) x[j] = cplx(d(rng), d(rng)), y[j] = cplx(d(rng), d(rng));
    op.apply(x.data(), hx.data());
    op.apply(y.data(), hy.data());
    cplx a = 0.0, b = 0.0, xhx = 0.0;
    double xx = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j) {
        a += std::conj(y[j]) * hx[j];
        b += std::conj(hy[j]) * x[j];
        xhx += std::conj(x[j]) * hx[j];
        xx += std::norm(x[j]);
    }
    CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
    const double rq = xhx.real() / xx;
    CHECK(rq >= op.spectrum_min());
    CHECK(rq <= op.spectrum_max());
    CHECK(op.spectrum_min() <= op.W_min());
}

TEST_CASE("resolution check rejects coarse grids")
{
    ManifoldModel a = model_A();
    auto g = make_grid(a, GridSpec{50.0, 0.5, 4, 0});
    CHECK_THROWS_AS(reduce(a, 0, g, 4, 10.0), Error);
    CHECK_NOTHROW(reduce(a, 0, g, 4, 0.1));
}

TEST_CASE("half-density map")
{
    Problem p(model_A(), GridSpec{50.0, 0.1, 2, 0});
    auto g = p.grid();
    RadialState one = test::sampled(g, 0, [](double) { return cplx(1.0); });
    RadialState u = half_density_map(p.model(), one, Direction::fwd);
    for (std::size_t j = 0; j < g->size(); j += 23)
        if (g->region[j] >= 0) CHECK(u.values[0][j].real() == doctest::Approx(std::sqrt(g->r[j])).epsilon(1e-12));
    // norm of the image = co-area norm sum |psi|^2 F ds
    RadialState psi = test::gaussian(g, 0, 4.0, 0.2);
    double co = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j)
        co += g->weights[j] * std::norm(psi.values[0][j]) * std::exp(p.model().line(g->s[j]).log_f);
    CHECK(half_density_map(p.model(), psi, Direction::fwd).norm() == doctest::Approx(std::sqrt(co)).epsilon(1e-12));
    RadialState back = half_density_map(p.model(), half_density_map(p.model(), psi, Direction::fwd), Direction::inv);
    CHECK((back - psi).norm() < 1e-13);
}

TEST_CASE("Besov norms of an annulus indicator")
{
    auto g = make_grid(model_A(), GridSpec{100.0, 0.01, 2, 0});
    std::vector<double> abs2(g->size(), 0.0);
    double mass = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j)
        if (g->region[j] == 1 && g->r[j] >= 2.0 && g->r[j] < 4.0) abs2[j] = 1.0, mass += g->weights[j];
    for (double& v : abs2) v /= mass;
    BesovNorms n = besov_norms(*g, abs2);
    CHECK(n.B == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(n.Bstar == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("r^-1 lies in B* and its B*_0 defect shrinks with the radius")
{
    auto norms = [](double rmax) {
        auto g = make_grid(model_A(), GridSpec{rmax, 0.05, 2, 0});
        std::vector<double> abs2(g->size(), 0.0);
        for (std::size_t j = 0; j < g->size(); ++j)
            if (g->region[j] >= 0 && g->r[j] >= 1.0) abs2[j] = 1.0 / (g->r[j] * g->r[j]);
        return besov_norms(*g, abs2);
    };
    BesovNorms a = norms(200.0), b = norms(1600.0);
    CHECK(b.Bstar == doctest::Approx(a.Bstar).epsilon(1e-3));
    CHECK(b.B0_defect < a.B0_defect);
}

TEST_CASE("surface samples and angular modes round trip")
{
    auto g = make_grid(model_A(), GridSpec{10.0, 0.1, 2, 3});
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d;
    RadialState m = RadialState::zeros(g, {-3, -2, -1, 0, 1, 2, 3});
    for (auto& v : m.values)
        for (auto& x : v) x = cplx(d(rng), d(rng));
    SurfaceField f = to_surface(m, 16);
    RadialState back = to_modes(f, 3);
    CHECK((back - m).norm() < 1e-12 * m.norm());
    // Parseval: surface norm with weight 2 pi / ntheta equals the mode norm
    double s2 = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j)
        for (int k = 0; k < 16; ++k) s2 += g->weights[j] * (2.0 * std::numbers::pi / 16) * std::norm(f.values[j * 16 + k]);
    CHECK(std::sqrt(s2) == doctest::Approx(m.norm()).epsilon(1e-12));
}
