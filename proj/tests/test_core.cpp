#include "doctest.h"

#include <atomic>
#include <cmath>
#include <numbers>
#include <vector>

#include "ends/config.hpp"
#include "ends/errors.hpp"
#include "ends/parallel.hpp"
#include "ends/quad.hpp"
#include "ends/spline.hpp"

using namespace ends;
using cplx = std::complex<double>;

TEST_CASE("config sections, comments and typed values")
{
    Config c = Config::parse("top = 1\n[grid]\nrmax = 250 # radius\n; note\ndr=0.1\n[model]\npreset = B\n");
    CHECK(c.get_int("", "top", 0) == 1);
    CHECK(c.get_double("grid", "rmax", 0.0) == 250.0);
    CHECK(c.get_double("grid", "dr", 0.0) == 0.1);
    CHECK(c.get("model", "preset", "") == "B");
    CHECK(c.get("model", "absent", "x") == "x");
    CHECK(c.has_section("grid"));
    CHECK_FALSE(c.has_section("run"));
}

TEST_CASE("config errors carry line and column")
{
    try {
        Config::parse("[grid]\nrmax = 1\n  broken\n", "f.cfg");
        FAIL("expected a validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
        CHECK(std::string(e.what()).find("f.cfg:3:") != std::string::npos);
    }
    Config c = Config::parse("[grid]\nrmax = abc\n", "g.cfg");
    try {
        c.get_double("grid", "rmax", 0.0);
        FAIL("expected a validation error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("g.cfg:2:") != std::string::npos);
    }
    Config k = Config::parse("[grid]\nrmx = 1\n");
    CHECK_THROWS_AS(k.check_keys("grid", {"rmax"}), Error);
}

TEST_CASE("adaptive quadrature against closed forms")
{
    CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(quad::integrate([](double x) { return std::exp(-x); }, 0.0, INFINITY) == doctest::Approx(1.0).epsilon(1e-10));
    cplx z = quad::integrate_complex([](double x) { return std::exp(cplx(0.0, x)); }, 0.0, std::numbers::pi / 2);
    CHECK(std::abs(z - cplx(1.0, 1.0)) < 1e-12);
    // sum of 2^-k segments of x^-2 tail: int_1^inf x^-2 = 1
    CHECK(quad::integrate_tail([](double x) { return 1.0 / (x * x); }, 1.0, 1.0, 1e-10) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Gauss-Legendre panels integrate degree-15 polynomials exactly")
{
    auto nodes = quad::gauss_legendre_panels(-1.0, 2.0, 3);
    CHECK(nodes.size() == 24);
    double s = 0.0;
    for (const auto& n : nodes) s += n.w * std::pow(n.x, 15);
    CHECK(s == doctest::Approx((std::pow(2.0, 16) - 1.0) / 16.0).epsilon(1e-13));
}

TEST_CASE("fourth-order cumulative integral")
{
    auto err = [](int n) {
        const double h = 1.0 / (n - 1);
        std::vector<double> f(n), out(n);
        for (int j = 0; j < n; ++j) f[j] = std::cos(3.0 * j * h);
        quad::cumulative(f.data(), n, h, out.data());
        double e = 0.0;
        for (int j = 0; j < n; ++j) e = std::max(e, std::abs(out[j] - std::sin(3.0 * j * h) / 3.0));
        return e;
    };
    const double e1 = err(41), e2 = err(81);
    CHECK(e1 < 1e-6);
    CHECK(std::log2(e1 / e2) > 3.5);
}

TEST_CASE("cubic spline interpolates and converges")
{
    std::vector<double> x, y;
    for (int i = 0; i <= 40; ++i) {
        x.push_back(i * 0.1);
        y.push_back(std::sin(x.back()));
    }
    CubicSpline sp(x, y);
    CHECK(sp(0.5) == doctest::Approx(std::sin(0.5)).epsilon(1e-14));
    CHECK(std::abs(sp(2.05) - std::sin(2.05)) < 1e-5);
    CHECK(std::abs(sp.deriv(2.05) - std::cos(2.05)) < 1e-3);
}

TEST_CASE("parallel_for writes by index and rethrows the lowest failing index")
{
    std::vector<int> out(1000, 0);
    parallel_for(out.size(), [&](std::size_t i) { out[i] = int(i) * 2; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == int(i) * 2);
    try {
        parallel_for(100, [](std::size_t i) {
            if (i == 17 || i == 60) fail(ErrorKind::domain, "cell " + std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("cell 17") != std::string::npos);
    }
    std::atomic<int> count{0};
    parallel_for(8, [&](std::size_t) { parallel_for(8, [&](std::size_t) { ++count; }); });
    CHECK(count == 64);
}
