#include "doctest.h"

#include <cmath>

#include "ends/errors.hpp"
#include "ends/fourier.hpp"
#include "support.hpp"

using namespace ends;

namespace {

// Transmission probability through a barrier V0 on an interval of length L at energy E
// for H = -(1/2) d^2 + V.
double barrier_transmission(double E, double V0, double L)
{
    if (E > V0) {
        const double kp = std::sqrt(2.0 * (E - V0));
        const double sn = std::sin(kp * L);
        return 1.0 / (1.0 + V0 * V0 * sn * sn / (4.0 * E * (E - V0)));
    }
    const double kappa = std::sqrt(2.0 * (V0 - E));
    const double sh = std::sinh(kappa * L);
    return 1.0 / (1.0 + V0 * V0 * sh * sh / (4.0 * E * (V0 - E)));
}

RadialState two_mode_source(const std::shared_ptr<const RadialGrid>& g)
{
    RadialState psi = RadialState::zeros(g, {0, 1});
    for (std::size_t j = 0; j < g->size(); ++j) {
        psi.values[0][j] = std::exp(-(g->s[j] - 1.0) * (g->s[j] - 1.0));
        psi.values[1][j] = cplx(0.5, 0.3) * std::exp(-(g->s[j] + 1.0) * (g->s[j] + 1.0));
    }
    return psi;
}

}  // namespace

TEST_CASE("Parseval identity on models A and B")
{
    for (const char* name : {"A", "B"}) {
        Problem p(model_preset(name), GridSpec{400.0, 0.05, 4, 1});
        RadialState psi = two_mode_source(p.grid());
        const double n2 = psi.norm() * psi.norm();
        for (double lam : {0.3, 0.7, 1.2}) {
            ResolventResult R = limiting_resolvent(p, lam, psi, 1);
            FtResult F = extract_ft(p, lam, R.phi, 1);
            CHECK(F.converged);
            const double lhs = F.xi.norm() * F.xi.norm();
            const double rhs = 2.0 * psi.inner(R.phi).imag();
            CHECK_MESSAGE(std::abs(lhs - rhs) <= 1e-4 * n2, name << " lambda=" << lam);
            // incoming transform has the same norm
            FtResult Fm = distorted_ft(p, lam, psi, -1);
            CHECK(Fm.xi.norm() == doctest::Approx(F.xi.norm()).epsilon(1e-4));
        }
    }
}

TEST_CASE("plain and averaged limits agree and the kernel reproduces the transform")
{
    for (const char* name : {"A", "D", "free"}) {
        Problem p(model_preset(name), GridSpec{400.0, 0.05, 4, 1});
        auto g = p.grid();
        RadialState psi = two_mode_source(g);
        FtOptions plain;
        plain.averaged = false;
        const double lam = 0.7;
        FtResult a = distorted_ft(p, lam, psi, 1);
        FtResult b = distorted_ft(p, lam, psi, 1, plain);
        for (int e = 0; e < 2; ++e)
            for (int m : {0, 1}) CHECK(std::abs(a.xi.at(e, m) - b.xi.at(e, m)) < 1e-6 * a.xi.norm());
        ChannelKernel k = channel_kernel(p, lam, 0, 1);
        for (int e = 0; e < 2; ++e) CHECK(std::abs(apply_kernel(k, e, *g, psi.values[0]) - a.xi.at(e, 0)) < 1e-10);
    }
}

TEST_CASE("generalized eigenfunction i F^* xi decomposes back into xi")
{
    Problem p(model_A(), GridSpec{400.0, 0.05, 4, 1});
    auto g = p.grid();
    const double lam = 0.5;
    BoundaryField xi = BoundaryField::zeros({0});
    xi.at(0, 0) = 0.7;
    xi.at(1, 0) = cplx(0.2, 0.4);
    RadialState phi = adjoint_ft(p, lam, xi, 1);
    phi *= cplx(0.0, 1.0);
    Decomposition dec = eigenfunction_decompose(p, phi, lam);
    CHECK(dec.converged);
    for (int e = 0; e < 2; ++e) CHECK(std::abs(dec.xi_plus.at(e, 0) - xi.at(e, 0)) < 1e-6);
    // incoming data is the image under the unitary S matrix
    CHECK(dec.xi_minus.norm() == doctest::Approx(xi.norm()).epsilon(1e-5));
    // annulus average of b |phi|^2 tends to 2 ||xi||^2 (b = 1 at lambda = 1/2)
    for (double R : {25.0, 50.0, 100.0}) {
        double acc = 0.0;
        for (std::size_t j = 0; j < g->size(); ++j)
            if (g->region[j] >= 0 && g->r[j] >= R && g->r[j] < 2.0 * R) acc += g->h * std::norm(phi.values[0][j]);
        const double dev = std::abs(acc / R - 2.0 * xi.norm() * xi.norm());
        CHECK(dev < 1e-2 * xi.norm() * xi.norm());
    }
}

TEST_CASE("WKB eigenfunction is a unit plane wave on a Euclidean end")
{
    Problem p(model_A(), GridSpec{400.0, 0.05, 4, 0});
    auto g = p.grid();
    const ManifoldModel& M = p.model();
    BoundaryField one = BoundaryField::zeros({0});
    one.at(1, 0) = 1.0;
    RadialState w = wkb_eigenfunction(p, 0.5, one, 1);
    // phase advances with r at k = 1; modulus (2 lambda)^{-1/4} = 1
    const std::size_t j0 = g->nearest(M.s_of(1, 50.0));
    for (double r : {100.0, 200.0, 350.0}) {
        const std::size_t j = g->nearest(M.s_of(1, r));
        CHECK(std::abs(w.values[0][j]) == doctest::Approx(1.0).epsilon(1e-4));
        const cplx rel = w.values[0][j] / w.values[0][j0];
        CHECK(std::abs(rel - std::polar(1.0, g->r[j] - g->r[j0])) < 1e-3);
    }
    // nothing on the other end
    CHECK(std::abs(w.values[0][g->nearest(M.s_of(0, 100.0))]) == 0.0);
}

TEST_CASE("free line scatters with full transmission")
{
    Problem p(model_free(), GridSpec{200.0, 0.05, 4, 0});
    for (int i = 0; i < 8; ++i) {
        const double lam = 0.3 + 0.1 * i;
        ScatteringData d = scattering_matrix(p, lam);
        const ModeScattering& s = d.mode(0);
        CHECK(std::abs(std::abs(s.entry(1, 0)) - 1.0) < 1e-6);
        CHECK(std::abs(s.entry(0, 0)) < 1e-6);
        CHECK(d.unitarity_defect < 1e-6);
        CHECK(transmission_metric(d, 1, 0) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("square-well barrier matches the closed-form transmission")
{
    Problem p(model_D(0.5, 1.0), GridSpec{200.0, 0.05, 4, 0});
    for (double lam : {0.3, 0.6, 0.9, 1.5}) {
        ScatteringData d = scattering_matrix(p, lam);
        const double T = barrier_transmission(lam, 0.5, 2.0);
        CHECK_MESSAGE(std::norm(d.mode(0).entry(1, 0)) == doctest::Approx(T).epsilon(1e-4), "lambda=" << lam);
        CHECK(std::norm(d.mode(0).entry(0, 1)) == doctest::Approx(T).epsilon(1e-4));
        CHECK(std::norm(d.mode(0).entry(0, 0)) == doctest::Approx(1.0 - T).epsilon(1e-4));
    }
    // high thin barrier: tunnelling keeps sigma_min small but positive
    Problem hi(model_D(3.0, 1.0), GridSpec{200.0, 0.05, 4, 0});
    ScatteringData d = scattering_matrix(hi, 0.5);
    const double sv = transmission_metric(d, 1, 0);
    CHECK(sv > 0.0);
    CHECK(sv < 0.05);
    CHECK(sv * sv == doctest::Approx(barrier_transmission(0.5, 3.0, 2.0)).epsilon(1e-3));
}

TEST_CASE("S matrix is unitary on curved ends")
{
    for (const char* name : {"A", "B"}) {
        Problem p(model_preset(name), GridSpec{400.0, 0.05, 4, 2});
        for (double lam : {0.4, 1.0}) {
            ScatteringData d = scattering_matrix(p, lam);
            CHECK_MESSAGE(d.unitarity_defect <= 1e-6, name << " lambda=" << lam);
        }
    }
    // below the critical energy 1/8 of model B
    Problem b(model_B(), GridSpec{200.0, 0.05, 4, 0});
    CHECK_THROWS_AS(scattering_matrix(b, 0.1), Error);
}
