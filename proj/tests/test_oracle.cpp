#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ends/errors.hpp"
#include "ends/oracle.hpp"
#include "ends/propagator.hpp"
#include "ends/resolvent.hpp"

using namespace ends;

namespace {

std::vector<cplx> apply_h(const oracle::Hamiltonian2D& H2, const std::vector<cplx>& u)
{
    Eigen::Map<const Eigen::VectorXcd> x(u.data(), Eigen::Index(u.size()));
    Eigen::VectorXcd y = H2.H.cast<cplx>() * x;
    return {y.data(), y.data() + y.size()};
}

double weighted(const RadialGrid& g, const std::vector<cplx>& a, const std::vector<cplx>& b, double r_cut)
{
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (g.region[j] >= 0 && g.r[j] > r_cut) continue;
        // L^2 with weight <s>^{-1} on the function, inside the absorbing layer
        const double w = 1.0 / (1.0 + g.s[j] * g.s[j]);
        num += w * std::norm(a[j] - b[j]);
        den += w * std::norm(b[j]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("2D Hamiltonian on a flat cylinder separates with angular eigenvalues m^2/2")
{
    oracle::TinyGrid tg{4.0, 60, 16};
    oracle::Hamiltonian2D H2 = oracle::dense_hamiltonian_2d(model_free(), tg);
    const int nt = tg.ntheta;
    std::vector<cplx> flat(tg.ns * nt);
    for (int j = 0; j < tg.ns; ++j)
        for (int k = 0; k < nt; ++k) flat[j * nt + k] = std::exp(-H2.s[j] * H2.s[j]);
    const std::vector<cplx> hflat = apply_h(H2, flat);
    for (int m = 0; m <= nt / 2 - 1; ++m) {
        std::vector<cplx> u(flat.size());
        for (int j = 0; j < tg.ns; ++j)
            for (int k = 0; k < nt; ++k) u[j * nt + k] = flat[j * nt + k] * std::cos(2.0 * std::numbers::pi * m * k / nt);
        const std::vector<cplx> hu = apply_h(H2, u);
        double d = 0.0;
        for (int j = 0; j < tg.ns; ++j)
            for (int k = 0; k < nt; ++k) {
                const double c = std::cos(2.0 * std::numbers::pi * m * k / nt);
                d = std::max(d, std::abs(hu[j * nt + k] - c * hflat[j * nt + k] - 0.5 * m * m * u[j * nt + k]));
            }
        CHECK_MESSAGE(d < 1e-10, "m=" << m);
    }
}

TEST_CASE("2D Hamiltonian is exactly symmetric and size-capped")
{
    oracle::Hamiltonian2D H2 = oracle::dense_hamiltonian_2d(model_A(), oracle::TinyGrid{4.0, 80, 16});
    Eigen::SparseMatrix<double> T = H2.H.transpose();
    CHECK((H2.H - T).norm() == 0.0);
    CHECK_THROWS_AS(oracle::dense_hamiltonian_2d(model_A(), oracle::TinyGrid{4.0, oracle::max_ns + 1, 16}), Error);
    CHECK_THROWS_AS(oracle::dense_hamiltonian_2d(model_A(), oracle::TinyGrid{4.0, 80, oracle::max_ntheta + 2}), Error);
}

TEST_CASE("mode restriction of the 2D operator matches the reduced stencil to second order")
{
    auto defect = [](int ns) {
        const ManifoldModel M = model_A();
        oracle::TinyGrid tg{4.0, ns, 16};
        oracle::Hamiltonian2D H2 = oracle::dense_hamiltonian_2d(M, tg);
        Problem line(M, oracle::tiny_line_spec(M, tg, 2));
        auto g = line.grid();
        RadialState u = RadialState::zeros(g, {-2, -1, 0, 1, 2});
        for (std::size_t j = 0; j < g->size(); ++j) {
            const double s = g->s[j];
            u.values[2][j] = std::exp(-s * s);
            u.values[3][j] = s * std::exp(-s * s);
        }
        const RadialState hu = oracle::surface_to_modes(line, H2, apply_h(H2, oracle::modes_to_surface(H2, u)), 2);
        double d = 0.0;
        for (int m : {0, 1}) {
            const int i = m + 2;
            std::vector<cplx> ref(g->size());
            line.mode(m).apply(u.values[i].data(), ref.data());
            for (std::size_t j = 0; j < g->size(); ++j) d = std::max(d, std::abs(hu.values[i][j] - ref[j]));
        }
        return d;
    };
    const double d1 = defect(79), d2 = defect(159);
    CHECK(d2 < 1e-2);
    CHECK(std::log2(d1 / d2) > 1.7);
}

TEST_CASE("2D evolution agrees with the reduced evolution")
{
    for (const char* name : {"free", "A"}) {
        const ManifoldModel M = model_preset(name);
        oracle::TinyGrid tg{4.0, 120, 16};
        oracle::Hamiltonian2D H2 = oracle::dense_hamiltonian_2d(M, tg);
        Problem line(M, oracle::tiny_line_spec(M, tg, 3));
        const int nt = tg.ntheta;
        std::vector<cplx> u(tg.ns * nt);
        for (int j = 0; j < tg.ns; ++j)
            for (int k = 0; k < nt; ++k) {
                const double s = H2.s[j], th = 2.0 * std::numbers::pi * k / nt;
                u[j * nt + k] = std::exp(-2.0 * s * s) * std::polar(1.0, 1.5 * s) * (1.0 + 0.5 * std::cos(th) + 0.3 * std::sin(2.0 * th));
            }
        const double t = 2.0;
        const int nsteps = 200;
        RadialState m0 = oracle::surface_to_modes(line, H2, u, 3);
        EvolutionConfig cfg;
        cfg.scheme = Scheme::crank_nicolson, cfg.dt = t / nsteps, cfg.cfl_limit = INFINITY;
        RadialState a = evolve(line, m0, t, cfg);
        RadialState b = oracle::surface_to_modes(line, H2, oracle::evolve_2d(H2, u, t, nsteps), 3);
        // identical discretizations on flat ends; face averaging differs at O(h^2) on A
        CHECK_MESSAGE((a - b).norm() <= (std::string(name) == "free" ? 1e-10 : 1e-3) * b.norm(), name);
    }
}

TEST_CASE("small-eps resolvent converges to the limiting resolvent")
{
    Problem p(model_A(), GridSpec{400.0, 0.05, 4, 0});
    auto g = p.grid();
    std::vector<cplx> psi(g->size());
    for (std::size_t j = 0; j < g->size(); ++j) psi[j] = std::exp(-(g->s[j] - 3.0) * (g->s[j] - 3.0));
    RadialState ps = RadialState::zeros(g, {0});
    ps.values[0] = psi;
    const double lam = 0.5;
    ResolventResult R = limiting_resolvent(p, lam, ps, 1);
    oracle::SmallEpsOptions cap{100.0, 0.1};
    std::vector<std::vector<cplx>> phis;
    std::vector<double> errs;
    for (double e : {0.1, 0.05, 0.025}) {
        phis.push_back(oracle::small_eps_resolvent(p.mode(0), lam, e, psi, cap));
        cplx ip = 0.0;
        for (std::size_t j = 0; j < g->size(); ++j) ip += g->weights[j] * std::conj(psi[j]) * phis.back()[j];
        CHECK(ip.imag() > 0.0);
        errs.push_back(weighted(*g, phis.back(), R.phi.values[0], 300.0));
    }
    // Cauchy along the halving sequence
    CHECK(weighted(*g, phis[2], phis[1], 300.0) < weighted(*g, phis[1], phis[0], 300.0));
    const double rate = std::log2(errs[0] / errs[2]) / 2.0;
    MESSAGE("small-eps rate " << rate);
    CHECK(rate >= 0.5);
}

TEST_CASE("closed-form scattering")
{
    oracle::ClosedForm f = oracle::closed_form_scattering({}, 0.7);
    CHECK(std::abs(f.t - 1.0) < 1e-15);
    CHECK(std::abs(f.r) < 1e-15);
    for (double V0 : {-1.0, 0.5, 3.0})
        for (double lam : {0.2, 0.5, 1.7}) {
            oracle::ClosedForm c = oracle::square_well(V0, 1.0, lam);
            CHECK(std::norm(c.t) + std::norm(c.r) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::norm(c.t_right) + std::norm(c.r_right) == doctest::Approx(1.0).epsilon(1e-12));
            // splitting the well into two layers changes nothing
            oracle::ClosedForm two = oracle::closed_form_scattering({{-1.0, 0.2, V0}, {0.2, 1.0, V0}}, lam);
            CHECK(std::abs(two.t - c.t) < 1e-12);
            CHECK(std::abs(two.r - c.r) < 1e-12);
        }
    // V0 = -1, a = 1, lambda = 1/2: |t|^2 = 1 / (1 + V0^2 sin^2(2 k') / (4 E (E - V0))), k' = sqrt(3)
    const double T = 1.0 / (1.0 + std::pow(std::sin(2.0 * std::sqrt(3.0)), 2) / (4.0 * 0.5 * 1.5));
    CHECK(std::norm(oracle::square_well(-1.0, 1.0, 0.5).t) == doctest::Approx(T).epsilon(1e-13));
    CHECK(std::norm(oracle::square_well(-1.0, 1.0, 0.5).t) == doctest::Approx(0.96759976).epsilon(1e-8));
}
