#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "ends/errors.hpp"
#include "ends/propagator.hpp"

using namespace ends;

namespace {

struct Moments {
    double mean, var;
};

Moments moments(const RadialState& u)
{
    const RadialGrid& g = *u.grid;
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double w = std::norm(u.values[0][j]) * g.h;
        m0 += w, m1 += w * g.s[j], m2 += w * g.s[j] * g.s[j];
    }
    m1 /= m0;
    return {m1, m2 / m0 - m1 * m1};
}

double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a, sy += b, sxx += a * a, sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("free dispersion, reversibility and norm conservation")
{
    Problem p(model_free(), GridSpec{200.0, 0.1, 4, 0});
    Packet pk;
    pk.end = 1, pk.r_center = 20.0, pk.width = 3.0, pk.k = 0.5, pk.incoming = false;
    RadialState psi = gaussian_packet(p, pk);
    const Moments m0 = moments(psi);
    const double t = 20.0;
    for (Scheme sch : {Scheme::chebyshev, Scheme::crank_nicolson}) {
        EvolutionConfig cfg;
        cfg.scheme = sch, cfg.dt = 0.01;
        EvolutionReport rep;
        RadialState u = evolve(p, psi, t, cfg, &rep);
        const Moments m = moments(u);
        // sigma^2 + t^2 sigma_p^2 with sigma_p = 1 / (2 sigma); group velocity k
        CHECK(m.var == doctest::Approx(9.0 + t * t / 36.0).epsilon(1e-4));
        CHECK(m.mean == doctest::Approx(m0.mean + pk.k * t).epsilon(1e-6));
        CHECK(std::abs(rep.norm_final - rep.norm_initial) <= 1e-6 * t);
        CHECK((evolve(p, u, -t, cfg) - psi).norm() < 1e-10);
        CHECK((evolve(p, psi, 0.0, cfg) - psi).norm() == 0.0);
    }
}

TEST_CASE("Chebyshev and Crank-Nicolson agree on a curved model")
{
    Problem p(model_A(), GridSpec{100.0, 0.05, 4, 2});
    Packet pk;
    pk.end = 0, pk.r_center = 15.0, pk.width = 2.0, pk.k = 1.0;
    RadialState q = gaussian_packet(p, pk);
    EvolutionConfig cheb;
    EvolutionConfig cn;
    cn.scheme = Scheme::crank_nicolson, cn.dt = 0.002;
    // second-order CN error (dt^2 t) dominates
    CHECK((evolve(p, q, 10.0, cheb) - evolve(p, q, 10.0, cn)).norm() < 1e-5);
}

TEST_CASE("evolution config validation")
{
    Problem p(model_A(), GridSpec{100.0, 0.1, 4, 0});
    EvolutionConfig c;
    c.absorber = {60.0, 1.0};
    CHECK_THROWS_AS(validate(c, p), Error);
    c.absorber = {20.0, -1.0};
    CHECK_THROWS_AS(validate(c, p), Error);
    c.absorber = {20.0, 1.0};
    CHECK_NOTHROW(validate(c, p));
    c.dt = 0.0;
    CHECK_THROWS_AS(validate(c, p), Error);
    EvolutionConfig cn;
    cn.scheme = Scheme::crank_nicolson, cn.dt = 10.0, cn.cfl_limit = 1e-3;
    RadialState psi = RadialState::zeros(p.grid(), {0});
    CHECK_THROWS_AS(evolve(p, psi, 1.0, cn), Error);
}

TEST_CASE("energy filter matches a dense eigendecomposition")
{
    Problem p(model_A(), GridSpec{30.0, 0.1, 4, 0});
    auto g = p.grid();
    const std::size_t n = g->size();
    Eigen::MatrixXd H(n, n);
    std::vector<cplx> e(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        p.mode(0).apply(e.data(), y.data());
        for (std::size_t i = 0; i < n; ++i) H(i, j) = y[i].real();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    Packet pk;
    pk.end = 1, pk.r_center = 10.0, pk.width = 2.0, pk.k = 1.0;
    RadialState psi = gaussian_packet(p, pk);
    Eigen::VectorXcd v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = psi.values[0][j];
    const Eigen::MatrixXcd V = es.eigenvectors().cast<cplx>();
    for (double hi : {0.7, double(INFINITY)}) {
        Eigen::VectorXcd c = V.adjoint() * v;
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            const double l = es.eigenvalues()[i];
            c[i] *= 0.5 * (std::erf((l - 0.3) / 0.05) - (std::isinf(hi) ? -1.0 : std::erf((l - hi) / 0.05)));
        }
        const Eigen::VectorXcd ref = V * c;
        FilterReport fr;
        RadialState f = energy_filter(p, psi, 0.3, hi, 0.05, &fr);
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(f.values[0][j] - ref[j]));
        CHECK(d < 1e-11 * ref.norm());
        CHECK(fr.tail < 1e-14);
    }
}

TEST_CASE("Cook integrand decays integrably")
{
    Problem p(model_free(), GridSpec{500.0, 0.1, 4, 0});
    SpectralProfile h = SpectralProfile::bump(1, 0, 0.2, 0.6);
    std::vector<double> ts{20.0, 40.0, 80.0, 160.0, 320.0}, v;
    for (double t : ts) v.push_back(cook_integrand(p, h, t));
    const double k = slope(ts, v);
    MESSAGE("free Cook exponent " << k);
    CHECK(k <= -1.2);
    CHECK(cook_integrand(p, SpectralProfile::bump(1, 0, 0.2, 0.6, 0.0), 40.0) == 0.0);

    // Dollard tail: the dyadic terms t_k c(t_k) of the integral shrink geometrically
    Problem c(model_C(), GridSpec{500.0, 0.1, 4, 0});
    SpectralProfile hc = SpectralProfile::bump(1, 0, 0.5, 1.5);
    std::vector<double> terms;
    for (double t : {20.0, 40.0, 80.0, 160.0}) terms.push_back(t * cook_integrand(c, hc, t));
    for (std::size_t i = 1; i < terms.size(); ++i) CHECK(terms[i] < 0.8 * terms[i - 1]);
}

TEST_CASE("wave operator on the free line: isometry, adjoint identity, intertwining")
{
    Problem p(model_free(), GridSpec{500.0, 0.1, 4, 0});
    SpectralProfile h = SpectralProfile::bump(1, 0, 0.2, 0.6);
    WaveOpOptions o;
    o.comparison = Variant::exact;
    WaveOpReport w = wave_operator(p, h, {80.0, 160.0, 320.0}, 1, o);
    CHECK(w.cauchy.back() < w.cauchy.front());
    CHECK(w.estimate_norm == doctest::Approx(h.norm()).epsilon(1e-5));
    CHECK(w.estimate.modes == std::vector<int>{0});

    std::vector<RadialState> fam;
    for (double c0 : {12.0, 20.0, 30.0})
        for (double k : {0.8, 1.0}) {
            Packet pk;
            pk.end = 1, pk.r_center = c0, pk.width = 2.0, pk.k = k, pk.incoming = false;
            fam.push_back(gaussian_packet(p, pk));
        }
    AdjointReport a = adjoint_identity_check(p, h, w.estimate, fam, 1, 16);
    AdjointReport b = adjoint_identity_check(p, h, w.estimate, fam, 1, 32);
    CHECK(a.max_defect <= 1e-4);
    CHECK(std::abs(a.max_defect - b.max_defect) <= 1e-6);
    // h = 0 has zero defect
    SpectralProfile zero = SpectralProfile::bump(1, 0, 0.2, 0.6, 0.0);
    RadialState z = RadialState::zeros(p.grid(), {0});
    CHECK(adjoint_identity_check(p, zero, z, fam, 1).max_defect == 0.0);

    // e^{-isH} W h = W (e^{-is lambda} h)
    const double s = 40.0;
    SpectralProfile hs = h.multiplied([&](const SpectralChannel&, double l) { return std::polar(1.0, -s * l); });
    WaveOpReport ws = wave_operator(p, hs, {80.0, 160.0, 320.0}, 1, o);
    EvolutionConfig cfg;
    CHECK((evolve(p, w.estimate, s, cfg) - ws.estimate).norm() <= 5e-3 * h.norm());
}

TEST_CASE("end projections: free junction, resolution of identity, closed channel")
{
    EvolutionConfig cfg;
    cfg.absorber = {75.0, 1.0};
    Packet pk;
    pk.end = 0, pk.r_center = 30.0, pk.width = 3.0, pk.k = 1.0, pk.incoming = true;
    for (const char* name : {"free", "A"}) {
        Problem p(model_preset(name), GridSpec{300.0, 0.1, 4, 0});
        RadialState psi = gaussian_packet(p, pk);
        ProjectionReport a = end_projection(p, psi, 0, 1, {60.0, 80.0, 100.0}, cfg);
        ProjectionReport b = end_projection(p, psi, 1, 1, {60.0, 80.0, 100.0}, cfg);
        CHECK(a.stable);
        CHECK(b.stable);
        CHECK((a.state + b.state - psi).norm() <= 1e-2 * psi.norm());
        if (std::string(name) == "free") CHECK(b.masses.back() == doctest::Approx(psi.norm()).epsilon(1e-3));
    }
    Problem f(model_free(), GridSpec{100.0, 0.1, 4, 0});
    CHECK_THROWS_AS(transmission_experiment(f, 0, 0, gaussian_packet(f, pk)), Error);

    // below the hyperbolic threshold 1/8 nothing escapes into end 2
    Problem p(model_B(), GridSpec{600.0, 0.1, 4, 0});
    Packet low;
    low.end = 0, low.r_center = 20.0, low.width = 5.0, low.k = 0.4, low.incoming = true;
    RadialState psi = energy_filter(p, gaussian_packet(p, low), 0.0, 0.1, 0.004);
    EvolutionConfig wide;
    wide.absorber = {150.0, 1.0};
    ProjectionReport b = end_projection(p, psi, 1, 1, {100.0, 200.0, 400.0}, wide);
    CHECK(b.masses[2] < b.masses[1]);
    CHECK(b.masses[1] < b.masses[0]);
    CHECK(b.masses.back() < 5e-3 * psi.norm());
}
