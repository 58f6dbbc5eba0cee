#pragma once

#include <functional>
#include <vector>

#include "ends/mode_reduction.hpp"
#include "ends/spline.hpp"

namespace ends {

// h(lambda) on one end and mode, zero outside the open support (lo, hi).
struct SpectralChannel {
    int end = 0;
    int m = 0;
    double lo = 0.0;
    double hi = 0.0;
    std::function<cplx(double)> h;

    cplx operator()(double lambda) const;
};

// Element of L^2(I, (2 pi)^{-1} d lambda; G), one entry per (end, mode).
struct SpectralProfile {
    std::vector<SpectralChannel> channels;
    int smoothness = 2;  // C^k tag

    cplx value(int end, int m, double lambda) const;
    std::vector<int> modes() const;  // sorted, unique
    double lo() const;
    double hi() const;
    double norm() const;
    SpectralProfile conj() const;
    // h(lambda) -> mult(channel, lambda) h(lambda)
    SpectralProfile multiplied(const std::function<cplx(const SpectralChannel&, double)>& mult) const;

    // amp * exp(-1 / (1 - x^2)), x = (2 lambda - lo - hi) / (hi - lo)
    static SpectralProfile bump(int end, int m, double lo, double hi, cplx amp = 1.0);
    // C^2 cubic spline through samples; the first and last samples must be zero.
    static SpectralProfile samples(int end, int m, const std::vector<double>& lambda,
                                   const std::vector<cplx>& values);
};

// (2 pi)^{-1} int sum conj(a) b d lambda.
cplx profile_inner(const SpectralProfile& a, const SpectralProfile& b);

// Parameters (lambda1, r1) of the stationary-point construction on one end and mode;
// energies are measured after the channel shift of the mode.
struct StationarySetup {
    int end = 0;
    int m = 0;
    double lambda1 = 0.0;
    double r1 = 0.0;
    double shift = 0.0;
};

// lambda1 = lambda0_end + 0.9 (lo - lambda0_end); r1 = first end node >= r_{lambda1}
// (r_{lambda1} itself without a grid).
StationarySetup stationary_setup(const ManifoldModel& model, const RadialGrid* grid, int end, int m,
                                 double lo);

// d/d lambda Theta_1 = int_{r1}^r (2 (lambda - q1))^{-1/2} - t.
double dtheta1(const ManifoldModel& model, const StationarySetup& st, double lambda, double t,
               double r);
// Radius at which lambda_c(t, r) = lambda (inverse of r -> lambda_c at fixed t).
double stationary_radius(const ManifoldModel& model, const StationarySetup& st, double lambda,
                         double t);
bool in_omega_c(const ManifoldModel& model, const StationarySetup& st, double t, double r);

// lambda_c(t, r); domain error outside Omega_c.
double stationary_point(const ManifoldModel& model, const StationarySetup& st, double t, double r);

struct EikonalPoint {
    double lambda_c = 0.0;
    double dr_lambda = 0.0;  // d lambda_c / dr
    double dt_lambda = 0.0;  // d lambda_c / dt
    double K1 = 0.0;         // Theta_1 at lambda_c
    double K = 0.0;          // Theta at lambda_c
};
EikonalPoint eikonal(const ManifoldModel& model, const StationarySetup& st, double t, double r);
// Same with lambda_c already known.
EikonalPoint eikonal_at(const ManifoldModel& model, const StationarySetup& st, double t, double r,
                        double lambda_c);

struct EikonalChecks {
    double dt_defect = 0.0;  // |d_t K1 + lambda_c|
    double dr_defect = 0.0;  // |d_r K1 - b(lambda_c)|
    double hj_residual = 0.0;
};
// Central differences with steps dt = step * t, dr = step * (r - r1).
EikonalChecks eikonal_checks(const ManifoldModel& model, const StationarySetup& st, double t,
                             double r, double step = 1e-2);

struct StationaryField {
    StationarySetup setup;
    std::vector<double> times, radii;
    // index it * radii.size() + ir; NaN outside Omega_c
    std::vector<double> lambda_c, dr_lambda, dt_lambda, K1, K;
    std::vector<std::uint8_t> in_omega;
};
StationaryField stationary_field(const ManifoldModel& model, const StationarySetup& st,
                                 const std::vector<double>& times, const std::vector<double>& radii);

// Value of an explicit comparison state at one point: amp * exp(i phase).
struct PointValue {
    cplx amp = 0.0;
    double phase = 0.0;
};

enum class Variant { exact, leading, sr, dollard };
const char* to_string(Variant v);

// Pointwise U_0^+- (leading), U_sr^+- and U_do^+- in half-density variables.
PointValue leading_point(const ManifoldModel& model, const StationarySetup& st,
                         const SpectralChannel& ch, double t, double r, int sign);
PointValue shortrange_point(const ManifoldModel& model, const SpectralChannel& ch, double t, double r,
                            int sign);
PointValue dollard_point(const ManifoldModel& model, const SpectralChannel& ch, double t, double r,
                         int sign);

// Setups per channel of a profile.
std::vector<StationarySetup> stationary_setups(const ManifoldModel& model, const RadialGrid* grid,
                                               const SpectralProfile& h);

// States on the grid.
RadialState leading_term(const Problem& problem, const SpectralProfile& h, double t, int sign = 1);
RadialState shortrange_state(const Problem& problem, const SpectralProfile& h, double t,
                             int sign = 1);
RadialState dollard_state(const Problem& problem, const SpectralProfile& h, double t, int sign = 1);

struct QuadratureBudget {
    int points_per_oscillation = 20;
    long max_nodes = 400000;
};

// U^+-(t) h = (+-2 pi i)^{-1} int e^{-+ i t lambda} phi^+-_lambda[h(lambda)] d lambda
// by Gauss-Legendre panels with at least points_per_oscillation nodes per oscillation.
RadialState comparison_state(const Problem& problem, const SpectralProfile& h, double t, int sign = 1,
                             const QuadratureBudget& budget = {});

RadialState dynamics_state(const Problem& problem, const SpectralProfile& h, double t, Variant v,
                           int sign = 1);

// Continuum L^2 norms and distances of the explicit states by adaptive quadrature in r.
double leading_norm(const ManifoldModel& model, const SpectralProfile& h, double t, int sign = 1);
double explicit_norm(const ManifoldModel& model, const SpectralProfile& h, double t, Variant v,
                     int sign = 1);
double explicit_distance(const ManifoldModel& model, const SpectralProfile& a, Variant va,
                         const SpectralProfile& b, Variant vb, double t, int sign = 1);

enum class ModifierKind { sr, dollard };
// theta = int_{r0}^inf (b_kind - b-tilde) ds; convergence error when the tail diverges.
double phase_modifier(const ManifoldModel& model, double lambda, int end, int m, ModifierKind kind,
                      double abs_tol = 1e-10);

// e^{-+ i theta} h (the profile h-check with h = e^{i theta} h-check for sign +); theta is
// interpolated on 97 Chebyshev points of the support.
SpectralProfile modified_profile(const ManifoldModel& model, const SpectralProfile& h,
                                 ModifierKind kind, int sign = 1);

}  // namespace ends
