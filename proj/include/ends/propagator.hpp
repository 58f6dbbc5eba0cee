#pragma once

#include <string>
#include <vector>

#include "ends/dynamics.hpp"
#include "ends/fourier.hpp"

namespace ends {

enum class Scheme { crank_nicolson, chebyshev };
const char* to_string(Scheme s);

// Multiplicative layer on r in [rmax - width, rmax] of both ends: over a time step tau the
// state is multiplied by exp(-strength tau x^2), x = (r - rmax + width) / width.
struct Absorber {
    double width = 0.0;  // 0: none
    double strength = 0.0;
};

struct EvolutionConfig {
    Scheme scheme = Scheme::chebyshev;
    double dt = 0.05;          // Crank-Nicolson step
    double max_rho = 400.0;    // Chebyshev: spectral half-width * segment length cap
    double cfl_limit = 2.0;    // Crank-Nicolson: bound on dt * max |W_m|
    Absorber absorber;
};

struct EvolutionReport {
    double norm_initial = 0.0;
    double norm_final = 0.0;
    long steps = 0;
    long matvecs = 0;
};

// e^{-itH} psi (t of either sign), mode by mode.
RadialState evolve(const Problem& problem, const RadialState& psi, double t,
                   const EvolutionConfig& cfg, EvolutionReport* report = nullptr);

void validate(const EvolutionConfig& cfg, const Problem& problem);

// g(H) psi with g = (erf((l - lo) / width) - erf((l - hi) / width)) / 2 (hi may be +inf),
// by a Chebyshev expansion of g on the Gershgorin interval of each mode operator.
struct FilterReport {
    int terms = 0;
    double tail = 0.0;  // largest discarded coefficient
};
RadialState energy_filter(const Problem& problem, const RadialState& psi, double lo, double hi,
                          double width, FilterReport* report = nullptr);

// ||(H - G(t)) U_0(t) h|| with G = Re(b A) -+ (1/2) b^2 +- q1, A = -i d/dr, b = b-tilde at
// lambda_c(t, r).
double cook_integrand(const Problem& problem, const SpectralProfile& h, double t, int sign = 1);

struct WaveOpOptions {
    double tol_W = 1e-3;  // relative to ||h||
    Variant comparison = Variant::leading;
    EvolutionConfig evolution;
    QuadratureBudget budget;
};

struct WaveOpReport {
    std::vector<double> times;
    std::vector<double> cauchy;  // ||omega(t_{k+1}) - omega(t_k)|| / ||h||, k = 0 .. n-2
    std::vector<double> comparison_norms;  // ||U(t_k) h|| on the grid
    double h_norm = 0.0;
    double estimate_norm = 0.0;
    bool converged = false;
    RadialState estimate;  // omega(t_last)
};

// omega(t) = e^{+-itH} U^+-(t) h; Cauchy differences use unitarity:
// ||omega(t') - omega(t)|| = ||e^{+-i(t'-t)H} U(t') h - U(t) h||.
WaveOpReport wave_operator(const Problem& problem, const SpectralProfile& h,
                           const std::vector<double>& t_grid, int sign,
                           const WaveOpOptions& opt = {});

struct AdjointReport {
    std::vector<cplx> lhs;  // <psi, W h>
    std::vector<cplx> rhs;  // (2 pi)^{-1} int <F(lambda) psi, h(lambda)> d lambda
    std::vector<double> defects;  // |lhs - rhs| / (||psi|| ||h||)
    double max_defect = 0.0;
    int lambda_nodes = 0;
};

// States of the family must vanish beyond rmax / 8 (boundary kernels are used).
AdjointReport adjoint_identity_check(const Problem& problem, const SpectralProfile& h,
                                     const RadialState& Wh, const std::vector<RadialState>& family,
                                     int sign, int panels_per_channel = 16,
                                     const FtOptions& ft = {});

// Normalized Gaussian exp(-(r - r_center)^2 / (4 width^2)) e^{-+ i k r} on one end and mode
// (- for incoming).
struct Packet {
    int end = 0;
    int m = 0;
    double r_center = 40.0;
    double width = 5.0;
    double k = 1.0;
    bool incoming = true;
};
RadialState gaussian_packet(const Problem& problem, const Packet& p);

struct ProjectionReport {
    int end = 0;
    int sign = 1;
    std::vector<double> times;
    std::vector<double> masses;  // ||1_{E_i} e^{-+itH} psi||
    double change = 0.0;         // relative change of the last two masses
    bool stable = false;
    RadialState state;           // e^{+-itH} 1_{E_i} e^{-+itH} psi at the last time
};

// E_i = {r > r0} on end i.
ProjectionReport end_projection(const Problem& problem, const RadialState& psi, int end, int sign,
                                const std::vector<double>& t_grid, const EvolutionConfig& cfg,
                                double stab_tol = 2e-2);

struct TransmissionOptions {
    double lambda_lo = 0.0;  // energy window of the prediction integrals
    double lambda_hi = 0.0;
    int panels = 8;          // 8-point Gauss-Legendre panels over the window
    std::vector<double> t_grid{120.0, 160.0, 200.0};
    EvolutionConfig evolution;
    FtOptions ft;
    double incoming_min = 0.9;  // required ||1_j F^- psi||^2 / ||psi||^2
    double stab_tol = 2e-2;
};

struct TransmissionReport {
    int from = 0;
    int to = 1;
    double psi_norm = 0.0;
    double incoming_fraction = 0.0;
    double dynamic = 0.0;          // ||P_i^+ psi|| at the last time
    ProjectionReport projection;
    double predicted = 0.0;        // ((2 pi)^{-1} int ||(S F^- psi)_i||^2)^{1/2}
    double predicted_direct = 0.0; // ((2 pi)^{-1} int ||(F^+ psi)_i||^2)^{1/2}
    double sigma_min = 0.0;        // min over the window of sigma_min(S_ij)
    double lower_bound = 0.0;      // sigma_min ||psi||
    double ratio = 0.0;            // dynamic / predicted
    std::string verdict;           // nonzero | indeterminate
};

TransmissionReport transmission_experiment(const Problem& problem, int from, int to,
                                           const RadialState& psi,
                                           const TransmissionOptions& opt = {});

}  // namespace ends
