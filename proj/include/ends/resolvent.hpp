#pragma once

#include <array>
#include <memory>
#include <vector>

#include "ends/mode_reduction.hpp"

namespace ends {

// Boundary solutions of (-1/2 d^2/ds^2 + W_m - lambda) u = 0 on the grid nodes.
// uL is outgoing (sign +1) or incoming (sign -1) on end 1, uR on end 2; a closed
// channel uses the decaying solution. Values are stored scaled: the true value at
// node j is uL[j] * exp(scL[j]) (same for duL, uR, duR). Derivatives are in s.
struct JostPair {
    int m = 0;
    double lambda = 0.0;
    int sign = 1;
    double r_start = 0.0;
    std::shared_ptr<const RadialGrid> grid;
    std::array<bool, 2> open{{true, true}};
    std::vector<cplx> uL, duL, uR, duR;
    std::vector<double> scL, scR;
    cplx wr = 0.0;          // Wronskian uL uR' - uL' uR, scaled by exp(-wr_scale)
    double wr_scale = 0.0;
    double wr_drift = 0.0;  // max relative variation of the Wronskian over the nodes
};

// Integrates both boundary solutions inward from r_start (default: grid rmax) with an
// adaptive Dormand-Prince 5(4) scheme (rtol 1e-10), steps ending on every node and
// potential breakpoint. Retries once with r_start * 1.1 if the Wronskian degenerates.
JostPair jost_pair(const ManifoldModel& model, std::shared_ptr<const RadialGrid> grid, int m,
                   double lambda, int sign, double r_start = 0.0);

// phi = R(lambda +- i0) psi for one mode through the Green kernel
// G(s, s') = -2 uL(s<) uR(s>) / Wr; optional s-derivative of phi.
std::vector<cplx> green_apply(const JostPair& jp, const std::vector<cplx>& psi,
                              std::vector<cplx>* dphi = nullptr);

struct ResolventOptions {
    double tol_res = 1e-3;  // relative residual bound on interior nodes
    double margin = 1e-3;   // lambda must exceed lambda0 + margin
};

struct ResolventResult {
    RadialState phi;
    RadialState dphi;  // s-derivative
    double residual = 0.0;  // ||(H - lambda) phi - psi|| / ||psi|| on interior nodes
    double wronskian_drift = 0.0;
};

ResolventResult limiting_resolvent(const Problem& problem, double lambda, const RadialState& psi,
                                   int sign, const ResolventOptions& opt = {});

// ||(H_m - lambda) phi - psi|| / max(||psi||, tiny) over nodes away from the grid ends
// and potential breakpoints; absolute when psi = 0.
double interior_residual(const Problem& problem, double lambda, const RadialState& phi,
                         const RadialState& psi);

// -i d/dr u on every node (d/dr = -d/ds on end 1, d/ds elsewhere), fourth-order
// central differences.
std::vector<cplx> radial_derivative(const RadialGrid& grid, const std::vector<cplx>& u);

// ||r^beta (A -+ a) phi||_{B*} with A = -i d/dr in half-density variables.
double radiation_residual(const ManifoldModel& model, const RadialState& phi, double lambda,
                          int sign, double beta);

struct SommerfeldReport {
    double residual = 0.0;              // equation clause
    std::vector<double> tail_defects;   // R_nu^{-1/2} ||F_nu (A -+ a) phi||, outermost annuli
    double phi_bstar = 0.0;
    bool equation_ok = false;
    bool radiation_ok = false;
    bool pass = false;
};

SommerfeldReport sommerfeld_check(const Problem& problem, const RadialState& phi,
                                  const RadialState& psi, double lambda, int sign,
                                  double tol_res = 1e-3);

}  // namespace ends
