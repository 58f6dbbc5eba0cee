#pragma once

#include <Eigen/SparseCore>

#include <memory>
#include <vector>

#include "ends/mode_reduction.hpp"

namespace ends::oracle {

// Tensor grid on (-S, S) x [0, 2 pi): ns interior nodes s_j = -S + (j + 1) h, h = 2S / (ns + 1),
// ntheta equispaced angles.
struct TinyGrid {
    double S = 4.0;
    int ns = 160;
    int ntheta = 48;
};

constexpr int max_ns = 200;
constexpr int max_ntheta = 64;

// -(1/2) Delta_g + V in half-density variables u = F^{1/2} psi: conservative second-order
// flux form in s, Fourier differentiation in theta, Dirichlet at s = +-S. Real symmetric;
// unknown (j, k) at index j * ntheta + k, inner product h (2 pi / ntheta) sum conj(u) v.
struct Hamiltonian2D {
    TinyGrid grid;
    double h = 0.0;
    std::vector<double> s, F;
    Eigen::SparseMatrix<double> H;
};

Hamiltonian2D dense_hamiltonian_2d(const ManifoldModel& model, const TinyGrid& grid);

// Grid spec whose line nodes coincide with the s nodes of the tiny grid (second-order stencil).
GridSpec tiny_line_spec(const ManifoldModel& model, const TinyGrid& grid, int mmax);

// Surface samples (u at (s_j, theta_k)) <-> mode coefficients on the tiny line grid.
RadialState surface_to_modes(const Problem& line, const Hamiltonian2D& H2, const std::vector<cplx>& u,
                             int mmax);
std::vector<cplx> modes_to_surface(const Hamiltonian2D& H2, const RadialState& modes);

// Crank-Nicolson e^{-itH} u with nsteps steps (sparse LU).
std::vector<cplx> evolve_2d(const Hamiltonian2D& H2, const std::vector<cplx>& u, double t,
                            int nsteps);

// (H - lambda - i eps - i C) phi = psi for one mode operator, C = strength x^2 on the outer
// layer r in [rmax - cap_width, rmax] of both ends (sparse LU).
struct SmallEpsOptions {
    double cap_width = 0.0;  // 0: none
    double cap_strength = 0.0;
};
std::vector<cplx> small_eps_resolvent(const ModeOperator& op, double lambda, double eps,
                                      const std::vector<cplx>& psi, const SmallEpsOptions& opt = {});

// Transfer-matrix scattering for -(1/2) d^2/dx^2 + V, V piecewise constant on [a_i, b_i]
// and zero elsewhere. t, r: incidence from the left; t_right, r_right: from the right.
struct Layer {
    double a = 0.0;
    double b = 0.0;
    double V = 0.0;
};
struct ClosedForm {
    cplx t = 1.0;
    cplx r = 0.0;
    cplx t_right = 1.0;
    cplx r_right = 0.0;
};
ClosedForm closed_form_scattering(const std::vector<Layer>& layers, double lambda);
ClosedForm square_well(double V0, double a, double lambda);  // V0 on |x| < a

}  // namespace ends::oracle
