#pragma once

#include <array>
#include <vector>

#include "ends/resolvent.hpp"

namespace ends {

// Boundary data xi[end][k] for the modes in `modes` (orthonormal basis on each circle).
struct BoundaryField {
    std::vector<int> modes;
    std::array<std::vector<cplx>, 2> xi;

    static BoundaryField zeros(std::vector<int> modes);
    int index_of(int m) const;
    cplx& at(int end, int m);
    cplx at(int end, int m) const;
    double norm() const;
};

struct FtOptions {
    double tol_F = 1e-4;
    bool tail_correction = true;  // WKB tail factor inside the averaged limit
    bool averaged = true;         // false: plain limit at the outermost node
    bool throw_on_fail = true;
};

struct FtResult {
    BoundaryField xi;
    std::vector<double> R;                // window starts of the averaged limit
    std::vector<BoundaryField> sequence;  // estimate per window
    double change = 0.0;                  // last change relative to the scale
    bool converged = true;
};

// WKB phase data of one end and mode at energy lambda: nodes of the end ordered by r,
// Phi_j = int_{r0}^{r_j} b-tilde, b_j, eta_j and q1_j (b at the shifted energy
// lambda - channel_shift).
struct EndPhase {
    int end = 0;
    int m = 0;
    double lambda = 0.0;
    double shift = 0.0;
    std::vector<std::size_t> nodes;
    std::vector<double> r, Phi, b, eta, q1;
};
EndPhase end_phase(const ManifoldModel& model, const RadialGrid& grid, int end, int m,
                   double lambda);

// int_r^inf (k_W - b) at the given sorted radii (k_W local wavenumber of W_m), for
// radii beyond r_from; zero below.
std::vector<double> wkb_tail(const ManifoldModel& model, int end, int m, double lambda,
                             const std::vector<double>& r, double r_from, double h);

// Averaged limit of xi(r) = sqrt(b) exp(-+ i Phi) u(r) on one end; u given per node
// of the end (same order as ph.nodes). Returns the estimates over the windows
// [R, 2R], R = rmax/8, rmax/4, rmax/2.
std::vector<cplx> boundary_limit(const ManifoldModel& model, const RadialGrid& grid,
                                 const EndPhase& ph, int m, int sign, const std::vector<cplx>& u,
                                 const FtOptions& opt, std::vector<double>* windows = nullptr);

// F^+-(lambda) psi.
FtResult distorted_ft(const Problem& problem, double lambda, const RadialState& psi, int sign,
                      const FtOptions& opt = {});
// Same extraction applied to a given phi = R(lambda +- i0) psi.
FtResult extract_ft(const Problem& problem, double lambda, const RadialState& phi, int sign,
                    const FtOptions& opt = {});

// Kernel of F^+-(lambda) on mode m for states supported inside r < rmax/8:
// (F psi)_e = sum_j h K_e(s_j) psi(s_j). Closed ends have an empty kernel.
struct ChannelKernel {
    int m = 0;
    double lambda = 0.0;
    int sign = 1;
    std::array<bool, 2> open{{false, false}};
    std::array<std::vector<cplx>, 2> K;
    double change = 0.0;  // convergence of the averaged limit
};
ChannelKernel channel_kernel(const Problem& problem, double lambda, int m, int sign,
                             const FtOptions& opt = {});
cplx apply_kernel(const ChannelKernel& k, int end, const RadialGrid& grid,
                  const std::vector<cplx>& psi);

// F^+-(lambda)^* xi.
RadialState adjoint_ft(const Problem& problem, double lambda, const BoundaryField& xi, int sign,
                       const FtOptions& opt = {});

struct ModeScattering {
    int m = 0;
    std::vector<int> open_ends;  // row/column labels of S
    std::vector<cplx> S;         // row-major n x n, n = open_ends.size()
    double unitarity_defect = 0.0;
    double condition = 0.0;
    cplx entry(int i, int j) const;  // zero if a channel is closed
};

struct ScatteringData {
    double lambda = 0.0;
    std::vector<ModeScattering> modes;
    double unitarity_defect = 0.0;  // max over modes of ||S*S - I||_2
    std::array<std::array<double, 2>, 2> offdiag_sv{};  // sigma_min(S_ij), -1 if undefined
    const ModeScattering& mode(int m) const;
};

struct SmatrixOptions {
    FtOptions ft;
    double condition_cap = 1e8;
    int mmax = -1;  // -1: problem mmax
};

ScatteringData scattering_matrix(const Problem& problem, double lambda,
                                 const SmatrixOptions& opt = {});

// sigma_min(S_ij) over the truncated mode space (S is diagonal in m).
double transmission_metric(const ScatteringData& data, int i, int j);

// phi^+-[xi] = eta (2(lambda - q1))^{-1/4} exp(+- i Phi) xi per end and mode (half-density).
RadialState wkb_eigenfunction(const Problem& problem, double lambda, const BoundaryField& xi,
                              int sign);

struct Decomposition {
    BoundaryField xi_plus, xi_minus;
    double change = 0.0;
    bool converged = true;
    std::vector<double> tail_defects;  // R^{-1/2}||F_nu(phi - phi+[xi+] + phi-[xi-])||, outer annuli
};
Decomposition eigenfunction_decompose(const Problem& problem, const RadialState& phi,
                                      double lambda, const FtOptions& opt = {});

}  // namespace ends
