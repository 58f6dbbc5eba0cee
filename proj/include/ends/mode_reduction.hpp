#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "ends/config.hpp"
#include "ends/geometry.hpp"
#include "ends/kernels.hpp"

namespace ends {

struct GridSpec {
    double rmax = 400.0;
    double dr = 0.05;
    int stencil_order = 4;
    int mmax = 8;
};

GridSpec grid_from_config(const Config& cfg, GridSpec defaults = {});

// Uniform grid on the line s in (-S, S) with Dirichlet ends, S = s of r = rmax.
// Nodes are interior: s_j = -S + (j + 1) h.
struct RadialGrid {
    double h = 0.0;
    double S = 0.0;
    double rmax = 0.0;
    std::vector<double> s;
    std::vector<double> r;      // radial coordinate on the ends, 0 in the core
    std::vector<int> region;    // -1 core, 0 end 1, 1 end 2
    std::vector<double> weights;

    std::size_t size() const { return s.size(); }
    // nodes of one end with r in [ra, rb], ordered by increasing r
    std::vector<std::size_t> end_nodes(int end, double ra, double rb) const;
    // node index nearest to s (clamped)
    std::size_t nearest(double s_val) const;
};

std::shared_ptr<const RadialGrid> make_grid(const ManifoldModel& model, const GridSpec& spec);

// -(1/2) d^2/ds^2 + W_m on the grid, second or fourth order, Dirichlet ends.
struct ModeOperator {
    int m = 0;
    int order = 4;
    std::shared_ptr<const RadialGrid> grid;
    std::vector<double> W;
    std::vector<double> diag;  // kinetic diagonal + W
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<std::uint8_t> dirichlet_mask;  // empty or one flag per node

    kernels::Stencil stencil() const;
    void apply(const cplx* x, cplx* y) const;
    // Gershgorin bounds of the spectrum
    double spectrum_min() const;
    double spectrum_max() const;
    double W_min() const;
};

// Reduced operator for mode m. lambda_max > 0 enables the resolution check
// (>= 12 points per local wavelength at lambda_max).
ModeOperator reduce(const ManifoldModel& model, int m, std::shared_ptr<const RadialGrid> grid,
                    int order, double lambda_max = 0.0,
                    const std::vector<std::uint8_t>* dirichlet_mask = nullptr);

// Complex field per mode on the grid, in half-density variables u = F^{1/2} psi_m
// unless stated otherwise.
struct RadialState {
    std::shared_ptr<const RadialGrid> grid;
    std::vector<int> modes;
    std::vector<std::vector<cplx>> values;

    static RadialState zeros(std::shared_ptr<const RadialGrid> grid, std::vector<int> modes);
    int index_of(int m) const;  // -1 if absent
    std::vector<cplx>& mode(int m);
    const std::vector<cplx>& mode(int m) const;

    double norm() const;
    double norm2() const;
    // sum over common modes of the weighted sum conj(this) other
    cplx inner(const RadialState& other) const;
    RadialState& operator+=(const RadialState& other);
    RadialState& operator-=(const RadialState& other);
    RadialState& operator*=(cplx a);
};

RadialState operator-(RadialState a, const RadialState& b);
RadialState operator+(RadialState a, const RadialState& b);

enum class Direction { fwd, inv };

// fwd: multiply each mode by F(s)^{1/2}; inv: divide.
RadialState half_density_map(const ManifoldModel& model, const RadialState& psi, Direction dir);

// Surface samples psi(s_j, theta_k), theta_k = 2 pi k / ntheta.
struct SurfaceField {
    std::shared_ptr<const RadialGrid> grid;
    int ntheta = 0;
    std::vector<cplx> values;  // index j * ntheta + k
};

// Mode coefficients in the orthonormal basis e^{i m theta} / sqrt(2 pi), |m| <= mmax.
RadialState to_modes(const SurfaceField& field, int mmax);
SurfaceField to_surface(const RadialState& modes, int ntheta);

struct BesovNorms {
    double B = 0.0;
    double Bstar = 0.0;
    double B0_defect = 0.0;
    std::vector<double> annulus;  // ||F_nu psi||, nu = 0 .. outermost complete annulus
};

// Annuli F_0 = {r < 2} (core included), F_nu = {2^nu <= r < 2^(nu+1)}, both ends pooled.
BesovNorms besov_norms(const RadialState& state);
// Same norms for a per-node field (single component) on the grid.
BesovNorms besov_norms(const RadialGrid& grid, const std::vector<double>& abs2);

// Model + grid + lazily built mode operators.
class Problem {
public:
    Problem(ManifoldModel model, GridSpec spec);

    const ManifoldModel& model() const { return model_; }
    const GridSpec& spec() const { return spec_; }
    std::shared_ptr<const RadialGrid> grid() const { return grid_; }
    const ModeOperator& mode(int m) const;

private:
    ManifoldModel model_;
    GridSpec spec_;
    std::shared_ptr<const RadialGrid> grid_;
    mutable std::mutex mu_;
    mutable std::map<int, std::unique_ptr<ModeOperator>> ops_;
};

}  // namespace ends
