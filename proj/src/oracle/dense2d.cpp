#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>

#include "ends/errors.hpp"
#include "ends/oracle.hpp"

namespace ends::oracle {

namespace {

using SpC = Eigen::SparseMatrix<cplx>;

// Second derivative on ntheta (even) equispaced points by trigonometric interpolation.
std::vector<double> fourier_d2(int n)
{
    const double dth = 2.0 * std::numbers::pi / n;
    std::vector<double> d(n * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            int q = j - k;
            if (q == 0) {
                d[j * n + k] = -std::numbers::pi * std::numbers::pi / (3.0 * dth * dth) - 1.0 / 6.0;
            } else {
                double sn = std::sin(0.5 * q * dth);
                d[j * n + k] = -((q % 2 == 0) ? 1.0 : -1.0) * 0.5 / (sn * sn);
            }
        }
    return d;
}

}  // namespace

Hamiltonian2D dense_hamiltonian_2d(const ManifoldModel& model, const TinyGrid& grid)
{
    if (grid.ns < 8 || grid.ns > max_ns || grid.ntheta < 4 || grid.ntheta > max_ntheta)
        fail(ErrorKind::precondition, "oracle grid must be at most 200 x 64");
    if (grid.ntheta % 2) fail(ErrorKind::validation, "oracle ntheta must be even");
    if (!(grid.S > 0.0)) fail(ErrorKind::validation, "oracle half-length must be positive");
    Hamiltonian2D out;
    out.grid = grid;
    const int ns = grid.ns, nt = grid.ntheta;
    out.h = 2.0 * grid.S / double(ns + 1);
    const double h = out.h, h2 = h * h;
    out.s.resize(ns);
    out.F.resize(ns);
    std::vector<double> V(ns), Fm(ns + 1);
    for (int j = 0; j < ns; ++j) {
        out.s[j] = -grid.S + double(j + 1) * h;
        LineJet lj = model.line(out.s[j]);
        out.F[j] = std::exp(lj.log_f);
        V[j] = lj.V;
    }
    // face coefficients F_{j - 1/2} = (F_{j-1} F_j)^{1/2}, j = 0 .. ns (boundary nodes included)
    auto Fat = [&](int j) { return std::exp(model.line(-grid.S + double(j) * h).log_f); };
    for (int j = 0; j <= ns; ++j) Fm[j] = std::sqrt(Fat(j) * Fat(j + 1));
    const std::vector<double> D2 = fourier_d2(nt);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(ns) * nt * (nt + 2));
    for (int j = 0; j < ns; ++j) {
        const double diag_s = 0.5 * (Fm[j] + Fm[j + 1]) / (h2 * out.F[j]) + V[j];
        const double off = j + 1 < ns ? -0.5 * Fm[j + 1] / (h2 * std::sqrt(out.F[j] * out.F[j + 1])) : 0.0;
        const double ang = -0.5 / (out.F[j] * out.F[j]);
        for (int k = 0; k < nt; ++k) {
            const int row = j * nt + k;
            for (int k2 = 0; k2 < nt; ++k2) {
                double v = ang * D2[k * nt + k2];
                if (k2 == k) v += diag_s;
                trip.emplace_back(row, j * nt + k2, v);
            }
            if (j + 1 < ns) {
                trip.emplace_back(row, row + nt, off);
                trip.emplace_back(row + nt, row, off);
            }
        }
    }
    out.H.resize(ns * nt, ns * nt);
    out.H.setFromTriplets(trip.begin(), trip.end());
    out.H.makeCompressed();
    return out;
}

GridSpec tiny_line_spec(const ManifoldModel& model, const TinyGrid& grid, int mmax)
{
    GridSpec spec;
    spec.rmax = grid.S + 0.5 * model.r0 - model.core_half_width;
    spec.dr = 2.0 * grid.S / double(grid.ns + 1);
    spec.stencil_order = 2;
    spec.mmax = mmax;
    return spec;
}

RadialState surface_to_modes(const Problem& line, const Hamiltonian2D& H2, const std::vector<cplx>& u,
                             int mmax)
{
    const RadialGrid& g = *line.grid();
    if (int(g.size()) != H2.grid.ns || std::abs(g.S - H2.grid.S) > 1e-12)
        fail(ErrorKind::precondition, "line grid does not match the oracle grid");
    SurfaceField f;
    f.grid = line.grid();
    f.ntheta = H2.grid.ntheta;
    f.values = u;
    return to_modes(f, mmax);
}

std::vector<cplx> modes_to_surface(const Hamiltonian2D& H2, const RadialState& modes)
{
    return to_surface(modes, H2.grid.ntheta).values;
}

std::vector<cplx> evolve_2d(const Hamiltonian2D& H2, const std::vector<cplx>& u, double t, int nsteps)
{
    if (nsteps < 1) fail(ErrorKind::validation, "oracle evolution needs >= 1 step");
    const int n = int(H2.H.rows());
    if (int(u.size()) != n) fail(ErrorKind::precondition, "oracle state size mismatch");
    const double tau = t / nsteps;
    SpC Hc = H2.H.cast<cplx>();
    SpC I(n, n);
    I.setIdentity();
    SpC A = I + cplx(0.0, 0.5 * tau) * Hc;
    SpC B = I - cplx(0.0, 0.5 * tau) * Hc;
    Eigen::SparseLU<SpC> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) fail(ErrorKind::convergence, "oracle LU failed");
    Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(u.data(), n);
    for (int k = 0; k < nsteps; ++k) {
        Eigen::VectorXcd rhs = B * x;
        x = lu.solve(rhs);
    }
    return {x.data(), x.data() + n};
}

}  // namespace ends::oracle
