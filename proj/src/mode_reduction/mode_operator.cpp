#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ends/errors.hpp"
#include "ends/mode_reduction.hpp"

namespace ends {

kernels::Stencil ModeOperator::stencil() const
{
    return kernels::Stencil{diag.data(), c1, c2, diag.size()};
}

void ModeOperator::apply(const cplx* x, cplx* y) const
{
    if (dirichlet_mask.empty()) {
        kernels::apply(stencil(), x, y);
        return;
    }
    std::vector<cplx> tmp(x, x + diag.size());
    for (std::size_t j = 0; j < tmp.size(); ++j)
        if (dirichlet_mask[j]) tmp[j] = 0.0;
    kernels::apply(stencil(), tmp.data(), y);
    for (std::size_t j = 0; j < tmp.size(); ++j)
        if (dirichlet_mask[j]) y[j] = 0.0;
}

double ModeOperator::spectrum_min() const
{
    double lo = diag[0];
    for (double d : diag) lo = std::min(lo, d);
    return lo - 2.0 * (std::abs(c1) + std::abs(c2));
}

double ModeOperator::spectrum_max() const
{
    double hi = diag[0];
    for (double d : diag) hi = std::max(hi, d);
    return hi + 2.0 * (std::abs(c1) + std::abs(c2));
}

double ModeOperator::W_min() const { return *std::min_element(W.begin(), W.end()); }

ModeOperator reduce(const ManifoldModel& model, int m, std::shared_ptr<const RadialGrid> grid,
                    int order, double lambda_max, const std::vector<std::uint8_t>* mask)
{
    if (order != 2 && order != 4) fail(ErrorKind::validation, "stencil order must be 2 or 4");
    ModeOperator op;
    op.m = m;
    op.order = order;
    op.grid = grid;
    const std::size_t n = grid->size();
    const double h2 = grid->h * grid->h;
    double kin;
    if (order == 2) {
        kin = 1.0 / h2;
        op.c1 = -0.5 / h2;
        op.c2 = 0.0;
    } else {
        kin = 1.25 / h2;
        op.c1 = -2.0 / (3.0 * h2);
        op.c2 = 1.0 / (24.0 * h2);
    }
    op.W.resize(n);
    op.diag.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        op.W[j] = model.W(m, grid->s[j]);
        op.diag[j] = kin + op.W[j];
    }
    if (mask) {
        if (mask->size() != n) fail(ErrorKind::validation, "dirichlet mask size mismatch");
        op.dirichlet_mask = *mask;
    }
    if (lambda_max > 0.0) {
        double kmax = std::sqrt(2.0 * std::max(0.0, lambda_max - op.W_min()));
        if (kmax > 0.0) {
            double ppw = 2.0 * std::numbers::pi / kmax / grid->h;
            if (ppw < 12.0) {
                std::ostringstream os;
                os << "grid resolves only " << ppw << " points per wavelength at lambda = "
                   << lambda_max << " (need 12)";
                fail(ErrorKind::validation, os.str());
            }
        }
    }
    return op;
}

Problem::Problem(ManifoldModel model, GridSpec spec)
    : model_(std::move(model)), spec_(spec), grid_(make_grid(model_, spec_))
{}

const ModeOperator& Problem::mode(int m) const
{
    std::lock_guard<std::mutex> lock(mu_);
    if (std::abs(m) > spec_.mmax)
        fail(ErrorKind::precondition, "mode " + std::to_string(m) + " exceeds mmax");
    auto it = ops_.find(m);
    if (it != ops_.end()) return *it->second;
    auto op = std::make_unique<ModeOperator>(reduce(model_, m, grid_, spec_.stencil_order));
    auto& ref = *op;
    ops_[m] = std::move(op);
    return ref;
}

}  // namespace ends
