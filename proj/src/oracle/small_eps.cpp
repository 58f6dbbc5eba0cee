#include <Eigen/SparseLU>

#include "ends/errors.hpp"
#include "ends/oracle.hpp"

namespace ends::oracle {

std::vector<cplx> small_eps_resolvent(const ModeOperator& op, double lambda, double eps,
                                      const std::vector<cplx>& psi, const SmallEpsOptions& opt)
{
    if (!(eps >= 1e-4 && eps <= 1e-1)) fail(ErrorKind::precondition, "eps must lie in [1e-4, 1e-1]");
    const RadialGrid& g = *op.grid;
    const int n = int(g.size());
    if (int(psi.size()) != n) fail(ErrorKind::precondition, "state size mismatch");
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(std::size_t(n) * 5);
    const double start = g.rmax - opt.cap_width;
    for (int j = 0; j < n; ++j) {
        cplx d = op.diag[j] - cplx(lambda, eps);
        if (opt.cap_width > 0.0 && g.region[j] >= 0 && g.r[j] > start) {
            double x = (g.r[j] - start) / opt.cap_width;
            d -= cplx(0.0, opt.cap_strength * x * x);
        }
        trip.emplace_back(j, j, d);
        for (int k = 1; k <= 2; ++k) {
            double c = k == 1 ? op.c1 : op.c2;
            if (c == 0.0 || j + k >= n) continue;
            trip.emplace_back(j, j + k, c);
            trip.emplace_back(j + k, j, c);
        }
    }
    Eigen::SparseMatrix<cplx> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) fail(ErrorKind::convergence, "small-eps LU failed");
    Eigen::VectorXcd x = lu.solve(Eigen::Map<const Eigen::VectorXcd>(psi.data(), n));
    if (lu.info() != Eigen::Success) fail(ErrorKind::convergence, "small-eps solve failed");
    return {x.data(), x.data() + n};
}

}  // namespace ends::oracle
