#include <cmath>
#include <limits>

#include "ends/errors.hpp"
#include "ends/parallel.hpp"
#include "ends/propagator.hpp"

namespace ends {

double cook_integrand(const Problem& problem, const SpectralProfile& h, double t, int sign)
{
    if (!(t > 0.0)) fail(ErrorKind::precondition, "Cook integrand needs t > 0");
    if (h.channels.empty()) return 0.0;
    const ManifoldModel& model = problem.model();
    const RadialGrid& g = *problem.grid();
    RadialState u = leading_term(problem, h, t, sign);
    auto setups = stationary_setups(model, &g, h);
    const std::size_t n = g.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < u.modes.size(); ++i) {
        const int m = u.modes[i];
        // b-tilde at lambda_c and q1 + shift per node; channels of one mode sit on disjoint ends
        std::vector<double> b(n, 0.0), q(n, 0.0);
        for (std::size_t c = 0; c < h.channels.size(); ++c) {
            if (h.channels[c].m != m) continue;
            const StationarySetup& st = setups[c];
            const EndProfile& e = model.ends[st.end];
            auto nodes = g.end_nodes(st.end, 0.0, std::numeric_limits<double>::infinity());
            parallel_for(nodes.size(), [&](std::size_t k) {
                const std::size_t j = nodes[k];
                const double r = g.r[j];
                q[j] = e.q1(r).v + st.shift;
                if (!in_omega_c(model, st, t, r)) return;
                double l = stationary_point(model, st, t, r) - st.shift;
                double eta = eta_lambda(model, st.end, r, l);
                double d = 2.0 * (l - e.q1(r).v);
                if (eta > 0.0 && d > 0.0) b[j] = eta * std::sqrt(d);
            });
        }
        const std::vector<cplx>& v = u.values[i];
        std::vector<cplx> bv(n), Hv(n);
        for (std::size_t j = 0; j < n; ++j) bv[j] = b[j] * v[j];
        std::vector<cplx> Av = radial_derivative(g, v);
        std::vector<cplx> Abv = radial_derivative(g, bv);
        problem.mode(m).apply(v.data(), Hv.data());
        const double s = double(sign);
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            cplx Gv = 0.5 * (b[j] * Av[j] + Abv[j]) - s * 0.5 * b[j] * b[j] * v[j] + s * q[j] * v[j];
            sum += std::norm(Hv[j] - Gv) * g.weights[j];
        }
        acc += sum;
    }
    return std::sqrt(acc);
}

}  // namespace ends
