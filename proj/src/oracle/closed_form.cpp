#include <algorithm>
#include <array>
#include <cmath>

#include "ends/errors.hpp"
#include "ends/oracle.hpp"

namespace ends::oracle {

namespace {

using Mat = std::array<cplx, 4>;  // row-major 2 x 2

Mat mul(const Mat& a, const Mat& b)
{
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

// (u, u') -> coefficients (A, B) of A e^{ikx} + B e^{-ikx} at x
Mat to_waves(cplx k, double x)
{
    const cplx i(0.0, 1.0);
    cplx ep = std::exp(-i * k * x), em = std::exp(i * k * x);
    return {0.5 * ep, 0.5 * ep / (i * k), 0.5 * em, -0.5 * em / (i * k)};
}

Mat from_waves(cplx k, double x)
{
    const cplx i(0.0, 1.0);
    cplx ep = std::exp(i * k * x), em = std::exp(-i * k * x);
    return {ep, em, i * k * ep, -i * k * em};
}

}  // namespace

ClosedForm closed_form_scattering(const std::vector<Layer>& layers, double lambda)
{
    if (!(lambda > 0.0)) fail(ErrorKind::precondition, "closed-form scattering needs lambda > 0");
    std::vector<Layer> ls = layers;
    std::sort(ls.begin(), ls.end(), [](const Layer& a, const Layer& b) { return a.a < b.a; });
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (!(ls[i].b > ls[i].a)) fail(ErrorKind::validation, "layer needs a < b");
        if (i > 0 && ls[i].a < ls[i - 1].b) fail(ErrorKind::validation, "layers overlap");
    }
    const double k0 = std::sqrt(2.0 * lambda);
    // (u, u') transfer from the left edge of the first layer to the right edge of the last
    Mat T = {1.0, 0.0, 0.0, 1.0};
    double x = ls.empty() ? 0.0 : ls.front().a;
    const double xl = x;
    for (const Layer& l : ls) {
        if (l.a > x) T = mul(mul(from_waves(k0, l.a), to_waves(k0, x)), T);
        cplx k = std::sqrt(cplx(2.0 * (lambda - l.V), 0.0));
        if (std::abs(k) < 1e-14)
            T = mul(Mat{1.0, l.b - l.a, 0.0, 1.0}, T);
        else
            T = mul(mul(from_waves(k, l.b), to_waves(k, l.a)), T);
        x = l.b;
    }
    const double xr = x;
    const Mat M = mul(mul(to_waves(k0, xr), T), from_waves(k0, xl));
    // right = M left, left = (1, r), right = (t, 0)
    ClosedForm out;
    out.r = -M[2] / M[3];
    out.t = M[0] + M[1] * out.r;
    // right incidence: left = (t', 0), right = (r', 1)
    out.t_right = 1.0 / M[3];
    out.r_right = M[1] * out.t_right;
    return out;
}

ClosedForm square_well(double V0, double a, double lambda)
{
    if (!(a > 0.0)) return closed_form_scattering({}, lambda);
    return closed_form_scattering({Layer{-a, a, V0}}, lambda);
}

}  // namespace ends::oracle
