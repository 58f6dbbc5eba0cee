#include <cmath>
#include <memory>
#include <sstream>

#include "ends/errors.hpp"
#include "ends/geometry.hpp"
#include "ends/spline.hpp"

namespace ends {

namespace {

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

RadialFunction RadialFunction::none() { return RadialFunction{}; }

RadialFunction RadialFunction::power(double c, double p)
{
    RadialFunction fn;
    fn.description = "power(" + fmt(c) + ", " + fmt(p) + ")";
    fn.zero = (c == 0.0);
    fn.constant = (p == 0.0) || fn.zero;
    fn.eval = [c, p](double r) {
        if (r <= 0.0) fail(ErrorKind::domain, "power potential needs r > 0");
        double v = c * std::pow(r, -p);
        double r2 = r * r;
        return Jet{v, -p * v / r, p * (p + 1.0) * v / r2, -p * (p + 1.0) * (p + 2.0) * v / (r2 * r),
                   p * (p + 1.0) * (p + 2.0) * (p + 3.0) * v / (r2 * r2)};
    };
    return fn;
}

RadialFunction RadialFunction::table(const std::vector<double>& r, const std::vector<double>& v,
                                     const std::string& label)
{
    auto sp = std::make_shared<CubicSpline>(r, v);
    RadialFunction fn;
    fn.description = "table(" + label + ")";
    fn.zero = false;
    fn.constant = false;
    fn.eval = [sp](double x) {
        if (x < sp->x_min() || x > sp->x_max())
            fail(ErrorKind::domain, "r = " + fmt(x) + " outside potential table range");
        return Jet{(*sp)(x), sp->deriv(x), sp->deriv2(x), sp->deriv3(x), 0.0};
    };
    return fn;
}

WarpProfile WarpProfile::euclidean()
{
    return {"euclidean",
            [](double r) {
                if (r <= 0.0) fail(ErrorKind::domain, "euclidean profile needs r > 0");
                double r2 = r * r;
                return Jet{std::log(r), 1.0 / r, -1.0 / r2, 2.0 / (r2 * r), -6.0 / (r2 * r2)};
            },
            false};
}

WarpProfile WarpProfile::hyperbolic()
{
    return {"hyperbolic", [](double r) { return Jet{r, 1.0, 0.0, 0.0, 0.0}; }, true};
}

WarpProfile WarpProfile::conic(double alpha)
{
    if (!(alpha > 0.0)) fail(ErrorKind::validation, "conic profile needs alpha > 0");
    return {"conic(" + fmt(alpha) + ")",
            [alpha](double r) {
                if (r <= 0.0) fail(ErrorKind::domain, "conic profile needs r > 0");
                double r2 = r * r;
                return Jet{std::log(alpha * r), 1.0 / r, -1.0 / r2, 2.0 / (r2 * r), -6.0 / (r2 * r2)};
            },
            false};
}

WarpProfile WarpProfile::cylinder()
{
    return {"cylinder", [](double) { return Jet{0.0, 0.0, 0.0}; }, true};
}

WarpProfile WarpProfile::table(const std::vector<double>& r, const std::vector<double>& f,
                               const std::string& label)
{
    std::vector<double> lf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0)) fail(ErrorKind::validation, "warp table values must be positive");
        lf[i] = std::log(f[i]);
    }
    auto sp = std::make_shared<CubicSpline>(r, lf);
    return {"table(" + label + ")",
            [sp](double x) {
                if (x < sp->x_min() || x > sp->x_max())
                    fail(ErrorKind::domain, "r = " + fmt(x) + " outside warp table range");
                return Jet{(*sp)(x), sp->deriv(x), sp->deriv2(x), sp->deriv3(x), 0.0};
            },
            false};
}

const char* to_string(PotentialClass c)
{
    switch (c) {
    case PotentialClass::short_range: return "short_range";
    case PotentialClass::dollard: return "dollard";
    case PotentialClass::long_range: return "long_range";
    }
    return "unknown";
}

}  // namespace ends
