#include "ends/errors.hpp"
#include "ends/geometry.hpp"

namespace ends {

namespace {

EndProfile make_end(int id, WarpProfile warp, bool curvature_in_q1)
{
    EndProfile e;
    e.id = id;
    e.warp = std::move(warp);
    e.curvature_in_q1 = curvature_in_q1;
    return e;
}

}  // namespace

ManifoldModel model_A()
{
    ManifoldModel m;
    m.name = "A";
    m.ends = {make_end(1, WarpProfile::euclidean(), false),
              make_end(2, WarpProfile::euclidean(), false)};
    m.finalize();
    return m;
}

ManifoldModel model_B()
{
    ManifoldModel m;
    m.name = "B";
    m.ends = {make_end(1, WarpProfile::euclidean(), true),
              make_end(2, WarpProfile::hyperbolic(), true)};
    m.finalize();
    return m;
}

ManifoldModel model_C(double p)
{
    ManifoldModel m;
    m.name = "C";
    m.ends = {make_end(1, WarpProfile::euclidean(), false),
              make_end(2, WarpProfile::euclidean(), false)};
    m.ends[1].v_long = RadialFunction::power(1.0, p);
    m.finalize();
    return m;
}

ManifoldModel model_D(double V0, double a)
{
    ManifoldModel m;
    m.name = "D";
    m.ends = {make_end(1, WarpProfile::cylinder(), true),
              make_end(2, WarpProfile::cylinder(), true)};
    m.well = {true, V0, a};
    m.finalize();
    return m;
}

ManifoldModel model_free()
{
    ManifoldModel m;
    m.name = "free";
    m.ends = {make_end(1, WarpProfile::cylinder(), true),
              make_end(2, WarpProfile::cylinder(), true)};
    m.finalize();
    return m;
}

ManifoldModel model_preset(const std::string& name)
{
    if (name == "A") return model_A();
    if (name == "B") return model_B();
    if (name == "C") return model_C();
    if (name == "D") return model_D();
    if (name == "free") return model_free();
    fail(ErrorKind::validation, "unknown model preset '" + name + "'");
}

}  // namespace ends
