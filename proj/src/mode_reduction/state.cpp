#include <algorithm>
#include <cmath>
#include <numbers>

#include "ends/errors.hpp"
#include "ends/mode_reduction.hpp"

namespace ends {

RadialState RadialState::zeros(std::shared_ptr<const RadialGrid> grid, std::vector<int> modes)
{
    RadialState st;
    st.values.assign(modes.size(), std::vector<cplx>(grid->size(), cplx(0.0)));
    st.grid = std::move(grid);
    st.modes = std::move(modes);
    return st;
}

int RadialState::index_of(int m) const
{
    auto it = std::find(modes.begin(), modes.end(), m);
    return it == modes.end() ? -1 : static_cast<int>(it - modes.begin());
}

std::vector<cplx>& RadialState::mode(int m)
{
    int i = index_of(m);
    if (i < 0) fail(ErrorKind::precondition, "state has no mode " + std::to_string(m));
    return values[i];
}

const std::vector<cplx>& RadialState::mode(int m) const
{
    int i = index_of(m);
    if (i < 0) fail(ErrorKind::precondition, "state has no mode " + std::to_string(m));
    return values[i];
}

double RadialState::norm2() const
{
    double s = 0.0;
    for (const auto& v : values) s += kernels::norm2(v.data(), v.size());
    return s * grid->h;
}

double RadialState::norm() const { return std::sqrt(norm2()); }

cplx RadialState::inner(const RadialState& other) const
{
    cplx s = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        int k = other.index_of(modes[i]);
        if (k < 0) continue;
        s += kernels::dot(values[i].data(), other.values[k].data(), values[i].size());
    }
    return s * grid->h;
}

namespace {

void combine(RadialState& a, const RadialState& b, double sign)
{
    for (std::size_t i = 0; i < b.modes.size(); ++i) {
        int k = a.index_of(b.modes[i]);
        if (k < 0) {
            a.modes.push_back(b.modes[i]);
            a.values.emplace_back(b.values[i].size(), cplx(0.0));
            k = static_cast<int>(a.modes.size()) - 1;
        }
        kernels::axpy(cplx(sign), b.values[i].data(), a.values[k].data(), b.values[i].size());
    }
}

}  // namespace

RadialState& RadialState::operator+=(const RadialState& other)
{
    combine(*this, other, 1.0);
    return *this;
}

RadialState& RadialState::operator-=(const RadialState& other)
{
    combine(*this, other, -1.0);
    return *this;
}

RadialState& RadialState::operator*=(cplx a)
{
    for (auto& v : values)
        for (auto& x : v) x *= a;
    return *this;
}

RadialState operator-(RadialState a, const RadialState& b) { return a -= b; }
RadialState operator+(RadialState a, const RadialState& b) { return a += b; }

RadialState half_density_map(const ManifoldModel& model, const RadialState& psi, Direction dir)
{
    RadialState out = psi;
    const auto& g = *psi.grid;
    for (std::size_t j = 0; j < g.size(); ++j) {
        double lf = model.line(g.s[j]).log_f;
        double factor = std::exp((dir == Direction::fwd ? 0.5 : -0.5) * lf);
        for (auto& v : out.values) v[j] *= factor;
    }
    return out;
}

RadialState to_modes(const SurfaceField& field, int mmax)
{
    std::vector<int> modes;
    for (int m = -mmax; m <= mmax; ++m) modes.push_back(m);
    RadialState st = RadialState::zeros(field.grid, modes);
    const int nt = field.ntheta;
    if (2 * mmax >= nt) fail(ErrorKind::precondition, "ntheta too small for mmax");
    const double dth = 2.0 * std::numbers::pi / nt;
    // psi_m = integral psi e^{-i m theta} dtheta / sqrt(2 pi)
    for (std::size_t i = 0; i < modes.size(); ++i) {
        std::vector<cplx> tw(nt);
        for (int k = 0; k < nt; ++k)
            tw[k] = std::polar(dth / std::sqrt(2.0 * std::numbers::pi), -modes[i] * k * dth);
        for (std::size_t j = 0; j < field.grid->size(); ++j) {
            cplx acc = 0.0;
            for (int k = 0; k < nt; ++k) acc += field.values[j * nt + k] * tw[k];
            st.values[i][j] = acc;
        }
    }
    return st;
}

SurfaceField to_surface(const RadialState& st, int ntheta)
{
    SurfaceField f;
    f.grid = st.grid;
    f.ntheta = ntheta;
    f.values.assign(st.grid->size() * ntheta, cplx(0.0));
    const double dth = 2.0 * std::numbers::pi / ntheta;
    for (std::size_t i = 0; i < st.modes.size(); ++i) {
        for (int k = 0; k < ntheta; ++k) {
            cplx e = std::polar(1.0 / std::sqrt(2.0 * std::numbers::pi), st.modes[i] * k * dth);
            for (std::size_t j = 0; j < st.grid->size(); ++j)
                f.values[j * ntheta + k] += st.values[i][j] * e;
        }
    }
    return f;
}

BesovNorms besov_norms(const RadialGrid& g, const std::vector<double>& abs2)
{
    std::vector<double> mass;
    auto annulus_of = [](double r) {
        if (r < 2.0) return 0;
        return static_cast<int>(std::floor(std::log2(r)));
    };
    for (std::size_t j = 0; j < g.size(); ++j) {
        int nu = g.region[j] < 0 ? 0 : annulus_of(g.r[j]);
        if (nu >= static_cast<int>(mass.size())) mass.resize(nu + 1, 0.0);
        mass[nu] += abs2[j] * g.weights[j];
    }
    // keep annuli that lie completely inside the grid
    int last = annulus_of(g.rmax * (1.0 + 1e-12));
    if (std::ldexp(1.0, last + 1) > g.rmax * (1.0 + 1e-12)) --last;
    last = std::min<int>(last, static_cast<int>(mass.size()) - 1);
    BesovNorms out;
    for (int nu = 0; nu <= last; ++nu) {
        double a = std::sqrt(mass[nu]);
        double R = std::ldexp(1.0, nu);
        out.annulus.push_back(a);
        out.B += std::sqrt(R) * a;
        out.Bstar = std::max(out.Bstar, a / std::sqrt(R));
    }
    if (last >= 0) out.B0_defect = out.annulus[last] / std::sqrt(std::ldexp(1.0, last));
    return out;
}

BesovNorms besov_norms(const RadialState& st)
{
    std::vector<double> abs2(st.grid->size(), 0.0);
    for (const auto& v : st.values)
        for (std::size_t j = 0; j < v.size(); ++j) abs2[j] += std::norm(v[j]);
    return besov_norms(*st.grid, abs2);
}

}  // namespace ends
