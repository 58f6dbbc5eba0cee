#pragma once

#include <cmath>
#include <functional>

#include "ends/mode_reduction.hpp"

namespace ends::test {

// State with one mode m sampled from f(s).
inline RadialState sampled(std::shared_ptr<const RadialGrid> g, int m, const std::function<cplx(double)>& f)
{
    RadialState st = RadialState::zeros(g, {m});
    for (std::size_t j = 0; j < g->size(); ++j) st.values[0][j] = f(g->s[j]);
    return st;
}

inline RadialState gaussian(std::shared_ptr<const RadialGrid> g, int m, double s0, double a)
{
    return sampled(g, m, [=](double s) { return cplx(std::exp(-a * (s - s0) * (s - s0))); });
}

}  // namespace ends::test
