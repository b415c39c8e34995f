#ifndef DSIM_QUADRATURE_HPP
#define DSIM_QUADRATURE_HPP

#include <cstddef>
#include <vector>

#include "dsim/errors.hpp"

namespace dsim {

/// Uniform grid of n points on [lo, hi], endpoints included. n >= 2.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2) throw DomainError("uniform_grid: need at least two points");
    std::vector<double> g(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + h * static_cast<double>(i);
    g.back() = hi;
    return g;
}

/// Composite Simpson weights for a uniform grid of n points (n odd, >= 3).
inline std::vector<double> simpson_weights(std::size_t n, double h) {
    if (n < 3 || n % 2 == 0)
        throw DomainError("simpson_weights: need an odd number of points >= 3");
    std::vector<double> w(n, h / 3.0);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] *= (i % 2 == 1) ? 4.0 : 2.0;
    return w;
}

template <typename T>
T weighted_sum(const std::vector<double>& w, const std::vector<T>& f) {
    T acc{};
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f[i];
    return acc;
}

} // namespace dsim

#endif
