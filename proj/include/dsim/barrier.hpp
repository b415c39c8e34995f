#ifndef DSIM_BARRIER_HPP
#define DSIM_BARRIER_HPP

#include <cstddef>
#include <vector>

namespace dsim {

/// A chain of delta spikes alpha_i * delta(x - L_i) on a line, with an
/// optional constant potential V0 filling the interval (L_1, L_n) between
/// the outermost spikes. Units are carried explicitly: strengths have
/// dimension energy*length, and mass/hbar default to 1 (natural units).
struct BarrierArray {
    std::vector<double> positions;  ///< L_1 < L_2 < ... < L_n, with L_1 = 0
    std::vector<double> strengths;  ///< alpha_i, same length as positions
    double mass = 1.0;
    double hbar = 1.0;
    double inner_potential = 0.0;   ///< V0 on (L_1, L_n); 0 outside

    std::size_t size() const { return positions.size(); }

    /// L_n - L_1 (0 for fewer than two spikes).
    double span() const {
        return positions.size() < 2 ? 0.0 : positions.back() - positions.front();
    }

    /// Throws ValidationError unless the invariants hold: positions strictly
    /// increasing starting at 0, matching strengths, m > 0, hbar > 0.
    void validate() const;

    /// n equally spaced spikes of common strength spanning [0, span]:
    /// L_j = (j-1) * span / (n-1). Requires n >= 2.
    static BarrierArray equally_spaced(std::size_t n, double span, double alpha,
                                       double mass = 1.0, double hbar = 1.0);
};

} // namespace dsim

#endif
