#ifndef DSIM_DELAYS_HPP
#define DSIM_DELAYS_HPP

#include "dsim/barrier.hpp"

namespace dsim {

// Tunneling-time extraction by numerical differentiation of the transmission
// phase. Central differences with explicit unwrapping; the stencil throws
// StencilError when the phase moves too fast to be tracked reliably.

/// Group delay tau_g = hbar * d(arg t)/dE = (m/(hbar k)) * d(arg t)/dk.
double group_delay(const BarrierArray& b, double k, double dk);

/// Crossing time of a free particle over the array span: L_n * m / (hbar k).
double free_crossing_time(const BarrierArray& b, double k);

/// group_delay + free_crossing_time; approaches 0 in the opaque regime.
double traversal_time(const BarrierArray& b, double k, double dk);

/// Stationary dwell time -hbar * d(arg t)/dV0 at the array's V0, from the
/// exact amplitude with the constant inner potential displaced by +-dV.
/// Sign fixed so that a pure V0 region of length L gives +L/v.
double dwell_time(const BarrierArray& b, double k, double dV);

struct DelayReport {
    double k = 0.0;
    double group_delay = 0.0;
    double free_time = 0.0;
    double traversal_time = 0.0;    ///< group_delay + free_time by definition
    double dwell_time = 0.0;
    double dk = 0.0, dV = 0.0;      ///< stencil steps used
    /// Richardson error estimates: |D(h) - D(h/2)| / 3 for the h/2 values.
    double group_delay_error = 0.0;
    double dwell_error = 0.0;
};

/// Full report at one k. Steps dk <= 0 / dV <= 0 select the defaults
/// dk = 1e-5*k and dV = 1e-6*E. Values are the half-step evaluations; the
/// error fields bound them via step halving.
DelayReport delay_report(const BarrierArray& b, double k, double dk = 0.0, double dV = 0.0);

/// Signed distance from k to the nearest zero of sin(k * gap) over all gaps
/// (infinity when fewer than two spikes). Sweep drivers skip |.| < 1e-6.
double resonance_distance(const BarrierArray& b, double k);

} // namespace dsim

#endif
