#ifndef DSIM_SCATTER_HPP
#define DSIM_SCATTER_HPP

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dsim/barrier.hpp"
#include "dsim/complex2x2.hpp"

namespace dsim {

// Stationary scattering at wavenumber k > 0 through a BarrierArray, via
// products of 2x2 factors acting on plane-wave coefficient pairs.
//
// Conventions used throughout this module:
//   * beta_j = m*alpha_j / (i hbar^2 k): dimensionless spike strength.
//     |beta| >> 1 is the opaque (low kinetic energy) regime.
//   * A spike at position P contributes the factor
//         I + beta * [[1, e^{-2ikP}], [-e^{2ikP}, -1]]
//     and the composite M = F_1 * F_2 * ... * F_n (left to right) relates the
//     asymptotic coefficients (A, B) = M (C, D), so t = 1/M11, r = M21/M11.
//   * Under these factors the reconstructed piecewise eigenfunction is
//     continuous and its derivative jumps by -(2 m alpha_i / hbar^2) psi(L_i)
//     at each spike; flipping every alpha relabels the same family. All
//     magnitude and delay results in the opaque regime are insensitive to
//     this orientation.
//   * A nonzero inner potential V0 replaces the wavenumber on (L_1, L_n) by
//     k' = sqrt(k^2 - 2 m V0 / hbar^2), branch Im k' >= 0, and the spike
//     factors generalize to refraction factors between k and k'.

/// beta for spike i at wavenumber k (uses the wavenumber of the region to the
/// left of the spike when V0 != 0).
cplx beta_coefficient(const BarrierArray& b, std::size_t i, double k);

/// Wavenumber inside (L_1, L_n): k' = sqrt(k^2 - 2 m V0 / hbar^2), Im >= 0.
cplx inner_wavenumber(const BarrierArray& b, double k);

/// Composite transfer matrix; identity for an empty array.
Mat2c transfer_matrix(const BarrierArray& b, double k);

struct ScatteringResult {
    double k = 0.0;
    cplx t;  ///< transmission amplitude, 1/M11
    cplx r;  ///< reflection amplitude, M21/M11
    /// One entry per region: index 0 is x < L_1, index n is x > L_n.
    struct Region {
        cplx a, b;        ///< psi(x) = a e^{i q x} + b e^{-i q x} on the region
        cplx wavenumber;  ///< q (k outside, k' inside when V0 != 0)
        double x_lo = 0.0, x_hi = 0.0;  ///< region bounds (infinities at the ends)
    };
    std::vector<Region> regions;

    /// Piecewise eigenfunction and its derivative.
    cplx psi(double x) const;
    cplx dpsi(double x) const;
};

/// Exact amplitudes with per-region coefficients back-substituted from
/// (C, D) = (t, 0), right to left. Throws SingularityError when |M11| is
/// degenerate at this k (possible only off the real-potential/real-k case).
ScatteringResult transmission_exact(const BarrierArray& b, double k);

/// Opaque-regime product formula
///     t ~ [prod_i beta_i^{-1}] e^{-ik L_n} / [(-2i)^{n-1} prod sin(k dL_i)],
/// valid for min|beta| >> n. Throws ResonanceError when any |sin(k dL_i)|
/// <= sin_tolerance: the formula has poles there that the exact route lacks.
cplx transmission_low_energy(const BarrierArray& b, double k, double sin_tolerance = 1e-8);

/// Non-empty when the opaque-regime premise min|beta| >= 10*n is violated.
std::optional<std::string> low_energy_warning(const BarrierArray& b, double k);

/// Spectral transmission coefficient C(k) with t(k) = (-ik) C(k) e^{-ik L_n}.
cplx packet_coefficient(const BarrierArray& b, double k);

/// Same, built from the low-energy amplitude (closed form for equal spacing).
cplx packet_coefficient_low_energy(const BarrierArray& b, double k, double sin_tolerance = 1e-8);

/// Spectral half-width sqrt(n-1)/span over which C(k) is nearly constant for
/// n equally spaced spikes spanning `span`. Requires n >= 2.
double max_bandwidth(std::size_t n, double span);

} // namespace dsim

#endif
