#ifndef DSIM_WEAKVAL_HPP
#define DSIM_WEAKVAL_HPP

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "dsim/barrier.hpp"
#include "dsim/complex2x2.hpp"
#include "dsim/packets.hpp"

namespace dsim {

// Weak values of pre- and post-selected ensembles: finite-dimensional
// algebra, the any-complex-value construction, and the conditioned
// presence-time integral with its first-order pointer readout.

/// Pre-selected state |i>, post-selected state |f>, measured Hermitian A.
struct WeakValueProblem {
    std::size_t dim = 2;
    std::vector<cplx> pre;   ///< |i>, unit norm
    std::vector<cplx> post;  ///< |f>, unit norm
    std::vector<cplx> op;    ///< A, row-major dim x dim, Hermitian

    void validate() const;
};

/// A_W = <f|A|i> / <f|i>. Throws PostSelectionError when |<f|i>| < 1e-12.
cplx weak_value(const WeakValueProblem& p);

/// Two-level pre-selection (alpha1, alpha2) in the eigenbasis of
/// A = diag(a1, a2) realizing weak value z against post-state (1,1)/sqrt(2):
/// alpha2/alpha1 = (z - a1)/(a2 - z), normalized. Any complex z works;
/// z = a1 or z = a2 return the corresponding eigenstate. a1 = a2 is a
/// DomainError.
std::pair<cplx, cplx> construct_states(cplx z, double a1, double a2);

/// Conditioned presence-time integral
///   E(tau) = Int dt Int_region dx  Psi_f^* Psi_i / Int dx Psi_f^*(x,t_ref) Psi_i(x,t_ref).
/// Psi_i is the scattering packet; Psi_f is a freely evolving packet whose
/// spectrum matches the transmitted asymptotics (g_f = g e^{-i k L_n}).
struct DwellIntegralSpec {
    BarrierArray barriers;
    WavePacketSpec packet;
    std::size_t spectral_points = 1025;

    double region_lo = 0.0, region_hi = 0.0;  ///< presence region
    std::size_t region_points = 129;          ///< odd

    double t_lo = 0.0, t_hi = 0.0;  ///< integration window
    std::size_t t_points = 201;     ///< odd

    double denom_lo = 0.0, denom_hi = 0.0;  ///< denominator overlap grid
    std::size_t denom_points = 1025;        ///< odd

    double t_ref = 0.0;        ///< denominator reference time
    double t_ref_check = 0.0;  ///< second reference time (drift diagnostic)

    /// Max packet mass allowed inside the region at the window endpoints.
    double edge_mass_tolerance = 1e-6;
};

struct DwellWeakResult {
    cplx value;        ///< E(tau), complex in general
    cplx numerator;
    cplx denominator;  ///< overlap at t_ref
    /// |D(t_ref_check) - D(t_ref)| / |D(t_ref)|; the free-evolution
    /// post-selection makes this nonzero in general, so it is reported
    /// rather than assumed away.
    double denominator_drift = 0.0;
    double edge_mass_incident = 0.0;  ///< region mass of Psi_i at window ends
    double edge_mass_post = 0.0;      ///< same for Psi_f
};

/// Throws WindowError when the window fails the edge-mass or coverage
/// checks, PostSelectionError when |denominator| < 1e-10.
DwellWeakResult dwell_weak_integral(const DwellIntegralSpec& spec);

struct PointerShift {
    double shift = 0.0;                 ///< mean pointer displacement, Re(A_W)
    double momentum_diagnostic = 0.0;   ///< Im(A_W): momentum-space shift, not position
    double coupling_ratio = 0.0;        ///< |A_W| * dP_tau / hbar, must be < 0.1
};

/// First-order readout of a weak value on a Gaussian pointer of width
/// sigma_tau (dP_tau = hbar/(2 sigma_tau)). Throws PerturbationError when
/// the coupling ratio reaches 0.1.
PointerShift pointer_shift(cplx weak_integral, double sigma_tau, double hbar = 1.0);

} // namespace dsim

#endif
