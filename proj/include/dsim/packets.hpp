#ifndef DSIM_PACKETS_HPP
#define DSIM_PACKETS_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "dsim/barrier.hpp"
#include "dsim/complex2x2.hpp"
#include "dsim/kernels.hpp"

namespace dsim {

// Wave-packet propagation by superposition of exact scattering
// eigenfunctions: psi(x,t) = (2 pi)^{-1/2} Int g(k) u_k(x) e^{-i w(k) t} dk,
// w(k) = hbar k^2 / 2m, with u_k the left-incident eigenfunction at k. The
// k integral is a composite Simpson rule over the spectral table. Deltas are
// exact in this representation; no spatial grid ever sees the spikes.

/// Gaussian spectral envelope around k0: g(k) ~ exp(-(k-k0)^2/(4 dk^2)),
/// normalized so the table's Simpson quadrature of |g|^2 equals 1. The
/// constraint k0 >= 5 dk keeps the k <= 0 leakage below 1e-6.
struct WavePacketSpec {
    double k0 = 1.0;  ///< center wavenumber, > 0
    double dk = 0.1;  ///< spectral width (std of |g|^2), > 0

    void validate() const;
};

struct SpectralTable {
    std::vector<double> k;       ///< uniform grid, ascending, k > 0
    std::vector<double> weight;  ///< Simpson weights for the grid
    std::vector<cplx> g;         ///< spectral amplitude at the nodes
    double k0 = 0.0, dk = 0.0;

    std::size_t size() const { return k.size(); }
};

/// Sample the envelope on [k0 - span*dk, k0 + span*dk] (clamped above 0)
/// with an odd number of points (>= 513 enforced).
SpectralTable synthesize(const WavePacketSpec& spec, std::size_t points = 1025,
                         double span = 6.0);

struct FieldRequest {
    std::vector<double> x;
    std::vector<double> t;
    /// When true, a handful of probe samples are re-evaluated on the
    /// half-density spectral grid; disagreement beyond 1e-5 relative raises
    /// AccuracyError.
    bool check_accuracy = false;
};

struct FieldSample {
    std::vector<double> x;
    std::vector<double> t;
    std::vector<cplx> values;  ///< t-major: values[it * x.size() + ix]

    const cplx& at(std::size_t it, std::size_t ix) const { return values[it * x.size() + ix]; }
    std::size_t nx() const { return x.size(); }
    std::size_t nt() const { return t.size(); }
};

/// Evaluate the packet on the request grids. Inner regions with complex
/// wavenumber (V0 != 0, evanescent) take a scalar path; everything else runs
/// through the SIMD kernels.
FieldSample propagate(const SpectralTable& table, const BarrierArray& b,
                      const FieldRequest& req,
                      kernels::Backend backend = kernels::active_backend());

/// Closed-form free Gaussian packet (V = 0 everywhere) for the same spec;
/// the quadrature oracle for propagate and the reference envelope phi.
cplx free_gaussian(const WavePacketSpec& spec, double x, double t, double mass = 1.0,
                   double hbar = 1.0);

/// d/dx of free_gaussian.
cplx free_gaussian_dx(const WavePacketSpec& spec, double x, double t, double mass = 1.0,
                      double hbar = 1.0);

/// Simpson norm of |psi(., t_index)|^2 over the sample's x grid.
double field_norm(const FieldSample& f, std::size_t t_index);

struct ArrivalDistribution {
    std::vector<double> t;
    std::vector<double> density;  ///< |psi(x*, t)|^2 normalized over the window
    double peak_time = 0.0;       ///< quadratic interpolation around the maximum
    double mean_time = 0.0;       ///< first moment of the density
};

/// Distribution of |psi(x_star, t)|^2 over the sample's t grid. x_star must
/// be a grid point; WindowError if the packet is not contained in the window
/// (endpoint density above 1e-3 of the peak).
ArrivalDistribution arrival_distribution(const FieldSample& f, double x_star);

/// Normalized overlap |<a, b>| / (|a| |b|) of two sampled profiles.
double shape_correlation(const std::vector<cplx>& a, const std::vector<cplx>& b);

struct FlatnessReport {
    double band = 0.0;
    double magnitude_deviation = 0.0;  ///< max | |tau(k)|/|tau(k0)| - 1 |
    double phase_residual = 0.0;       ///< max |arg tau - best linear fit| (rad)
    bool resonance_in_band = false;
};

/// Flatness of tau(k) = t(k) e^{i k L_n} over [k0 - band, k0 + band]. Small
/// deviations mean the transmitted spectrum is momentum independent beyond
/// first order. Crossing a resonance is flagged, not fatal.
FlatnessReport spectral_flatness(const BarrierArray& b, double k0, double band,
                                 std::size_t points = 257);

} // namespace dsim

#endif
