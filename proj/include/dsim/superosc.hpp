#ifndef DSIM_SUPEROSC_HPP
#define DSIM_SUPEROSC_HPP

#include <complex>
#include <vector>

#include "dsim/complex2x2.hpp"

namespace dsim {

/// Parameters of the band-limited family
///   F(k) = [ (1-L/x0)/2 * e^{i k x0 / N} + (1+L/x0)/2 * e^{-i k x0 / N} ]^N,
/// a superposition of waves e^{ikx} with |x| <= x0 that behaves like the
/// "forbidden" pure wave e^{-ikL} (|L| > x0) on a band of width
/// sqrt(N)/sqrt(L^2 - x0^2) around k = 0.
struct SuperoscSpec {
    int N = 1;        ///< power, >= 1
    double L = 0.0;   ///< super shift (|L| > x0 for the superoscillatory regime)
    double x0 = 1.0;  ///< reference shift, > 0

    void validate() const;
};

/// Base of the power: a e^{i k x0/N} + b e^{-i k x0/N}.
cplx so_bracket(const SuperoscSpec& s, double k);

/// F(k), evaluated through N*log of the bracket (principal branch); falls
/// back to the direct power when the bracket underflows the log path.
cplx f_eval(const SuperoscSpec& s, double k);

/// F along a k path with the bracket's argument unwrapped continuously, so
/// arg F is free of the N-fold branch ambiguity of pointwise powers.
std::vector<cplx> f_eval_path(const SuperoscSpec& s, const std::vector<double>& k);

/// d arg F / dk by central differences: [arg F(k+dk) - arg F(k-dk)]/(2 dk),
/// computed on the bracket (exact identity: slope = -L / |bracket|^2).
/// Throws InstabilityError when |F| vanishes inside the stencil.
double local_wavenumber(const SuperoscSpec& s, double k, double dk);

struct SuperoscReport {
    double band = 0.0;            ///< sqrt(N)/sqrt(L^2 - x0^2)
    double count_estimate = 0.0;  ///< ~sqrt(N) fast cycles inside the band
    double growth_ceiling = 0.0;  ///< (|L|/x0)^N, attained at k x0/N = pi/2
};

/// Diagnostics of the superoscillatory regime; throws
/// NotSuperoscillatoryError unless |L| > x0.
SuperoscReport band_and_growth(const SuperoscSpec& s);

// ---------------------------------------------------------------------------
// Two-spike etalon sums
// ---------------------------------------------------------------------------

/// Multiple-bounce summation between two spikes separated by L, at
/// wavenumber k, with spike coefficient beta = m*alpha/(i hbar^2 k).
struct FabryPerotSpec {
    cplx beta;
    double k = 0.0;
    double L = 0.0;
    int terms = 1;  ///< J >= 1 terms kept in the truncated sums

    void validate() const;
};

struct FabryPerotSum {
    /// Truncated lossless bounce sum sum_{j<J} e^{2ikLj}. The full series
    /// does not converge (|ratio| = 1); this is a diagnostic only.
    cplx partial;
    /// Its formal resummation 1/(1 - e^{2ikL}) = e^{-ikL}/(-2i sin kL).
    cplx closed_form;
    /// Attenuated sum (1+beta)^{-2} sum_{j<J} [ (beta/(1+beta))^2 e^{2ikL} ]^j.
    cplx exact_partial;
    /// Its closed form beta^{-2} / (1 + 2/beta + 1/beta^2 - e^{2ikL}); equals
    /// the exact two-spike transmission amplitude.
    cplx exact_closed;
    double rho = 0.0;  ///< |beta/(1+beta)|^2 |e^{2ikL}|, convergence ratio
};

/// Throws DivergenceError when rho >= 1 (the attenuated series diverges).
FabryPerotSum fabry_perot_sum(const FabryPerotSpec& s);

} // namespace dsim

#endif
