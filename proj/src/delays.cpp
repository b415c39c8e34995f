#include "dsim/delays.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dsim/errors.hpp"
#include "dsim/scatter.hpp"

namespace dsim {

namespace {

double transmission_phase(const BarrierArray& b, double k) {
    return std::arg(transmission_exact(b, k).t);
}

// Wrap into (-pi, pi].
double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    a = std::fmod(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    if (a > pi) a -= 2.0 * pi;
    return a;
}

// Unwrapped phase increment across a symmetric 3-point stencil. Each
// half-step difference is wrapped independently; a half-step that still
// exceeds pi/2 means the stencil cannot resolve the local phase motion.
double stencil_phase_delta(double phi_lo, double phi_mid, double phi_hi, double step,
                           const char* what) {
    const double d1 = wrap_angle(phi_mid - phi_lo);
    const double d2 = wrap_angle(phi_hi - phi_mid);
    constexpr double pi = std::numbers::pi;
    if (std::abs(d1) > 0.5 * pi || std::abs(d2) > 0.5 * pi) {
        std::ostringstream os;
        os << what << ": phase moves by " << std::abs(d1) + std::abs(d2)
           << " rad across the stencil (step " << step << "); use a smaller step";
        throw StencilError(os.str());
    }
    return d1 + d2;
}

double group_delay_impl(const BarrierArray& b, double k, double dk) {
    const double phi_lo = transmission_phase(b, k - dk);
    const double phi_mid = transmission_phase(b, k);
    const double phi_hi = transmission_phase(b, k + dk);
    const double dphi = stencil_phase_delta(phi_lo, phi_mid, phi_hi, dk, "group_delay");
    // chain rule dE = (hbar^2 k / m) dk
    return (b.mass / (b.hbar * k)) * dphi / (2.0 * dk);
}

double dwell_impl(const BarrierArray& b, double k, double dV) {
    BarrierArray lo = b, hi = b;
    lo.inner_potential = b.inner_potential - dV;
    hi.inner_potential = b.inner_potential + dV;
    const double phi_lo = transmission_phase(lo, k);
    const double phi_mid = transmission_phase(b, k);
    const double phi_hi = transmission_phase(hi, k);
    const double dphi = stencil_phase_delta(phi_lo, phi_mid, phi_hi, dV, "dwell_time");
    return -b.hbar * dphi / (2.0 * dV);
}

} // namespace

double group_delay(const BarrierArray& b, double k, double dk) {
    b.validate();
    if (!(k > dk) || !(dk > 0.0))
        throw DomainError("group_delay requires k > dk > 0");
    return group_delay_impl(b, k, dk);
}

double free_crossing_time(const BarrierArray& b, double k) {
    if (!(k > 0.0)) throw DomainError("free_crossing_time requires k > 0");
    return b.span() * b.mass / (b.hbar * k);
}

double traversal_time(const BarrierArray& b, double k, double dk) {
    return group_delay(b, k, dk) + free_crossing_time(b, k);
}

double dwell_time(const BarrierArray& b, double k, double dV) {
    b.validate();
    if (!(k > 0.0)) throw DomainError("dwell_time requires k > 0");
    if (dV == 0.0) throw DomainError("dwell_time requires a nonzero stencil step dV");
    if (!(dV > 0.0)) throw DomainError("dwell_time requires dV > 0");
    return dwell_impl(b, k, dV);
}

DelayReport delay_report(const BarrierArray& b, double k, double dk, double dV) {
    b.validate();
    if (!(k > 0.0)) throw DomainError("delay_report requires k > 0");
    if (dk <= 0.0) dk = 1e-5 * k;
    const double energy = b.hbar * b.hbar * k * k / (2.0 * b.mass);
    if (dV <= 0.0) dV = 1e-6 * energy;

    DelayReport rep;
    rep.k = k;
    rep.dk = 0.5 * dk;
    rep.dV = 0.5 * dV;
    rep.free_time = free_crossing_time(b, k);

    // error = Richardson difference (truncation) + rounding floor: the
    // stencil phases carry a few dozen ulps of noise, amplified by 1/step
    constexpr double phase_noise = 64.0 * 2.2e-16;

    const double g_h = group_delay_impl(b, k, dk);
    const double g_h2 = group_delay_impl(b, k, 0.5 * dk);
    rep.group_delay = g_h2;
    rep.group_delay_error =
        std::abs(g_h - g_h2) / 3.0 + (b.mass / (b.hbar * k)) * phase_noise / dk;
    rep.traversal_time = rep.group_delay + rep.free_time;

    const double d_h = dwell_impl(b, k, dV);
    const double d_h2 = dwell_impl(b, k, 0.5 * dV);
    rep.dwell_time = d_h2;
    rep.dwell_error = std::abs(d_h - d_h2) / 3.0 + b.hbar * phase_noise / dV;
    return rep;
}

double resonance_distance(const BarrierArray& b, double k) {
    double dist = std::numeric_limits<double>::infinity();
    constexpr double pi = std::numbers::pi;
    for (std::size_t j = 1; j < b.size(); ++j) {
        const double gap = b.positions[j] - b.positions[j - 1];
        const double nearest = std::round(k * gap / pi) * pi / gap;
        dist = std::min(dist, std::abs(k - nearest));
    }
    return dist;
}

} // namespace dsim
