// Canonical desk-scale reproductions behind `deltasim reproduce <claim-id>`.
// Every threshold here is pinned; the acceptance suite runs the same bars.

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dsim/delays.hpp"
#include "dsim/driver.hpp"
#include "dsim/errors.hpp"
#include "dsim/kernels.hpp"
#include "dsim/packets.hpp"
#include "dsim/quadrature.hpp"
#include "dsim/scatter.hpp"
#include "dsim/superosc.hpp"
#include "dsim/version.hpp"
#include "dsim/weakval.hpp"

namespace dsim {

namespace {

constexpr double pi = std::numbers::pi;

struct ClaimBuilder {
    ClaimOutcome out;

    explicit ClaimBuilder(const std::string& id) {
        out.claim = id;
        out.pass = true;
        out.table.meta = {std::string("deltasim ") + kVersion, "claim: " + id};
        out.table.columns = {"check", "value", "threshold", "pass"};
    }

    // op: "<=" value within threshold, ">=" value above threshold
    void check(const std::string& name, double value, double threshold, bool leq = true) {
        const bool ok = leq ? (value <= threshold) : (value >= threshold);
        out.pass = out.pass && ok;
        out.table.rows.push_back(
            {name, format_double(value), format_double(threshold), ok ? "1" : "0"});
        std::ostringstream line;
        line << "  " << name << ": " << format_double(value) << (leq ? " <= " : " >= ")
             << format_double(threshold) << "  " << (ok ? "ok" : "FAIL");
        out.lines.push_back(line.str());
    }
};

BarrierArray two_spike_scene() {
    BarrierArray b;
    b.positions = {0.0, 1.0};
    b.strengths = {1000.0, 1000.0};
    return b;
}

// n = 8 spikes over [0, 1]: at the bandwidth-rule edge dk = sqrt(n-1)/(3L)
// this scene keeps the packet band clear of gap resonances (first at 7 pi)
// and sits closest to the large-n correlation asymptote.
BarrierArray bandwidth_scene() { return BarrierArray::equally_spaced(8, 1.0, 2000.0); }

double packet_shape_score(const BarrierArray& scene, double k0, double dk, double t_pass,
                          double x_hi, std::size_t x_points, std::size_t spectral_points) {
    const WavePacketSpec spec{k0, dk};
    const SpectralTable tab = synthesize(spec, spectral_points);
    const double ln = scene.positions.back();
    FieldRequest req;
    req.x = uniform_grid(ln, x_hi, x_points);
    req.t = {t_pass};
    const FieldSample f = propagate(tab, scene, req);
    std::vector<cplx> transmitted(f.values.begin(), f.values.end());
    std::vector<cplx> reference(req.x.size());
    for (std::size_t i = 0; i < req.x.size(); ++i)
        reference[i] = free_gaussian_dx(spec, req.x[i] - ln, t_pass);
    return shape_correlation(transmitted, reference);
}

ClaimOutcome claim_zero_traversal() {
    ClaimBuilder cb("zero-traversal");
    const BarrierArray scene = two_spike_scene();
    const auto grid = uniform_grid(0.05, 0.3, 26);
    double worst = 0.0;
    for (const double k : grid) {
        const DelayReport rep = delay_report(scene, k);
        worst = std::max(worst, std::abs(rep.traversal_time) / rep.free_time);
    }
    cb.check("max |tau_g + L/v| / (L/v) over k in [0.05, 0.3]", worst, 0.02);
    return cb.out;
}

ClaimOutcome claim_zero_dwell() {
    ClaimBuilder cb("zero-dwell");
    const BarrierArray scene = two_spike_scene();
    const auto grid = uniform_grid(0.05, 0.3, 26);
    double worst = 0.0;
    for (const double k : grid) {
        const DelayReport rep = delay_report(scene, k);
        worst = std::max(worst, std::abs(rep.dwell_time) / rep.free_time);
    }
    cb.check("max |dwell| / (L/v) over k in [0.05, 0.3]", worst, 0.05);

    BarrierArray control;  // pure V0 region marked by zero-strength spikes
    control.positions = {0.0, 1.0};
    control.strengths = {0.0, 0.0};
    const double k = 1.0;
    const DelayReport rep = delay_report(control, k);
    const double lv = rep.free_time;
    cb.check("free-particle control |dwell - L/v| / (L/v)",
             std::abs(rep.dwell_time - lv) / lv, 0.01);
    return cb.out;
}

ClaimOutcome claim_derivative_shape() {
    ClaimBuilder cb("derivative-shape");
    const BarrierArray scene = bandwidth_scene();
    const double bw = max_bandwidth(scene.size(), scene.span());
    const double dk = bw / 3.0;           // sqrt(n-1)/(3L)
    const double k0 = 5.0 * dk;           // smallest center the k > 0 support allows

    // The k0 >= 5 dk support constraint fixes the first-order spectral tilt
    // of C(k) at k0 L dk / (3 (n-1)) >= 5/27 across the band, which caps
    // this correlation near 0.98 for every admissible scene; the 0.99 bar
    // is not reachable. Kept as specified; see the README's known limits.
    const double score = packet_shape_score(scene, k0, dk, 6.0, 57.0, 1121, 1105);
    cb.check("transmitted profile vs d/dx of free envelope", score, 0.99, false);

    // peak arrival of the transmitted packet at x = L_n vs the free packet
    // at x = 0 (same spectral envelope)
    const WavePacketSpec spec{k0, dk};
    const SpectralTable tab = synthesize(spec, 1105);
    FieldRequest req;
    req.x = {scene.positions.back()};
    req.t = uniform_grid(-1.0, 1.0, 401);
    const FieldSample trans = propagate(tab, scene, req);
    const ArrivalDistribution at_exit = arrival_distribution(trans, req.x[0]);

    BarrierArray free_line;
    FieldRequest freq_free;
    freq_free.x = {0.0};
    freq_free.t = req.t;
    const FieldSample free_f = propagate(tab, free_line, freq_free);
    const ArrivalDistribution at_origin = arrival_distribution(free_f, 0.0);

    const double lv = scene.span() * scene.mass / (scene.hbar * k0);
    cb.check("|transmitted peak time at L_n - free peak time at 0| / (L/v)",
             std::abs(at_exit.peak_time - at_origin.peak_time) / lv, 0.1);
    return cb.out;
}

ClaimOutcome claim_bandwidth_rule() {
    ClaimBuilder cb("bandwidth-rule");
    const BarrierArray scene = bandwidth_scene();
    const double bw = max_bandwidth(scene.size(), scene.span());

    // narrow edge: same structural 0.98 cap as the derivative-shape claim
    const double narrow =
        packet_shape_score(scene, 5.0 * bw / 3.0, bw / 3.0, 6.0, 57.0, 1121, 1105);
    cb.check("score at dk = bandwidth/3", narrow, 0.99, false);

    // wide case: the band sweeps across gap resonances and C(k) is anything
    // but constant (spectral nodes sized so k-phases stay resolved at x_hi)
    const double wide =
        packet_shape_score(scene, 15.0 * bw, 3.0 * bw, 0.35, 29.0, 2801, 5137);
    cb.check("score at dk = 3*bandwidth", wide, 0.95);
    return cb.out;
}

ClaimOutcome claim_superosc_band() {
    ClaimBuilder cb("superosc-band");
    const SuperoscSpec spec{20, 5.0, 1.0};

    const cplx f0 = f_eval(spec, 0.0);
    cb.check("|F(0) - 1|", std::abs(f0 - cplx(1.0, 0.0)), 0.0);

    const double dk = 1e-3;
    const double lw0 = local_wavenumber(spec, 0.0, dk);
    cb.check("|local wavenumber(0) + L|", std::abs(lw0 + spec.L), 10.0 * dk * dk);

    const double kstar = pi * spec.N / (2.0 * spec.x0);
    const double ceiling = band_and_growth(spec).growth_ceiling;
    cb.check("| |F(pi N / 2 x0)| - (L/x0)^N | / (L/x0)^N",
             std::abs(std::abs(f_eval(spec, kstar)) - ceiling) / ceiling, 1e-10);

    const double band = band_and_growth(spec).band;
    double worst = 0.0;
    const cplx i{0.0, 1.0};
    for (const double k : uniform_grid(0.01 * band, 0.2 * band, 21)) {
        const double bound = k * k * (spec.L * spec.L - spec.x0 * spec.x0) / spec.N;
        const double dev = std::abs(f_eval(spec, k) - std::exp(-i * k * spec.L));
        worst = std::max(worst, dev / bound);
    }
    cb.check("max |F - e^{-ikL}| / bound for k <= 0.2*band", worst, 1.0);
    return cb.out;
}

ClaimOutcome claim_fabry_equivalence() {
    ClaimBuilder cb("fabry-equivalence");
    BarrierArray pair;
    pair.positions = {0.0, 0.7};
    pair.strengths = {2.0, 2.0};

    double worst_series = 0.0, worst_match = 0.0, max_rho = 0.0;
    for (const double k : uniform_grid(0.5, 2.0, 100)) {
        FabryPerotSpec fp;
        fp.k = k;
        fp.L = 0.7;
        fp.terms = 600;
        fp.beta = pair.mass * 2.0 / (cplx(0.0, 1.0) * pair.hbar * pair.hbar * k);
        const auto sum = fabry_perot_sum(fp);
        max_rho = std::max(max_rho, sum.rho);
        const double bound =
            std::norm(1.0 / (1.0 + fp.beta)) * std::pow(sum.rho, fp.terms) / (1.0 - sum.rho) +
            1e-15;
        worst_series = std::max(worst_series,
                                std::abs(sum.exact_partial - sum.exact_closed) / bound);
        worst_match =
            std::max(worst_match, std::abs(sum.exact_closed - transmission_exact(pair, k).t));
    }
    cb.check("max rho over grid", max_rho, 0.95);
    cb.check("max series remainder / geometric bound", worst_series, 1.0);
    cb.check("max |closed form - exact transmission|", worst_match, 1e-12);
    return cb.out;
}

ClaimOutcome claim_weak_any_z() {
    ClaimBuilder cb("weak-any-z");
    const double a1 = 0.0, a2 = 1.0;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> re(-3.0, 4.0), im(-3.0, 3.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const cplx z{re(rng), im(rng)};
        const auto [al1, al2] = construct_states(z, a1, a2);
        WeakValueProblem p;
        p.dim = 2;
        p.pre = {al1, al2};
        p.post = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
        p.op = {cplx(a1, 0.0), 0.0, 0.0, cplx(a2, 0.0)};
        worst = std::max(worst, std::abs(weak_value(p) - z));
    }
    cb.check("max |weak_value(construct_states(z)) - z| over 100 random z", worst, 1e-12);
    return cb.out;
}

ClaimOutcome claim_weak_dwell_zero() {
    ClaimBuilder cb("weak-dwell-zero");

    // free control: no spikes, region [0, 5], expect the crossing time L/v
    {
        DwellIntegralSpec d;
        d.packet = {1.0, 0.05};
        d.region_lo = 0.0;
        d.region_hi = 5.0;
        d.region_points = 129;
        d.t_lo = -150.0;
        d.t_hi = 150.0;
        d.t_points = 301;
        d.denom_lo = -80.0;
        d.denom_hi = 80.0;
        d.denom_points = 1281;
        d.t_ref = 0.0;
        d.t_ref_check = 20.0;
        const auto res = dwell_weak_integral(d);
        const double lv = 5.0;  // region width / group velocity
        cb.check("free control |E - L/v| / (L/v)", std::abs(res.value.real() - lv) / lv, 0.05);
        cb.check("free control denominator drift", res.denominator_drift, 1e-6);
        cb.check("free control |Im E| / (L/v)", std::abs(res.value.imag()) / lv, 0.05);
    }

    // tunneling configuration
    {
        DwellIntegralSpec d;
        d.barriers = two_spike_scene();
        d.packet = {0.1, 0.02};
        d.region_lo = 0.0;
        d.region_hi = 1.0;
        d.region_points = 101;
        d.t_lo = -3000.0;
        d.t_hi = 3000.0;
        d.t_points = 601;
        d.denom_lo = -200.0;
        d.denom_hi = 200.0;
        d.denom_points = 1601;
        d.t_ref = 0.0;
        d.t_ref_check = 100.0;
        const auto res = dwell_weak_integral(d);
        const double lv = 1.0 / 0.1;  // L / v at k0
        cb.check("tunneling |Re E| / (L/v)", std::abs(res.value.real()) / lv, 0.1);
        const auto ps = pointer_shift(res.value, 10.0);
        cb.check("pointer coupling ratio", ps.coupling_ratio, 0.1);
    }
    return cb.out;
}

} // namespace

const std::vector<std::string>& claim_ids() {
    static const std::vector<std::string> ids = {
        "zero-traversal", "zero-dwell",        "derivative-shape", "bandwidth-rule",
        "superosc-band",  "fabry-equivalence", "weak-any-z",       "weak-dwell-zero"};
    return ids;
}

ClaimOutcome reproduce_claim(const std::string& claim_id) {
    // pinned to the scalar reference so the emitted tables are byte-stable
    kernels::BackendGuard guard(kernels::Backend::scalar);
    if (claim_id == "zero-traversal") return claim_zero_traversal();
    if (claim_id == "zero-dwell") return claim_zero_dwell();
    if (claim_id == "derivative-shape") return claim_derivative_shape();
    if (claim_id == "bandwidth-rule") return claim_bandwidth_rule();
    if (claim_id == "superosc-band") return claim_superosc_band();
    if (claim_id == "fabry-equivalence") return claim_fabry_equivalence();
    if (claim_id == "weak-any-z") return claim_weak_any_z();
    if (claim_id == "weak-dwell-zero") return claim_weak_dwell_zero();
    throw ValidationError("unknown claim id: " + claim_id);
}

} // namespace dsim
