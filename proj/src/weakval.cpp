#include "dsim/weakval.hpp"

#include <cmath>
#include <sstream>

#include "dsim/errors.hpp"
#include "dsim/kernels.hpp"
#include "dsim/quadrature.hpp"

namespace dsim {

namespace {

double vec_norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

} // namespace

void WeakValueProblem::validate() const {
    if (dim < 2) throw ValidationError("weak value: dim must be >= 2");
    if (pre.size() != dim || post.size() != dim || op.size() != dim * dim)
        throw ValidationError("weak value: vector/matrix sizes do not match dim");
    if (std::abs(vec_norm(pre) - 1.0) > 1e-12 || std::abs(vec_norm(post) - 1.0) > 1e-12)
        throw ValidationError("weak value: states must be unit-normalized (1e-12)");
    double scale = 0.0;
    for (const auto& c : op) scale = std::max(scale, std::abs(c));
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            if (std::abs(op[r * dim + c] - std::conj(op[c * dim + r])) >
                1e-12 * std::max(scale, 1.0))
                throw ValidationError("weak value: operator is not Hermitian (1e-12)");
}

cplx weak_value(const WeakValueProblem& p) {
    p.validate();
    cplx overlap{};
    for (std::size_t j = 0; j < p.dim; ++j) overlap += std::conj(p.post[j]) * p.pre[j];
    if (std::abs(overlap) < 1e-12)
        throw PostSelectionError("weak value: pre and post states are orthogonal");
    cplx num{};
    for (std::size_t r = 0; r < p.dim; ++r) {
        cplx row{};
        for (std::size_t c = 0; c < p.dim; ++c) row += p.op[r * p.dim + c] * p.pre[c];
        num += std::conj(p.post[r]) * row;
    }
    return num / overlap;
}

std::pair<cplx, cplx> construct_states(cplx z, double a1, double a2) {
    if (a1 == a2) throw DomainError("construct_states: eigenvalues must differ");
    if (z == cplx(a1, 0.0)) return {1.0, 0.0};
    if (z == cplx(a2, 0.0)) return {0.0, 1.0};
    // (alpha1 a1 + alpha2 a2) / (alpha1 + alpha2) = z
    const cplx ratio = (z - a1) / (cplx(a2, 0.0) - z);
    const double scale = std::sqrt(1.0 + std::norm(ratio));
    return {1.0 / scale, ratio / scale};
}

DwellWeakResult dwell_weak_integral(const DwellIntegralSpec& spec) {
    spec.barriers.validate();
    spec.packet.validate();
    if (!(spec.region_hi >= spec.region_lo))
        throw ValidationError("dwell integral: region_hi < region_lo");
    if (!(spec.t_hi > spec.t_lo))
        throw ValidationError("dwell integral: empty time window");
    if (!(spec.denom_hi > spec.denom_lo))
        throw ValidationError("dwell integral: empty denominator grid");
    if (spec.t_ref < spec.t_lo || spec.t_ref > spec.t_hi)
        throw ValidationError("dwell integral: t_ref outside the window");

    const SpectralTable gi = synthesize(spec.packet, spec.spectral_points);
    // post-selection: free packet riding the transmitted trajectory,
    // g_f(k) = g(k) e^{-i k L_n}
    SpectralTable gf = gi;
    const double ln = spec.barriers.size() ? spec.barriers.positions.back() : 0.0;
    const cplx i{0.0, 1.0};
    for (std::size_t j = 0; j < gf.size(); ++j) gf.g[j] *= std::exp(-i * gf.k[j] * ln);

    BarrierArray free_line;
    free_line.mass = spec.barriers.mass;
    free_line.hbar = spec.barriers.hbar;

    DwellWeakResult out;

    // denominator: full-line overlap at the reference times, plus coverage check
    {
        FieldRequest dreq;
        dreq.x = uniform_grid(spec.denom_lo, spec.denom_hi,
                              spec.denom_points % 2 ? spec.denom_points : spec.denom_points + 1);
        dreq.t = {spec.t_ref, spec.t_ref_check};
        const FieldSample fi = propagate(gi, spec.barriers, dreq);
        const FieldSample ff = propagate(gf, free_line, dreq);
        const std::size_t nx = dreq.x.size();
        const double h = (spec.denom_hi - spec.denom_lo) / static_cast<double>(nx - 1);
        const auto w = simpson_weights(nx, h);
        const double cover = kernels::weighted_abs2(w.data(), fi.values.data(), nx);
        if (cover < 0.999) {
            std::ostringstream os;
            os << "denominator grid covers only " << cover << " of the incident packet";
            throw WindowError(os.str());
        }
        const cplx d1 = kernels::weighted_cdot(w.data(), ff.values.data(), fi.values.data(), nx);
        const cplx d2 =
            kernels::weighted_cdot(w.data(), ff.values.data() + nx, fi.values.data() + nx, nx);
        out.denominator = d1;
        out.denominator_drift = std::abs(d2 - d1) / std::max(std::abs(d1), 1e-300);
        if (std::abs(d1) < 1e-10)
            throw PostSelectionError("dwell integral: post-selected overlap below 1e-10");
    }

    // numerator: time-Simpson of the region overlap
    if (spec.region_hi > spec.region_lo) {
        const std::size_t nx = spec.region_points % 2 ? spec.region_points : spec.region_points + 1;
        const std::size_t nt = spec.t_points % 2 ? spec.t_points : spec.t_points + 1;
        FieldRequest nreq;
        nreq.x = uniform_grid(spec.region_lo, spec.region_hi, nx);
        nreq.t = uniform_grid(spec.t_lo, spec.t_hi, nt);
        const FieldSample fi = propagate(gi, spec.barriers, nreq);
        const FieldSample ff = propagate(gf, free_line, nreq);

        const double hx = (spec.region_hi - spec.region_lo) / static_cast<double>(nx - 1);
        const auto wx = simpson_weights(nx, hx);
        const double ht = (spec.t_hi - spec.t_lo) / static_cast<double>(nt - 1);
        const auto wt = simpson_weights(nt, ht);

        out.edge_mass_incident =
            std::max(kernels::weighted_abs2(wx.data(), fi.values.data(), nx),
                     kernels::weighted_abs2(wx.data(), fi.values.data() + (nt - 1) * nx, nx));
        out.edge_mass_post =
            std::max(kernels::weighted_abs2(wx.data(), ff.values.data(), nx),
                     kernels::weighted_abs2(wx.data(), ff.values.data() + (nt - 1) * nx, nx));
        if (out.edge_mass_incident > spec.edge_mass_tolerance ||
            out.edge_mass_post > spec.edge_mass_tolerance) {
            std::ostringstream os;
            os << "time window too short: region masses at the endpoints are "
               << out.edge_mass_incident << " (incident), " << out.edge_mass_post
               << " (post-selected); tolerance " << spec.edge_mass_tolerance;
            throw WindowError(os.str());
        }

        cplx num{};
        for (std::size_t it = 0; it < nt; ++it) {
            const cplx slab = kernels::weighted_cdot(wx.data(), ff.values.data() + it * nx,
                                                     fi.values.data() + it * nx, nx);
            num += wt[it] * slab;
        }
        out.numerator = num;
    } else {
        out.numerator = 0.0;  // zero-length region
    }

    out.value = out.numerator / out.denominator;
    return out;
}

PointerShift pointer_shift(cplx weak_integral, double sigma_tau, double hbar) {
    if (!(sigma_tau > 0.0)) throw DomainError("pointer_shift requires sigma_tau > 0");
    if (!(hbar > 0.0)) throw DomainError("pointer_shift requires hbar > 0");
    PointerShift ps;
    const double dp = hbar / (2.0 * sigma_tau);  // Gaussian pointer momentum spread
    ps.coupling_ratio = std::abs(weak_integral) * dp / hbar;
    if (ps.coupling_ratio >= 0.1) {
        std::ostringstream os;
        os << "first-order pointer expansion invalid: |A_W| dP/hbar = " << ps.coupling_ratio
           << " >= 0.1";
        throw PerturbationError(os.str());
    }
    ps.shift = weak_integral.real();
    ps.momentum_diagnostic = weak_integral.imag();
    return ps;
}

} // namespace dsim
