#include "dsim/packets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dsim/errors.hpp"
#include "dsim/quadrature.hpp"
#include "dsim/scatter.hpp"

namespace dsim {

namespace {

constexpr double pi = std::numbers::pi;

// Per-region plane-wave coefficients of all spectral nodes, split re/im for
// the kernels. real_q is false when the region wavenumber is complex.
struct RegionTable {
    double x_lo = 0.0, x_hi = 0.0;
    bool real_q = true;
    std::vector<double> q_re;           // wavenumber per node (real part)
    std::vector<cplx> q;                // full wavenumber (scalar path)
    std::vector<cplx> a, b;             // coefficients per node
};

struct EigenTable {
    std::vector<RegionTable> regions;
    std::size_t region_of(double x) const {
        for (std::size_t r = 0; r + 1 < regions.size(); ++r)
            if (x < regions[r].x_hi) return r;
        return regions.size() - 1;
    }
};

EigenTable build_eigentable(const SpectralTable& tab, const BarrierArray& bar) {
    EigenTable et;
    const std::size_t nk = tab.size();
    const std::size_t nregions = bar.size() + 1;
    et.regions.resize(nregions);
    for (auto& rg : et.regions) {
        rg.q_re.resize(nk);
        rg.q.resize(nk);
        rg.a.resize(nk);
        rg.b.resize(nk);
    }
    for (std::size_t j = 0; j < nk; ++j) {
        const ScatteringResult sr = transmission_exact(bar, tab.k[j]);
        for (std::size_t r = 0; r < nregions; ++r) {
            auto& rg = et.regions[r];
            const auto& src = sr.regions[r];
            if (j == 0) {
                rg.x_lo = src.x_lo;
                rg.x_hi = src.x_hi;
            }
            rg.q[j] = src.wavenumber;
            rg.q_re[j] = src.wavenumber.real();
            if (src.wavenumber.imag() != 0.0) rg.real_q = false;
            rg.a[j] = src.a;
            rg.b[j] = src.b;
        }
    }
    return et;
}

// psi(x, t) for one (x, t) given the per-t spectral factors c_j.
cplx eval_point(const RegionTable& rg, const std::vector<cplx>& c,
                const std::vector<double>& ca_re, const std::vector<double>& ca_im,
                const std::vector<double>& cb_re, const std::vector<double>& cb_im,
                double x, kernels::Backend bk) {
    if (rg.real_q) {
        const std::size_t n = ca_re.size();
        const cplx fwd = kernels::cexp_dot(rg.q_re.data(), ca_re.data(), ca_im.data(), n, x, bk);
        const cplx bwd = kernels::cexp_dot(rg.q_re.data(), cb_re.data(), cb_im.data(), n, -x, bk);
        return fwd + bwd;
    }
    // complex wavenumber: scalar path
    cplx acc{};
    const cplx i{0.0, 1.0};
    for (std::size_t j = 0; j < c.size(); ++j) {
        const cplx e = std::exp(i * rg.q[j] * x);
        acc += c[j] * (rg.a[j] * e + rg.b[j] / e);
    }
    return acc;
}

} // namespace

void WavePacketSpec::validate() const {
    if (!(k0 > 0.0) || !(dk > 0.0))
        throw ValidationError("wave packet: k0 and dk must be positive");
    if (k0 < 5.0 * dk) {
        std::ostringstream os;
        os << "wave packet: k0 = " << k0 << " < 5*dk = " << 5.0 * dk
           << " leaks spectral support to k <= 0";
        throw ValidationError(os.str());
    }
}

SpectralTable synthesize(const WavePacketSpec& spec, std::size_t points, double span) {
    spec.validate();
    if (points < 513) points = 513;
    if (points % 2 == 0) ++points;
    if ((points - 1) % 4 != 0) points += 2;  // keeps the half-density grid odd
    const double lo = std::max(spec.k0 - span * spec.dk, 1e-9 * spec.k0);
    const double hi = spec.k0 + span * spec.dk;

    SpectralTable tab;
    tab.k0 = spec.k0;
    tab.dk = spec.dk;
    tab.k = uniform_grid(lo, hi, points);
    tab.weight = simpson_weights(points, (hi - lo) / static_cast<double>(points - 1));
    tab.g.resize(points);

    double norm2 = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
        const double d = (tab.k[j] - spec.k0) / (2.0 * spec.dk);
        const double val = std::exp(-d * d);
        tab.g[j] = val;
        norm2 += tab.weight[j] * val * val;
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& g : tab.g) g *= scale;
    return tab;
}

FieldSample propagate(const SpectralTable& table, const BarrierArray& bar,
                      const FieldRequest& req, kernels::Backend backend) {
    bar.validate();
    if (table.size() < 3) throw ValidationError("propagate: spectral table too small");
    if (req.x.empty() || req.t.empty())
        throw ValidationError("propagate: empty sample grids");

    const EigenTable et = build_eigentable(table, bar);
    const std::size_t nk = table.size();
    const std::size_t nx = req.x.size();

    FieldSample out;
    out.x = req.x;
    out.t = req.t;
    out.values.resize(nx * req.t.size());

    // region index per x, fixed across t
    std::vector<std::size_t> xregion(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) xregion[ix] = et.region_of(req.x[ix]);

    const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * pi);
    std::vector<cplx> c(nk);
    std::vector<double> ca_re(nk), ca_im(nk), cb_re(nk), cb_im(nk);

    for (std::size_t it = 0; it < req.t.size(); ++it) {
        const double t = req.t[it];
        for (std::size_t j = 0; j < nk; ++j) {
            const double w = bar.hbar * table.k[j] * table.k[j] / (2.0 * bar.mass);
            const cplx ph = std::polar(1.0, -w * t);
            c[j] = inv_sqrt2pi * table.weight[j] * table.g[j] * ph;
        }
        for (std::size_t r = 0; r < et.regions.size(); ++r) {
            bool used = false;
            for (std::size_t ix = 0; ix < nx; ++ix) used |= (xregion[ix] == r);
            if (!used) continue;
            const auto& rg = et.regions[r];
            for (std::size_t j = 0; j < nk; ++j) {
                const cplx ca = c[j] * rg.a[j];
                const cplx cb = c[j] * rg.b[j];
                ca_re[j] = ca.real();
                ca_im[j] = ca.imag();
                cb_re[j] = cb.real();
                cb_im[j] = cb.imag();
            }
            for (std::size_t ix = 0; ix < nx; ++ix) {
                if (xregion[ix] != r) continue;
                out.values[it * nx + ix] =
                    eval_point(rg, c, ca_re, ca_im, cb_re, cb_im, req.x[ix], backend);
            }
        }
    }

    if (req.check_accuracy) {
        if ((nk - 1) % 4 != 0)
            throw ValidationError("propagate: accuracy check needs (points - 1) divisible by 4");
        // re-evaluate a few probes on the half-density grid (every other node)
        SpectralTable half;
        half.k0 = table.k0;
        half.dk = table.dk;
        for (std::size_t j = 0; j < nk; j += 2) {
            half.k.push_back(table.k[j]);
            half.g.push_back(table.g[j]);
        }
        const double h2 = 2.0 * (table.k[1] - table.k[0]);
        half.weight = simpson_weights(half.k.size(), h2);

        double peak = 0.0;
        for (const auto& v : out.values) peak = std::max(peak, std::abs(v));
        FieldRequest probe;
        probe.t = {req.t.front(), req.t[req.t.size() / 2], req.t.back()};
        probe.x = {req.x.front(), req.x[req.x.size() / 2], req.x.back()};
        const FieldSample coarse = propagate(half, bar, probe, backend);
        for (std::size_t it = 0; it < probe.t.size(); ++it) {
            for (std::size_t ix = 0; ix < probe.x.size(); ++ix) {
                // locate matching fine sample
                const auto ixf = std::distance(
                    req.x.begin(), std::find(req.x.begin(), req.x.end(), probe.x[ix]));
                const auto itf = std::distance(
                    req.t.begin(), std::find(req.t.begin(), req.t.end(), probe.t[it]));
                const double diff = std::abs(coarse.at(it, ix) - out.at(itf, ixf));
                if (diff > 1e-5 * std::max(peak, 1e-300)) {
                    std::ostringstream os;
                    os << "quadrature self-check failed: grid-halving changes psi by " << diff
                       << " (relative " << diff / peak << ") at x = " << probe.x[ix]
                       << ", t = " << probe.t[it];
                    throw AccuracyError(os.str());
                }
            }
        }
    }
    return out;
}

cplx free_gaussian(const WavePacketSpec& spec, double x, double t, double mass, double hbar) {
    // psi(x,t) = (2 pi)^{-1/2} Int g(k) e^{ikx - i hbar k^2 t / 2m} dk with
    // g(k) = (2 pi dk^2)^{-1/4} e^{-(k-k0)^2/(4 dk^2)}; Gaussian integral in
    // closed form, principal square root.
    const double a = 1.0 / (4.0 * spec.dk * spec.dk);
    const double b = hbar * t / (2.0 * mass);
    const cplx ab{a, b};
    const double v = hbar * spec.k0 / mass;
    const cplx i{0.0, 1.0};
    const double norm = std::pow(2.0 * pi * spec.dk * spec.dk, -0.25) / std::sqrt(2.0 * pi);
    const cplx gauss = std::exp(i * spec.k0 * x - i * b * spec.k0 * spec.k0 -
                                (x - v * t) * (x - v * t) / (4.0 * ab));
    return norm * std::sqrt(pi / ab) * gauss;
}

cplx free_gaussian_dx(const WavePacketSpec& spec, double x, double t, double mass, double hbar) {
    const double a = 1.0 / (4.0 * spec.dk * spec.dk);
    const double b = hbar * t / (2.0 * mass);
    const cplx ab{a, b};
    const double v = hbar * spec.k0 / mass;
    const cplx i{0.0, 1.0};
    const cplx dlog = i * spec.k0 - (x - v * t) / (2.0 * ab);
    return dlog * free_gaussian(spec, x, t, mass, hbar);
}

double field_norm(const FieldSample& f, std::size_t t_index) {
    const std::size_t nx = f.nx();
    if (nx < 3 || nx % 2 == 0)
        throw DomainError("field_norm needs an odd number of x samples >= 3");
    const double h = (f.x.back() - f.x.front()) / static_cast<double>(nx - 1);
    const auto w = simpson_weights(nx, h);
    return kernels::weighted_abs2(w.data(), f.values.data() + t_index * nx, nx);
}

ArrivalDistribution arrival_distribution(const FieldSample& f, double x_star) {
    const std::size_t nt = f.nt();
    if (nt < 5 || nt % 2 == 0)
        throw DomainError("arrival_distribution needs an odd number of t samples >= 5");
    auto it = std::find(f.x.begin(), f.x.end(), x_star);
    if (it == f.x.end())
        throw ValidationError("arrival_distribution: x_star is not a grid point");
    const std::size_t ix = static_cast<std::size_t>(std::distance(f.x.begin(), it));

    ArrivalDistribution dist;
    dist.t = f.t;
    dist.density.resize(nt);
    double peak_val = 0.0;
    std::size_t peak_idx = 0;
    for (std::size_t j = 0; j < nt; ++j) {
        const double d = std::norm(f.at(j, ix));
        dist.density[j] = d;
        if (d > peak_val) {
            peak_val = d;
            peak_idx = j;
        }
    }
    if (peak_val <= 0.0) throw ValidationError("arrival_distribution: field vanishes at x_star");
    if (dist.density.front() > 1e-3 * peak_val || dist.density.back() > 1e-3 * peak_val) {
        std::ostringstream os;
        os << "arrival window does not contain the packet: endpoint densities "
           << dist.density.front() / peak_val << ", " << dist.density.back() / peak_val
           << " of the peak";
        throw WindowError(os.str());
    }

    const double ht = (f.t.back() - f.t.front()) / static_cast<double>(nt - 1);
    const auto w = simpson_weights(nt, ht);
    double mass = 0.0, moment = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
        mass += w[j] * dist.density[j];
        moment += w[j] * dist.density[j] * f.t[j];
    }
    for (auto& d : dist.density) d /= mass;
    dist.mean_time = moment / mass;

    // sub-grid peak: quadratic through the maximum and its neighbors
    if (peak_idx == 0 || peak_idx + 1 == nt) {
        dist.peak_time = f.t[peak_idx];
    } else {
        const double ym = dist.density[peak_idx - 1] * mass;
        const double y0 = dist.density[peak_idx] * mass;
        const double yp = dist.density[peak_idx + 1] * mass;
        const double denom = ym - 2.0 * y0 + yp;
        const double shift = (denom == 0.0) ? 0.0 : 0.5 * (ym - yp) / denom;
        dist.peak_time = f.t[peak_idx] + shift * ht;
    }
    return dist;
}

double shape_correlation(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size() || a.empty())
        throw ValidationError("shape_correlation: size mismatch or empty profiles");
    std::vector<double> ones(a.size(), 1.0);
    const double na = kernels::weighted_abs2(ones.data(), a.data(), a.size());
    const double nb = kernels::weighted_abs2(ones.data(), b.data(), b.size());
    if (na <= 0.0 || nb <= 0.0) throw ValidationError("shape_correlation: zero-norm profile");
    const cplx dot = kernels::weighted_cdot(ones.data(), a.data(), b.data(), a.size());
    return std::abs(dot) / std::sqrt(na * nb);
}

FlatnessReport spectral_flatness(const BarrierArray& b, double k0, double band,
                                 std::size_t points) {
    b.validate();
    if (!(band > 0.0)) throw DomainError("spectral_flatness requires band > 0");
    if (points < 128) points = 129;
    if (points % 2 == 0) ++points;
    const double lo = k0 - band, hi = k0 + band;
    if (!(lo > 0.0)) throw DomainError("spectral_flatness: band extends to k <= 0");

    FlatnessReport rep;
    rep.band = band;
    const double ln = b.size() ? b.positions.back() : 0.0;
    const cplx i{0.0, 1.0};

    const auto grid = uniform_grid(lo, hi, points);
    std::vector<double> mag(points), phase(points);
    for (std::size_t j = 0; j < points; ++j) {
        const cplx tau = transmission_exact(b, grid[j]).t * std::exp(i * grid[j] * ln);
        mag[j] = std::abs(tau);
        phase[j] = std::arg(tau);
    }
    // unwrap the phase along the grid
    for (std::size_t j = 1; j < points; ++j) {
        double d = phase[j] - phase[j - 1];
        while (d > pi) d -= 2.0 * pi;
        while (d <= -pi) d += 2.0 * pi;
        phase[j] = phase[j - 1] + d;
    }

    const double mag0 = mag[points / 2];
    for (std::size_t j = 0; j < points; ++j)
        rep.magnitude_deviation = std::max(rep.magnitude_deviation, std::abs(mag[j] / mag0 - 1.0));

    // least-squares line through (k, phase)
    double sk = 0, sp = 0, skk = 0, skp = 0;
    for (std::size_t j = 0; j < points; ++j) {
        sk += grid[j];
        sp += phase[j];
        skk += grid[j] * grid[j];
        skp += grid[j] * phase[j];
    }
    const double n = static_cast<double>(points);
    const double slope = (n * skp - sk * sp) / (n * skk - sk * sk);
    const double icept = (sp - slope * sk) / n;
    for (std::size_t j = 0; j < points; ++j)
        rep.phase_residual =
            std::max(rep.phase_residual, std::abs(phase[j] - slope * grid[j] - icept));

    // resonances: any gap with sin(k * gap) crossing zero inside the band
    for (std::size_t j = 1; j < b.size(); ++j) {
        const double gap = b.positions[j] - b.positions[j - 1];
        if (std::floor(lo * gap / pi) != std::floor(hi * gap / pi)) rep.resonance_in_band = true;
    }
    return rep;
}

} // namespace dsim
