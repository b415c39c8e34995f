#include "dsim/scatter.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dsim/errors.hpp"

namespace dsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_k(double k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw DomainError("scattering requires a finite wavenumber k > 0");
}

// Refraction factor at position P between wavenumbers p (left) and q (right)
// with a spike of strength alpha sitting on the interface. In the local
// (u, v) = (A e^{ipP}, B e^{-ipP}) variables the factor is
//   1/2 * [[1 + q/p + 2*bp, 1 - q/p + 2*bp], [1 - q/p - 2*bp, 1 + q/p - 2*bp]]
// with bp = m*alpha/(i hbar^2 p); it reduces to the pure spike factor for
// q = p and to the textbook refraction matrix for alpha = 0. det = q/p, so
// chains starting and ending at the same wavenumber keep det(M) = 1.
Mat2c boundary_factor(double m, double hbar, double alpha, double position,
                      cplx p, cplx q) {
    const cplx bp = m * alpha / (cplx(0.0, 1.0) * hbar * hbar * p);
    const cplx ratio = q / p;
    Mat2c g;
    g.m11 = 0.5 * (1.0 + ratio + 2.0 * bp);
    g.m12 = 0.5 * (1.0 - ratio + 2.0 * bp);
    g.m21 = 0.5 * (1.0 - ratio - 2.0 * bp);
    g.m22 = 0.5 * (1.0 + ratio - 2.0 * bp);

    const cplx i{0.0, 1.0};
    const cplx el = std::exp(-i * p * position);   // diag(e^{-ipP}, e^{ipP})
    const cplx er = std::exp(i * q * position);    // diag(e^{iqP}, e^{-iqP})
    Mat2c f;
    f.m11 = el * g.m11 * er;
    f.m12 = el * g.m12 / er;
    f.m21 = g.m21 * er / el;
    f.m22 = g.m22 / (el * er);
    return f;
}

// Wavenumber of region j (0-based; region 0 left of everything).
cplx region_wavenumber(const BarrierArray& b, std::size_t j, double k) {
    const std::size_t n = b.size();
    if (b.inner_potential == 0.0 || n < 2 || j == 0 || j >= n) return cplx(k, 0.0);
    return inner_wavenumber(b, k);
}

} // namespace

cplx inner_wavenumber(const BarrierArray& b, double k) {
    const double arg = k * k - 2.0 * b.mass * b.inner_potential / (b.hbar * b.hbar);
    // principal sqrt: positive real for arg > 0, +i sqrt|arg| for arg < 0
    return std::sqrt(cplx(arg, 0.0));
}

cplx beta_coefficient(const BarrierArray& b, std::size_t i, double k) {
    require_positive_k(k);
    const cplx p = region_wavenumber(b, i, k);  // region left of spike i (0-based)
    return b.mass * b.strengths.at(i) / (cplx(0.0, 1.0) * b.hbar * b.hbar * p);
}

Mat2c transfer_matrix(const BarrierArray& b, double k) {
    b.validate();
    require_positive_k(k);
    Mat2c m = Mat2c::identity();
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx p = region_wavenumber(b, i, k);
        const cplx q = region_wavenumber(b, i + 1, k);
        m = m * boundary_factor(b.mass, b.hbar, b.strengths[i], b.positions[i], p, q);
    }
    return m;
}

cplx ScatteringResult::psi(double x) const {
    for (const auto& rg : regions) {
        if (x < rg.x_hi || &rg == &regions.back()) {
            const cplx i{0.0, 1.0};
            return rg.a * std::exp(i * rg.wavenumber * x) + rg.b * std::exp(-i * rg.wavenumber * x);
        }
    }
    return {};
}

cplx ScatteringResult::dpsi(double x) const {
    for (const auto& rg : regions) {
        if (x < rg.x_hi || &rg == &regions.back()) {
            const cplx i{0.0, 1.0};
            const cplx q = rg.wavenumber;
            return i * q * (rg.a * std::exp(i * q * x) - rg.b * std::exp(-i * q * x));
        }
    }
    return {};
}

ScatteringResult transmission_exact(const BarrierArray& b, double k) {
    b.validate();
    require_positive_k(k);

    const std::size_t n = b.size();
    ScatteringResult res;
    res.k = k;

    if (n == 0) {
        res.t = 1.0;
        res.r = 0.0;
        res.regions.push_back({1.0, 0.0, cplx(k, 0.0), -kInf, kInf});
        return res;
    }

    // factors and composite
    std::vector<Mat2c> factors(n);
    Mat2c m = Mat2c::identity();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx p = region_wavenumber(b, i, k);
        const cplx q = region_wavenumber(b, i + 1, k);
        factors[i] = boundary_factor(b.mass, b.hbar, b.strengths[i], b.positions[i], p, q);
        m = m * factors[i];
    }

    const double scale = std::max({std::abs(m.m11), std::abs(m.m12), std::abs(m.m21),
                                   std::abs(m.m22), 1.0});
    if (std::abs(m.m11) < 1e-14 * scale) {
        std::ostringstream os;
        os << "transmission amplitude singular at k = " << k << " (|M11| ~ " << std::abs(m.m11)
           << ")";
        throw SingularityError(os.str());
    }

    res.t = 1.0 / m.m11;
    res.r = m.m21 / m.m11;

    // back-substitute region coefficients from the right, (C, D) = (t, 0)
    res.regions.resize(n + 1);
    cplx a = res.t, bb = 0.0;
    res.regions[n] = {a, bb, region_wavenumber(b, n, k), b.positions[n - 1], kInf};
    for (std::size_t i = n; i-- > 0;) {
        auto [na, nb] = factors[i].apply(a, bb);
        a = na;
        bb = nb;
        const double lo = (i == 0) ? -kInf : b.positions[i - 1];
        res.regions[i] = {a, bb, region_wavenumber(b, i, k), lo, b.positions[i]};
    }
    return res;
}

cplx transmission_low_energy(const BarrierArray& b, double k, double sin_tolerance) {
    b.validate();
    require_positive_k(k);
    if (b.inner_potential != 0.0)
        throw DomainError("low-energy product formula is defined for V0 = 0 only");

    const std::size_t n = b.size();
    if (n == 0) return 1.0;

    const cplx i{0.0, 1.0};
    cplx amp = 1.0;
    for (std::size_t j = 0; j < n; ++j) amp /= beta_coefficient(b, j, k);
    amp *= std::exp(-i * k * b.positions.back());
    for (std::size_t j = 1; j < n; ++j) {
        const double gap = b.positions[j] - b.positions[j - 1];
        const double s = std::sin(k * gap);
        if (std::abs(s) <= sin_tolerance) {
            std::ostringstream os;
            os << "low-energy formula pole: |sin(k*dL)| = " << std::abs(s) << " at k = " << k
               << ", gap = " << gap << " (use the exact route near resonances)";
            throw ResonanceError(os.str());
        }
        amp /= (-2.0 * i) * s;
    }
    return amp;
}

std::optional<std::string> low_energy_warning(const BarrierArray& b, double k) {
    require_positive_k(k);
    if (b.size() == 0) return std::nullopt;
    double min_beta = kInf;
    for (std::size_t j = 0; j < b.size(); ++j)
        min_beta = std::min(min_beta, std::abs(beta_coefficient(b, j, k)));
    const double bound = 10.0 * static_cast<double>(b.size());
    if (min_beta < bound) {
        std::ostringstream os;
        os << "opaque-regime premise weak: min|beta| = " << min_beta << " < " << bound;
        return os.str();
    }
    return std::nullopt;
}

cplx packet_coefficient(const BarrierArray& b, double k) {
    b.validate();
    if (k == 0.0) throw DomainError("packet coefficient undefined at k = 0");
    require_positive_k(k);
    const cplx i{0.0, 1.0};
    const double ln = b.size() ? b.positions.back() : 0.0;
    return transmission_exact(b, k).t * std::exp(i * k * ln) / (-i * k);
}

cplx packet_coefficient_low_energy(const BarrierArray& b, double k, double sin_tolerance) {
    b.validate();
    if (k == 0.0) throw DomainError("packet coefficient undefined at k = 0");
    require_positive_k(k);
    const cplx i{0.0, 1.0};
    const double ln = b.size() ? b.positions.back() : 0.0;
    return transmission_low_energy(b, k, sin_tolerance) * std::exp(i * k * ln) / (-i * k);
}

double max_bandwidth(std::size_t n, double span) {
    if (n < 2) throw DomainError("max_bandwidth requires n >= 2 spikes");
    if (!(span > 0.0)) throw DomainError("max_bandwidth requires span > 0");
    return std::sqrt(static_cast<double>(n - 1)) / span;
}

} // namespace dsim
