#include "dsim/superosc.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dsim/errors.hpp"

namespace dsim {

namespace {

constexpr double pi = std::numbers::pi;

double coeff_minus(const SuperoscSpec& s) { return 0.5 * (1.0 - s.L / s.x0); }
double coeff_plus(const SuperoscSpec& s) { return 0.5 * (1.0 + s.L / s.x0); }

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    if (a > pi) a -= 2.0 * pi;
    return a;
}

} // namespace

void SuperoscSpec::validate() const {
    if (N < 1) throw ValidationError("superosc: N must be a positive integer");
    if (!(x0 > 0.0)) throw ValidationError("superosc: x0 must be positive");
    if (!std::isfinite(L)) throw ValidationError("superosc: L must be finite");
}

cplx so_bracket(const SuperoscSpec& s, double k) {
    const double theta = k * s.x0 / static_cast<double>(s.N);
    const cplx i{0.0, 1.0};
    return coeff_minus(s) * std::exp(i * theta) + coeff_plus(s) * std::exp(-i * theta);
}

cplx f_eval(const SuperoscSpec& s, double k) {
    s.validate();
    const cplx br = so_bracket(s, k);
    if (br == cplx{0.0, 0.0}) return {0.0, 0.0};  // log path has no branch here
    const double mag = std::abs(br);
    if (!(mag > 0.0) || !std::isfinite(std::log(mag))) {
        // direct power fallback for denormal brackets
        cplx acc{1.0, 0.0};
        for (int j = 0; j < s.N; ++j) acc *= br;
        return acc;
    }
    const cplx logbr{std::log(mag), std::arg(br)};
    return std::exp(static_cast<double>(s.N) * logbr);
}

std::vector<cplx> f_eval_path(const SuperoscSpec& s, const std::vector<double>& k) {
    s.validate();
    std::vector<cplx> out(k.size());
    double arg_prev = 0.0;
    double arg_acc = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        const cplx br = so_bracket(s, k[j]);
        const double a = std::arg(br);
        if (j == 0)
            arg_acc = a;
        else
            arg_acc += wrap_angle(a - arg_prev);
        arg_prev = a;
        const double mag = std::pow(std::abs(br), s.N);
        const double phase = arg_acc * static_cast<double>(s.N);
        out[j] = cplx{mag * std::cos(phase), mag * std::sin(phase)};
    }
    return out;
}

double local_wavenumber(const SuperoscSpec& s, double k, double dk) {
    s.validate();
    if (!(dk > 0.0)) throw DomainError("local_wavenumber requires dk > 0");
    const cplx lo = so_bracket(s, k - dk);
    const cplx hi = so_bracket(s, k + dk);
    // |F| = |br|^N: vanishing F within the stencil makes arg meaningless
    const double floor = std::pow(1e-250, 1.0 / static_cast<double>(s.N));
    if (std::abs(lo) < floor || std::abs(hi) < floor) {
        std::ostringstream os;
        os << "local_wavenumber: |F| vanishes inside the stencil at k = " << k;
        throw InstabilityError(os.str());
    }
    const double dphi = wrap_angle(std::arg(hi) - std::arg(lo));
    return static_cast<double>(s.N) * dphi / (2.0 * dk);
}

SuperoscReport band_and_growth(const SuperoscSpec& s) {
    s.validate();
    if (!(std::abs(s.L) > s.x0)) {
        std::ostringstream os;
        os << "not superoscillatory: |L| = " << std::abs(s.L) << " <= x0 = " << s.x0;
        throw NotSuperoscillatoryError(os.str());
    }
    SuperoscReport rep;
    const double n = static_cast<double>(s.N);
    rep.band = std::sqrt(n) / std::sqrt(s.L * s.L - s.x0 * s.x0);
    rep.count_estimate = std::sqrt(n);
    rep.growth_ceiling = std::pow(std::abs(s.L) / s.x0, n);
    return rep;
}

void FabryPerotSpec::validate() const {
    if (terms < 1) throw ValidationError("fabry-perot: need at least one term");
    if (!(k > 0.0)) throw ValidationError("fabry-perot: k must be positive");
    if (!std::isfinite(L)) throw ValidationError("fabry-perot: L must be finite");
}

FabryPerotSum fabry_perot_sum(const FabryPerotSpec& s) {
    s.validate();
    const cplx i{0.0, 1.0};
    const cplx z = std::exp(2.0 * i * s.k * s.L);
    const cplx one_plus = 1.0 + s.beta;
    const cplx ratio = (s.beta / one_plus) * (s.beta / one_plus) * z;

    FabryPerotSum out;
    out.rho = std::abs(ratio);

    cplx partial = 0.0, zp = 1.0;
    for (int j = 0; j < s.terms; ++j) {
        partial += zp;
        zp *= z;
    }
    out.partial = partial;
    out.closed_form = 1.0 / (1.0 - z);

    if (out.rho >= 1.0) {
        std::ostringstream os;
        os << "attenuated bounce series diverges: rho = " << out.rho;
        throw DivergenceError(os.str());
    }
    cplx eparts = 0.0, rp = 1.0;
    for (int j = 0; j < s.terms; ++j) {
        eparts += rp;
        rp *= ratio;
    }
    const cplx prefactor = 1.0 / (one_plus * one_plus);
    out.exact_partial = prefactor * eparts;
    out.exact_closed =
        (1.0 / (s.beta * s.beta)) / (1.0 + 2.0 / s.beta + 1.0 / (s.beta * s.beta) - z);
    return out;
}

} // namespace dsim
