#include "dsim/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "dsim/delays.hpp"
#include "dsim/errors.hpp"
#include "dsim/kernels.hpp"
#include "dsim/packets.hpp"
#include "dsim/quadrature.hpp"
#include "dsim/scatter.hpp"
#include "dsim/superosc.hpp"
#include "dsim/version.hpp"
#include "dsim/weakval.hpp"

namespace dsim {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

// --------------------------------------------------------------------------
// Strict JSON helpers
// --------------------------------------------------------------------------

void require_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw ValidationError(ctx + ": expected an object");
}

void check_keys(const json& obj, const std::string& ctx,
                const std::set<std::string>& required, const std::set<std::string>& optional) {
    require_object(obj, ctx);
    for (const auto& [key, _] : obj.items()) {
        if (!required.count(key) && !optional.count(key))
            throw ValidationError(ctx + ": unknown key '" + key + "'");
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) throw ValidationError(ctx + ": missing key '" + key + "'");
    }
}

double get_double(const json& obj, const std::string& key, const std::string& ctx) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ValidationError(ctx + "." + key + ": expected a number");
    return v.get<double>();
}

double get_double_or(const json& obj, const std::string& key, const std::string& ctx,
                     double fallback) {
    return obj.contains(key) ? get_double(obj, key, ctx) : fallback;
}

std::size_t get_count(const json& obj, const std::string& key, const std::string& ctx,
                      std::size_t min_value = 1) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ValidationError(ctx + "." + key + ": expected a non-negative integer");
    const auto n = v.get<unsigned long long>();
    if (n < min_value)
        throw ValidationError(ctx + "." + key + ": must be at least " + std::to_string(min_value));
    return static_cast<std::size_t>(n);
}

std::vector<double> get_array(const json& obj, const std::string& key, const std::string& ctx) {
    const auto& v = obj.at(key);
    if (!v.is_array()) throw ValidationError(ctx + "." + key + ": expected an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ValidationError(ctx + "." + key + ": expected numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// --------------------------------------------------------------------------
// Formatting
// --------------------------------------------------------------------------

std::string fmt_or_nan(double v) { return format_double(v); }

std::string fmt_complex_re(const cplx& c) { return format_double(c.real()); }
std::string fmt_complex_im(const cplx& c) { return format_double(c.imag()); }

// --------------------------------------------------------------------------
// Parallel row fan-out (deterministic: slot per row)
// --------------------------------------------------------------------------

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void parallel_rows(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    threads = std::min<std::size_t>(resolve_threads(threads), n ? n : 1);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

std::string error_status(const Error& e) {
    // short machine-readable class tag; details go to the message-free CSV
    if (dynamic_cast<const ResonanceError*>(&e)) return "resonance";
    if (dynamic_cast<const SingularityError*>(&e)) return "singular";
    if (dynamic_cast<const StencilError*>(&e)) return "stencil";
    if (dynamic_cast<const WindowError*>(&e)) return "window";
    if (dynamic_cast<const AccuracyError*>(&e)) return "accuracy";
    if (dynamic_cast<const PostSelectionError*>(&e)) return "post-selection";
    if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
    if (dynamic_cast<const InstabilityError*>(&e)) return "instability";
    return "error";
}

// --------------------------------------------------------------------------
// Scene parsing
// --------------------------------------------------------------------------

BarrierArray parse_scene(const json& j) {
    check_keys(j, "scene", {"positions", "strengths"},
               {"mass", "hbar", "inner_potential"});
    BarrierArray b;
    b.positions = get_array(j, "positions", "scene");
    b.strengths = get_array(j, "strengths", "scene");
    b.mass = get_double_or(j, "mass", "scene", 1.0);
    b.hbar = get_double_or(j, "hbar", "scene", 1.0);
    b.inner_potential = get_double_or(j, "inner_potential", "scene", 0.0);
    b.validate();
    return b;
}

json scene_echo(const BarrierArray& b) {
    json j;
    j["positions"] = b.positions;
    j["strengths"] = b.strengths;
    j["mass"] = b.mass;
    j["hbar"] = b.hbar;
    j["inner_potential"] = b.inner_potential;
    return j;
}

// --------------------------------------------------------------------------
// Experiments
// --------------------------------------------------------------------------

std::vector<double> sweep_grid(const json& sweep, const std::string& ctx) {
    const double lo = get_double(sweep, "k_min", ctx);
    const double hi = get_double(sweep, "k_max", ctx);
    const std::size_t steps = get_count(sweep, "k_steps", ctx, 1);
    if (!(lo > 0.0) || !(hi >= lo)) throw ValidationError(ctx + ": need 0 < k_min <= k_max");
    if (steps == 1) return {lo};
    return uniform_grid(lo, hi, steps);
}

Table run_transmission(const RunConfig& cfg, unsigned threads) {
    const auto grid = sweep_grid(cfg.sweep, "sweep");
    Table t;
    t.columns = {"k", "re_t", "im_t", "abs2_t", "arg_t", "status"};
    t.rows.resize(grid.size());

    struct Row {
        cplx amp{};
        bool ok = false;
        std::string status;
    };
    std::vector<Row> rows(grid.size());
    parallel_rows(grid.size(), threads, [&](std::size_t i) {
        try {
            rows[i].amp = transmission_exact(cfg.scene, grid[i]).t;
            rows[i].ok = true;
            rows[i].status = "ok";
        } catch (const Error& e) {
            rows[i].status = error_status(e);
        }
    });

    // unwrap arg t along the sweep
    double prev_arg = 0.0;
    bool have_prev = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::string re = "nan", im = "nan", abs2 = "nan", ph = "nan";
        if (rows[i].ok) {
            double a = std::arg(rows[i].amp);
            if (have_prev) {
                while (a - prev_arg > pi) a -= 2.0 * pi;
                while (a - prev_arg <= -pi) a += 2.0 * pi;
            }
            prev_arg = a;
            have_prev = true;
            re = fmt_complex_re(rows[i].amp);
            im = fmt_complex_im(rows[i].amp);
            abs2 = fmt_or_nan(std::norm(rows[i].amp));
            ph = fmt_or_nan(a);
        }
        t.rows[i] = {fmt_or_nan(grid[i]), re, im, abs2, ph, rows[i].status};
    }
    std::ostringstream g;
    g << "grid: k in [" << format_double(grid.front()) << ", " << format_double(grid.back())
      << "], " << grid.size() << " points";
    t.meta.push_back(g.str());
    return t;
}

Table run_delays(const RunConfig& cfg, unsigned threads) {
    const auto grid = sweep_grid(cfg.sweep, "sweep");
    const double dk_rel = get_double_or(cfg.numerics, "dk_rel", "numerics", 1e-5);
    const double dV_rel = get_double_or(cfg.numerics, "dV_rel", "numerics", 1e-6);
    if (!(dk_rel > 0.0) || !(dV_rel > 0.0))
        throw ValidationError("numerics: dk_rel and dV_rel must be positive");

    Table t;
    t.columns = {"k", "tau_g", "free_time", "traversal", "dwell",
                 "tau_g_err", "dwell_err", "status"};
    t.rows.resize(grid.size());

    struct Row {
        DelayReport rep;
        bool ok = false;
        std::string status;
    };
    std::vector<Row> rows(grid.size());
    parallel_rows(grid.size(), threads, [&](std::size_t i) {
        const double k = grid[i];
        if (resonance_distance(cfg.scene, k) < 1e-6) {
            rows[i].status = "skipped-resonance";
            return;
        }
        try {
            const double energy = cfg.scene.hbar * cfg.scene.hbar * k * k / (2.0 * cfg.scene.mass);
            rows[i].rep = delay_report(cfg.scene, k, dk_rel * k, dV_rel * energy);
            rows[i].ok = true;
            rows[i].status = "ok";
        } catch (const Error& e) {
            rows[i].status = error_status(e);
        }
    });

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& r = rows[i];
        if (r.ok) {
            t.rows[i] = {fmt_or_nan(grid[i]),
                         fmt_or_nan(r.rep.group_delay),
                         fmt_or_nan(r.rep.free_time),
                         fmt_or_nan(r.rep.traversal_time),
                         fmt_or_nan(r.rep.dwell_time),
                         fmt_or_nan(r.rep.group_delay_error),
                         fmt_or_nan(r.rep.dwell_error),
                         r.status};
        } else {
            t.rows[i] = {fmt_or_nan(grid[i]), "nan", "nan", "nan", "nan", "nan", "nan", r.status};
        }
    }
    std::ostringstream g;
    g << "grid: k in [" << format_double(grid.front()) << ", " << format_double(grid.back())
      << "], " << grid.size() << " points; dk_rel = " << format_double(dk_rel)
      << ", dV_rel = " << format_double(dV_rel);
    t.meta.push_back(g.str());
    return t;
}

Table run_packet(const RunConfig& cfg, unsigned threads) {
    (void)threads;  // the field evaluation is bulk work already
    const auto& sw = cfg.sweep;
    WavePacketSpec spec{get_double(sw, "k0", "sweep"), get_double(sw, "dk", "sweep")};
    const std::size_t spectral =
        cfg.numerics.contains("spectral_points")
            ? get_count(cfg.numerics, "spectral_points", "numerics", 513)
            : 1025;

    FieldRequest req;
    req.x = uniform_grid(get_double(sw, "x_min", "sweep"), get_double(sw, "x_max", "sweep"),
                         get_count(sw, "x_points", "sweep", 2));
    req.t = uniform_grid(get_double(sw, "t_min", "sweep"), get_double(sw, "t_max", "sweep"),
                         get_count(sw, "t_points", "sweep", 1));

    const SpectralTable tab = synthesize(spec, spectral);
    const FieldSample f = propagate(tab, cfg.scene, req);

    Table t;
    t.columns = {"t", "x", "re_psi", "im_psi", "abs2_psi", "status"};
    t.rows.reserve(f.nt() * f.nx());
    for (std::size_t it = 0; it < f.nt(); ++it)
        for (std::size_t ix = 0; ix < f.nx(); ++ix) {
            const cplx v = f.at(it, ix);
            t.rows.push_back({fmt_or_nan(f.t[it]), fmt_or_nan(f.x[ix]), fmt_complex_re(v),
                              fmt_complex_im(v), fmt_or_nan(std::norm(v)), "ok"});
        }

    std::ostringstream g;
    g << "grid: " << f.nx() << " x-points, " << f.nt() << " t-points, " << tab.size()
      << " spectral nodes";
    t.meta.push_back(g.str());

    if (sw.contains("flatness_band")) {
        const double band = get_double(sw, "flatness_band", "sweep");
        const FlatnessReport rep = spectral_flatness(cfg.scene, spec.k0, band);
        std::ostringstream fl;
        fl << "flatness: band = " << format_double(rep.band)
           << ", magnitude_deviation = " << format_double(rep.magnitude_deviation)
           << ", phase_residual = " << format_double(rep.phase_residual)
           << ", resonance_in_band = " << (rep.resonance_in_band ? "true" : "false");
        t.meta.push_back(fl.str());
    }
    return t;
}

Table run_superosc(const RunConfig& cfg, unsigned threads) {
    const auto& sw = cfg.sweep;
    SuperoscSpec spec;
    spec.N = static_cast<int>(get_count(sw, "N", "sweep", 1));
    spec.L = get_double(sw, "L", "sweep");
    spec.x0 = get_double(sw, "x0", "sweep");
    spec.validate();
    const double dk = get_double_or(sw, "dk_stencil", "sweep", 1e-6);

    const double lo = get_double(sw, "k_min", "sweep");
    const double hi = get_double(sw, "k_max", "sweep");
    const std::size_t steps = get_count(sw, "k_steps", "sweep", 2);
    const auto grid = uniform_grid(lo, hi, steps);

    Table t;
    t.columns = {"k", "re_F", "im_F", "abs_F", "local_wavenumber", "status"};
    t.rows.resize(grid.size());

    const auto path = f_eval_path(spec, grid);
    std::vector<std::string> slopes(grid.size());
    std::vector<std::string> status(grid.size(), "ok");
    parallel_rows(grid.size(), threads, [&](std::size_t i) {
        try {
            slopes[i] = fmt_or_nan(local_wavenumber(spec, grid[i], dk));
        } catch (const Error& e) {
            slopes[i] = "nan";
            status[i] = error_status(e);
        }
    });
    for (std::size_t i = 0; i < grid.size(); ++i)
        t.rows[i] = {fmt_or_nan(grid[i]), fmt_complex_re(path[i]), fmt_complex_im(path[i]),
                     fmt_or_nan(std::abs(path[i])), slopes[i], status[i]};

    try {
        const auto rep = band_and_growth(spec);
        std::ostringstream m;
        m << "band: " << format_double(rep.band)
          << ", count_estimate: " << format_double(rep.count_estimate)
          << ", growth_ceiling: " << format_double(rep.growth_ceiling);
        t.meta.push_back(m.str());
    } catch (const NotSuperoscillatoryError&) {
        t.meta.push_back("band: not superoscillatory (|L| <= x0)");
    }
    return t;
}

Table run_fabry(const RunConfig& cfg, unsigned threads) {
    const auto& sw = cfg.sweep;
    const double alpha = get_double(sw, "alpha", "sweep");
    const double gap = get_double(sw, "L", "sweep");
    if (!(gap > 0.0)) throw ValidationError("sweep.L: must be positive");
    const int terms = static_cast<int>(get_count(sw, "terms", "sweep", 1));
    const auto grid = sweep_grid(sw, "sweep");

    BarrierArray pair;
    pair.mass = cfg.scene.mass;
    pair.hbar = cfg.scene.hbar;
    pair.positions = {0.0, gap};
    pair.strengths = {alpha, alpha};

    Table t;
    t.columns = {"k", "rho", "re_exact_partial", "im_exact_partial", "re_exact_closed",
                 "im_exact_closed", "re_t_exact", "im_t_exact", "closed_vs_exact", "status"};
    t.rows.resize(grid.size());
    parallel_rows(grid.size(), threads, [&](std::size_t i) {
        const double k = grid[i];
        try {
            FabryPerotSpec fp;
            fp.k = k;
            fp.L = gap;
            fp.terms = terms;
            fp.beta = pair.mass * alpha / (cplx(0.0, 1.0) * pair.hbar * pair.hbar * k);
            const auto sum = fabry_perot_sum(fp);
            const cplx texact = transmission_exact(pair, k).t;
            t.rows[i] = {fmt_or_nan(k),
                         fmt_or_nan(sum.rho),
                         fmt_complex_re(sum.exact_partial),
                         fmt_complex_im(sum.exact_partial),
                         fmt_complex_re(sum.exact_closed),
                         fmt_complex_im(sum.exact_closed),
                         fmt_complex_re(texact),
                         fmt_complex_im(texact),
                         fmt_or_nan(std::abs(sum.exact_closed - texact)),
                         "ok"};
        } catch (const Error& e) {
            t.rows[i] = {fmt_or_nan(k), "nan", "nan", "nan", "nan",
                         "nan",         "nan", "nan", "nan", error_status(e)};
        }
    });
    return t;
}

Table run_weak(const RunConfig& cfg, unsigned threads) {
    const auto& sw = cfg.sweep;
    const double a1 = get_double(sw, "a1", "sweep");
    const double a2 = get_double(sw, "a2", "sweep");
    const auto& zv = sw.at("z_values");
    if (!zv.is_array() || zv.empty())
        throw ValidationError("sweep.z_values: expected a non-empty array of [re, im] pairs");
    std::vector<cplx> zs;
    for (const auto& e : zv) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ValidationError("sweep.z_values: entries must be [re, im] number pairs");
        zs.emplace_back(e[0].get<double>(), e[1].get<double>());
    }

    Table t;
    t.columns = {"re_z", "im_z", "re_alpha1", "im_alpha1", "re_alpha2", "im_alpha2",
                 "roundtrip_error", "status"};
    t.rows.resize(zs.size());
    parallel_rows(zs.size(), threads, [&](std::size_t i) {
        try {
            const auto [al1, al2] = construct_states(zs[i], a1, a2);
            WeakValueProblem p;
            p.dim = 2;
            p.pre = {al1, al2};
            p.post = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
            p.op = {cplx(a1, 0.0), 0.0, 0.0, cplx(a2, 0.0)};
            const cplx back = weak_value(p);
            t.rows[i] = {fmt_complex_re(zs[i]), fmt_complex_im(zs[i]),
                         fmt_complex_re(al1),   fmt_complex_im(al1),
                         fmt_complex_re(al2),   fmt_complex_im(al2),
                         fmt_or_nan(std::abs(back - zs[i])),
                         "ok"};
        } catch (const Error& e) {
            t.rows[i] = {fmt_complex_re(zs[i]), fmt_complex_im(zs[i]), "nan", "nan",
                         "nan",                 "nan",                 "nan", error_status(e)};
        }
    });
    return t;
}

DwellIntegralSpec parse_dwell_spec(const RunConfig& cfg) {
    const auto& sw = cfg.sweep;
    DwellIntegralSpec d;
    d.barriers = cfg.scene;
    d.packet = WavePacketSpec{get_double(sw, "k0", "sweep"), get_double(sw, "dk", "sweep")};
    d.packet.validate();
    d.spectral_points = cfg.numerics.contains("spectral_points")
                            ? get_count(cfg.numerics, "spectral_points", "numerics", 513)
                            : 1025;
    const auto region = get_array(sw, "region", "sweep");
    if (region.size() != 2 || !(region[1] >= region[0]))
        throw ValidationError("sweep.region: expected [lo, hi] with hi >= lo");
    d.region_lo = region[0];
    d.region_hi = region[1];
    d.region_points = get_count(sw, "region_points", "sweep", 3);
    d.t_lo = get_double(sw, "t_min", "sweep");
    d.t_hi = get_double(sw, "t_max", "sweep");
    if (!(d.t_hi > d.t_lo)) throw ValidationError("sweep: t_max must exceed t_min");
    d.t_points = get_count(sw, "t_points", "sweep", 5);
    d.denom_lo = get_double(sw, "denom_x_min", "sweep");
    d.denom_hi = get_double(sw, "denom_x_max", "sweep");
    if (!(d.denom_hi > d.denom_lo))
        throw ValidationError("sweep: denom_x_max must exceed denom_x_min");
    d.denom_points = get_count(sw, "denom_x_points", "sweep", 3);
    d.t_ref = get_double_or(sw, "t_ref", "sweep", 0.0);
    d.t_ref_check = get_double_or(sw, "t_ref_check", "sweep", d.t_ref);
    return d;
}

Table run_dwell_weak(const RunConfig& cfg, unsigned threads) {
    (void)threads;
    const DwellIntegralSpec d = parse_dwell_spec(cfg);
    Table t;
    t.columns = {"re_E", "im_E", "re_denominator", "im_denominator", "denominator_drift",
                 "edge_mass_incident", "edge_mass_post", "status"};
    try {
        const auto res = dwell_weak_integral(d);
        t.rows.push_back({fmt_complex_re(res.value), fmt_complex_im(res.value),
                          fmt_complex_re(res.denominator), fmt_complex_im(res.denominator),
                          fmt_or_nan(res.denominator_drift),
                          fmt_or_nan(res.edge_mass_incident), fmt_or_nan(res.edge_mass_post),
                          "ok"});
    } catch (const Error& e) {
        t.rows.push_back({"nan", "nan", "nan", "nan", "nan", "nan", "nan", error_status(e)});
    }
    return t;
}

// --------------------------------------------------------------------------
// Schema tables
// --------------------------------------------------------------------------

const std::set<std::string>& sweep_keys(Experiment e) {
    static const std::set<std::string> transmission{"k_min", "k_max", "k_steps"};
    static const std::set<std::string> delays = transmission;
    static const std::set<std::string> packet{"k0", "dk",       "x_min",    "x_max",
                                              "x_points", "t_min", "t_max", "t_points",
                                              "flatness_band"};
    static const std::set<std::string> superosc{"N",      "L",       "x0",        "k_min",
                                                "k_max", "k_steps", "dk_stencil"};
    static const std::set<std::string> fabry{"alpha", "L", "terms", "k_min", "k_max", "k_steps"};
    static const std::set<std::string> weak{"a1", "a2", "z_values"};
    static const std::set<std::string> dwell{"k0",       "dk",          "region",
                                             "region_points", "t_min",  "t_max",
                                             "t_points", "denom_x_min", "denom_x_max",
                                             "denom_x_points", "t_ref", "t_ref_check"};
    switch (e) {
        case Experiment::transmission: return transmission;
        case Experiment::delays: return delays;
        case Experiment::packet: return packet;
        case Experiment::superosc: return superosc;
        case Experiment::fabry: return fabry;
        case Experiment::weak: return weak;
        case Experiment::dwell_weak: return dwell;
    }
    return transmission;
}

const std::set<std::string>& required_sweep_keys(Experiment e) {
    static const std::set<std::string> transmission{"k_min", "k_max", "k_steps"};
    static const std::set<std::string> packet{"k0",    "dk",    "x_min",   "x_max",
                                              "x_points", "t_min", "t_max", "t_points"};
    static const std::set<std::string> superosc{"N", "L", "x0", "k_min", "k_max", "k_steps"};
    static const std::set<std::string> fabry{"alpha", "L", "terms", "k_min", "k_max", "k_steps"};
    static const std::set<std::string> weak{"a1", "a2", "z_values"};
    static const std::set<std::string> dwell{"k0",       "dk",          "region",
                                             "region_points", "t_min",  "t_max",
                                             "t_points", "denom_x_min", "denom_x_max",
                                             "denom_x_points"};
    switch (e) {
        case Experiment::transmission:
        case Experiment::delays: return transmission;
        case Experiment::packet: return packet;
        case Experiment::superosc: return superosc;
        case Experiment::fabry: return fabry;
        case Experiment::weak: return weak;
        case Experiment::dwell_weak: return dwell;
    }
    return transmission;
}

const std::set<std::string>& numerics_keys(Experiment e) {
    static const std::set<std::string> delays{"dk_rel", "dV_rel"};
    static const std::set<std::string> spectral{"spectral_points"};
    static const std::set<std::string> none{};
    switch (e) {
        case Experiment::delays: return delays;
        case Experiment::packet:
        case Experiment::dwell_weak: return spectral;
        default: return none;
    }
}

bool scene_required(Experiment e) {
    switch (e) {
        case Experiment::transmission:
        case Experiment::delays:
        case Experiment::packet:
        case Experiment::dwell_weak: return true;
        default: return false;
    }
}

// Dry-run the field extraction so malformed values fail at parse time, not
// mid-sweep. Mirrors the getters the runners use; does no numerical work.
void validate_values(const RunConfig& cfg) {
    switch (cfg.experiment) {
        case Experiment::transmission:
            (void)sweep_grid(cfg.sweep, "sweep");
            break;
        case Experiment::delays: {
            (void)sweep_grid(cfg.sweep, "sweep");
            const double dk_rel = get_double_or(cfg.numerics, "dk_rel", "numerics", 1e-5);
            const double dV_rel = get_double_or(cfg.numerics, "dV_rel", "numerics", 1e-6);
            if (!(dk_rel > 0.0) || !(dV_rel > 0.0))
                throw ValidationError("numerics: dk_rel and dV_rel must be positive");
            break;
        }
        case Experiment::packet: {
            const WavePacketSpec spec{get_double(cfg.sweep, "k0", "sweep"),
                                      get_double(cfg.sweep, "dk", "sweep")};
            spec.validate();
            if (!(get_double(cfg.sweep, "x_max", "sweep") >
                  get_double(cfg.sweep, "x_min", "sweep")))
                throw ValidationError("sweep: x_max must exceed x_min");
            if (!(get_double(cfg.sweep, "t_max", "sweep") >=
                  get_double(cfg.sweep, "t_min", "sweep")))
                throw ValidationError("sweep: t_max must be >= t_min");
            (void)get_count(cfg.sweep, "x_points", "sweep", 2);
            (void)get_count(cfg.sweep, "t_points", "sweep", 1);
            if (cfg.sweep.contains("flatness_band") &&
                !(get_double(cfg.sweep, "flatness_band", "sweep") > 0.0))
                throw ValidationError("sweep.flatness_band: must be positive");
            if (cfg.numerics.contains("spectral_points"))
                (void)get_count(cfg.numerics, "spectral_points", "numerics", 513);
            break;
        }
        case Experiment::superosc: {
            SuperoscSpec spec;
            spec.N = static_cast<int>(get_count(cfg.sweep, "N", "sweep", 1));
            spec.L = get_double(cfg.sweep, "L", "sweep");
            spec.x0 = get_double(cfg.sweep, "x0", "sweep");
            spec.validate();
            (void)get_count(cfg.sweep, "k_steps", "sweep", 2);
            if (!(get_double_or(cfg.sweep, "dk_stencil", "sweep", 1e-6) > 0.0))
                throw ValidationError("sweep.dk_stencil: must be positive");
            break;
        }
        case Experiment::fabry:
            (void)sweep_grid(cfg.sweep, "sweep");
            (void)get_double(cfg.sweep, "alpha", "sweep");
            if (!(get_double(cfg.sweep, "L", "sweep") > 0.0))
                throw ValidationError("sweep.L: must be positive");
            (void)get_count(cfg.sweep, "terms", "sweep", 1);
            break;
        case Experiment::weak: {
            if (get_double(cfg.sweep, "a1", "sweep") == get_double(cfg.sweep, "a2", "sweep"))
                throw ValidationError("sweep: a1 and a2 must differ");
            const auto& zv = cfg.sweep.at("z_values");
            if (!zv.is_array() || zv.empty())
                throw ValidationError("sweep.z_values: expected a non-empty array");
            for (const auto& e : zv)
                if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                    throw ValidationError("sweep.z_values: entries must be [re, im] pairs");
            break;
        }
        case Experiment::dwell_weak: {
            RunConfig probe = cfg;
            (void)parse_dwell_spec(probe);
            break;
        }
    }
}

} // namespace

std::string experiment_name(Experiment e) {
    switch (e) {
        case Experiment::transmission: return "transmission";
        case Experiment::delays: return "delays";
        case Experiment::packet: return "packet";
        case Experiment::superosc: return "superosc";
        case Experiment::fabry: return "fabry";
        case Experiment::weak: return "weak";
        case Experiment::dwell_weak: return "dwell-weak";
    }
    return "?";
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

RunConfig parse_config(const json& j) {
    check_keys(j, "config", {"experiment", "sweep", "output"}, {"scene", "numerics"});

    RunConfig cfg;
    const auto& exp = j.at("experiment");
    if (!exp.is_string()) throw ValidationError("config.experiment: expected a string");
    const std::string name = exp.get<std::string>();
    bool found = false;
    for (const Experiment e :
         {Experiment::transmission, Experiment::delays, Experiment::packet, Experiment::superosc,
          Experiment::fabry, Experiment::weak, Experiment::dwell_weak}) {
        if (experiment_name(e) == name) {
            cfg.experiment = e;
            found = true;
            break;
        }
    }
    if (!found) throw ValidationError("config.experiment: unknown experiment '" + name + "'");

    if (j.contains("scene")) {
        cfg.scene = parse_scene(j.at("scene"));
    } else if (scene_required(cfg.experiment)) {
        throw ValidationError("config: experiment '" + name + "' requires a scene");
    }

    cfg.sweep = j.at("sweep");
    check_keys(cfg.sweep, "sweep", required_sweep_keys(cfg.experiment),
               sweep_keys(cfg.experiment));

    cfg.numerics = j.contains("numerics") ? j.at("numerics") : json::object();
    check_keys(cfg.numerics, "numerics", {}, numerics_keys(cfg.experiment));

    const auto& out = j.at("output");
    check_keys(out, "output", {"path"}, {"format"});
    if (!out.at("path").is_string()) throw ValidationError("output.path: expected a string");
    cfg.output_path = out.at("path").get<std::string>();
    std::string fmt = "csv";
    if (out.contains("format")) {
        if (!out.at("format").is_string())
            throw ValidationError("output.format: expected 'csv' or 'json'");
        fmt = out.at("format").get<std::string>();
    }
    if (fmt == "csv")
        cfg.output_format = OutputFormat::csv;
    else if (fmt == "json")
        cfg.output_format = OutputFormat::json;
    else
        throw ValidationError("output.format: expected 'csv' or 'json'");

    validate_values(cfg);

    // normalized echo (defaults materialized, keys sorted by nlohmann)
    cfg.echo["experiment"] = name;
    cfg.echo["scene"] = scene_echo(cfg.scene);
    cfg.echo["sweep"] = cfg.sweep;
    cfg.echo["numerics"] = cfg.numerics;
    cfg.echo["output"] = {{"path", cfg.output_path}, {"format", fmt}};
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

Table run_experiment(const RunConfig& cfg, unsigned threads) {
    Table t;
    switch (cfg.experiment) {
        case Experiment::transmission: t = run_transmission(cfg, threads); break;
        case Experiment::delays: t = run_delays(cfg, threads); break;
        case Experiment::packet: t = run_packet(cfg, threads); break;
        case Experiment::superosc: t = run_superosc(cfg, threads); break;
        case Experiment::fabry: t = run_fabry(cfg, threads); break;
        case Experiment::weak: t = run_weak(cfg, threads); break;
        case Experiment::dwell_weak: t = run_dwell_weak(cfg, threads); break;
    }
    std::vector<std::string> meta;
    meta.push_back(std::string("deltasim ") + kVersion);
    meta.push_back("experiment: " + experiment_name(cfg.experiment));
    meta.push_back("config: " + cfg.echo.dump());
    for (auto& m : t.meta) meta.push_back(std::move(m));
    t.meta = std::move(meta);
    return t;
}

void write_csv(const std::string& path, const Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    for (const auto& m : t.meta) out << "# " << m << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        out << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
    for (const auto& row : t.rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            out << row[c] << (c + 1 < row.size() ? "," : "\n");
    if (!out) throw IoError("write failed: " + path);
}

void write_json(const std::string& path, const Table& t) {
    json j;
    j["metadata"] = t.meta;
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

void run_to_file(const RunConfig& cfg, unsigned threads) {
    const Table t = run_experiment(cfg, threads);
    if (cfg.output_format == OutputFormat::csv)
        write_csv(cfg.output_path, t);
    else
        write_json(cfg.output_path, t);
}

} // namespace dsim
