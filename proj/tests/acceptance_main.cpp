// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Run via `ctest -R acceptance` or directly; takes a few minutes single-core.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "dsim/barrier.hpp"
#include "dsim/delays.hpp"
#include "dsim/driver.hpp"
#include "dsim/errors.hpp"
#include "dsim/kernels.hpp"
#include "dsim/packets.hpp"
#include "dsim/quadrature.hpp"
#include "dsim/scatter.hpp"
#include "dsim/superosc.hpp"
#include "dsim/weakval.hpp"

using namespace dsim;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %s  [%s]\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

BarrierArray random_scene(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nn(0, 6);
    std::uniform_real_distribution<double> gap(0.2, 2.0);
    std::uniform_real_distribution<double> str(-5.0, 5.0);
    BarrierArray b;
    const int n = nn(rng);
    double x = 0.0;
    for (int i = 0; i < n; ++i) {
        b.positions.push_back(x);
        b.strengths.push_back(str(rng));
        x += gap(rng);
    }
    return b;
}

// 1. flux conservation and unit determinant over 10^4 random samples
void criterion_flux() {
    std::mt19937_64 rng(20011016);
    std::uniform_real_distribution<double> kk(0.02, 10.0);
    double worst_flux = 0.0, worst_det = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const BarrierArray b = random_scene(rng);
        const double k = kk(rng);
        const Mat2c m = transfer_matrix(b, k);
        const double det_scale = std::abs(m.m11 * m.m22) + std::abs(m.m12 * m.m21) + 1.0;
        worst_det = std::max(worst_det, std::abs(m.det() - 1.0) / det_scale);
        const ScatteringResult sr = transmission_exact(b, k);
        worst_flux = std::max(worst_flux, std::abs(std::norm(sr.t) + std::norm(sr.r) - 1.0));
    }
    report(1, "flux conservation and det(M) = 1 over 1e4 samples",
           worst_flux <= 1e-10 && worst_det <= 1e-10,
           "max flux defect " + fmt(worst_flux) + ", max det defect " + fmt(worst_det));
}

// 2. low-energy formula fidelity
void criterion_low_energy() {
    bool pass = true;
    std::ostringstream detail;
    for (const std::size_t n : {std::size_t(2), std::size_t(3), std::size_t(4)}) {
        for (const double beta_min : {1e2, 1e3, 1e4}) {
            const double gap = 1.0 / static_cast<double>(n - 1);
            // grid keeps |sin(k gap)| > 0.1 with margin: k gap in [0.5, 2.6]
            const auto grid = uniform_grid(0.5 / gap, 2.6 / gap, 40);
            const double k_max = grid.back();
            const double alpha = beta_min * k_max;  // min|beta| at the top of the grid
            const BarrierArray b = BarrierArray::equally_spaced(n, 1.0, alpha);
            double worst = 0.0;
            for (const double k : grid) {
                if (std::abs(std::sin(k * gap)) <= 0.1) continue;
                const cplx exact = transmission_exact(b, k).t;
                const cplx approx = transmission_low_energy(b, k);
                worst = std::max(worst, std::abs(approx - exact) / std::abs(exact));
            }
            const double bound = 3.0 * static_cast<double>(n) / beta_min;
            if (worst > bound) {
                pass = false;
                detail << "n=" << n << " beta=" << beta_min << " err " << fmt(worst) << " > "
                       << fmt(bound) << "; ";
            }
        }
    }
    if (pass) detail << "all n in {2,3,4} x min|beta| in {1e2,1e3,1e4} within 3n/min|beta|";
    report(2, "low-energy product formula fidelity", pass, detail.str());
}

BarrierArray opaque_pair() {
    BarrierArray b;
    b.positions = {0.0, 1.0};
    b.strengths = {1000.0, 1000.0};
    return b;
}

// 3. zero traversal time
void criterion_zero_traversal() {
    const BarrierArray b = opaque_pair();
    double worst = 0.0;
    for (const double k : uniform_grid(0.05, 0.3, 26)) {
        const DelayReport rep = delay_report(b, k);
        worst = std::max(worst, std::abs(rep.traversal_time) / rep.free_time);
    }
    report(3, "zero traversal time (n=2, alpha=1000, L=1)", worst <= 0.02,
           "max |tau_g + L/v| / (L/v) = " + fmt(worst));
}

// 4. zero dwell time + free-particle control
void criterion_zero_dwell() {
    const BarrierArray b = opaque_pair();
    double worst = 0.0;
    for (const double k : uniform_grid(0.05, 0.3, 26)) {
        const DelayReport rep = delay_report(b, k);
        worst = std::max(worst, std::abs(rep.dwell_time) / rep.free_time);
    }
    BarrierArray control;
    control.positions = {0.0, 1.0};
    control.strengths = {0.0, 0.0};
    const DelayReport crep = delay_report(control, 1.0);
    const double cerr = std::abs(crep.dwell_time - crep.free_time) / crep.free_time;
    report(4, "zero dwell time + free control", worst <= 0.05 && cerr <= 0.01,
           "max |dwell|/(L/v) = " + fmt(worst) + ", control defect " + fmt(cerr));
}

// 5. derivative shape and the bandwidth rule
void criterion_derivative_shape() {
    const ClaimOutcome shape = reproduce_claim("derivative-shape");
    const ClaimOutcome rule = reproduce_claim("bandwidth-rule");
    std::ostringstream detail;
    for (const auto& row : shape.table.rows) detail << row[0] << " = " << row[1] << "; ";
    for (const auto& row : rule.table.rows) detail << row[0] << " = " << row[1] << "; ";
    report(5, "derivative-shaped transmission and sharp bandwidth rule",
           shape.pass && rule.pass, detail.str());
}

// 6. amplitude-suppression exponent (m*alpha large enough that the k -> 0
// coefficient sits in its opaque asymptote for every n in the scan)
void criterion_suppression() {
    const double m_alpha = 200.0, span = 1.0;
    bool pass = true;
    std::ostringstream detail;
    for (std::size_t n = 2; n <= 6; ++n) {
        const BarrierArray b = BarrierArray::equally_spaced(n, span, m_alpha);
        const double measured = std::log(std::abs(packet_coefficient(b, 1e-4)));
        const double predicted =
            -std::log(m_alpha) + static_cast<double>(n - 1) *
                                     std::log(static_cast<double>(n - 1) /
                                              (2.0 * span * m_alpha));
        if (std::abs(measured - predicted) > 0.05 * std::abs(predicted)) {
            pass = false;
            detail << "n=" << n << ": " << fmt(measured) << " vs " << fmt(predicted) << "; ";
        }
    }
    if (pass) detail << "log|C(0)| matches -(log m alpha) + (n-1) log((n-1)/(2 L m alpha))";
    report(6, "amplitude-suppression exponent over n in {2..6}", pass, detail.str());
}

// 7. superoscillation identities
void criterion_superosc() {
    const ClaimOutcome c = reproduce_claim("superosc-band");
    std::ostringstream detail;
    for (const auto& row : c.table.rows) detail << row[0] << " = " << row[1] << "; ";
    report(7, "superoscillation identities (F(0), slope, ceiling, remainder)", c.pass,
           detail.str());
}

// 8. Fabry-Perot equivalence
void criterion_fabry() {
    const ClaimOutcome c = reproduce_claim("fabry-equivalence");
    std::ostringstream detail;
    for (const auto& row : c.table.rows) detail << row[0] << " = " << row[1] << "; ";
    report(8, "bounce-series resummation equals the exact amplitude", c.pass, detail.str());
}

// 9. weak values take any complex value
void criterion_weak_any_z() {
    const ClaimOutcome c = reproduce_claim("weak-any-z");
    report(9, "construct_states round-trip over 100 random complex z", c.pass,
           c.table.rows.empty() ? "" : ("max error " + c.table.rows[0][1]));
}

// 10. weak-value dwell integral
void criterion_weak_dwell() {
    const ClaimOutcome c = reproduce_claim("weak-dwell-zero");
    std::ostringstream detail;
    for (const auto& row : c.table.rows) detail << row[0] << " = " << row[1] << "; ";
    report(10, "conditioned presence-time integral (free control + tunneling)", c.pass,
           detail.str());
}

// 11. determinism of reproduce outputs against committed golden files
void criterion_determinism() {
    const fs::path out1 = fs::temp_directory_path() / "dsim_acc_rep1";
    const fs::path out2 = fs::temp_directory_path() / "dsim_acc_rep2";
    fs::create_directories(out1);
    fs::create_directories(out2);
    bool pass = true;
    std::ostringstream detail;
    const bool regen = std::getenv("DSIM_REGEN_GOLDEN") != nullptr;
    for (const auto& id : claim_ids()) {
        const ClaimOutcome a = reproduce_claim(id);
        const ClaimOutcome b = reproduce_claim(id);
        write_csv((out1 / (id + ".csv")).string(), a.table);
        write_csv((out2 / (id + ".csv")).string(), b.table);

        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream os;
            os << in.rdbuf();
            return os.str();
        };
        const std::string run1 = slurp(out1 / (id + ".csv"));
        const std::string run2 = slurp(out2 / (id + ".csv"));
        if (run1 != run2 || run1.empty()) {
            pass = false;
            detail << id << ": runs differ; ";
            continue;
        }
        const fs::path golden = fs::path(DSIM_GOLDEN_DIR) / (id + ".csv");
        if (regen) {
            std::ofstream out(golden, std::ios::binary);
            out << run1;
        } else if (!fs::exists(golden) || slurp(golden) != run1) {
            pass = false;
            detail << id << ": golden mismatch; ";
        }
    }
    fs::remove_all(out1);
    fs::remove_all(out2);
    if (pass) detail << (regen ? "golden files regenerated" : "byte-identical and match golden");
    report(11, "reproduce outputs deterministic and match golden files", pass, detail.str());
}

} // namespace

int main() {
    std::printf("deltasim acceptance suite (kernel backend: %s)\n",
                kernels::backend_name(kernels::active_backend()).c_str());
    criterion_flux();
    criterion_low_energy();
    criterion_zero_traversal();
    criterion_zero_dwell();
    criterion_derivative_shape();
    criterion_suppression();
    criterion_superosc();
    criterion_fabry();
    criterion_weak_any_z();
    criterion_weak_dwell();
    criterion_determinism();
    if (g_failures) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all 11 criteria PASS\n");
    return 0;
}
