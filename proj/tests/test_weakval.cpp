#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "dsim/errors.hpp"
#include "dsim/packets.hpp"
#include "dsim/quadrature.hpp"
#include "dsim/weakval.hpp"

using namespace dsim;

namespace {

WeakValueProblem diag_problem(cplx al1, cplx al2, double a1, double a2) {
    WeakValueProblem p;
    p.dim = 2;
    p.pre = {al1, al2};
    p.post = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    p.op = {cplx(a1, 0.0), 0.0, 0.0, cplx(a2, 0.0)};
    return p;
}

std::vector<cplx> random_state(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> v(dim);
    double n2 = 0.0;
    for (auto& c : v) {
        c = {g(rng), g(rng)};
        n2 += std::norm(c);
    }
    for (auto& c : v) c /= std::sqrt(n2);
    return v;
}

std::vector<cplx> random_hermitian(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> a(dim * dim);
    for (std::size_t r = 0; r < dim; ++r) {
        a[r * dim + r] = {g(rng), 0.0};
        for (std::size_t c = r + 1; c < dim; ++c) {
            const cplx v{g(rng), g(rng)};
            a[r * dim + c] = v;
            a[c * dim + r] = std::conj(v);
        }
    }
    return a;
}

} // namespace

TEST_CASE("weak value of an eigenstate is its eigenvalue") {
    WeakValueProblem p;
    p.dim = 2;
    p.pre = {1.0, 0.0};
    p.post = {1.0, 0.0};
    p.op = {cplx(3.0, 0.0), 0.0, 0.0, cplx(-1.0, 0.0)};
    CHECK(std::abs(weak_value(p) - cplx(3.0, 0.0)) < 1e-14);
}

TEST_CASE("two-level example: A_W = 4/7") {
    WeakValueProblem p;
    p.dim = 2;
    p.pre = {0.6, 0.8};
    p.post = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    p.op = {0.0, 0.0, 0.0, cplx(1.0, 0.0)};
    CHECK(std::abs(weak_value(p) - cplx(4.0 / 7.0, 0.0)) < 1e-14);
}

TEST_CASE("orthogonal post-selection is rejected") {
    WeakValueProblem p;
    p.dim = 2;
    p.pre = {1.0, 0.0};
    p.post = {0.0, 1.0};
    p.op = {cplx(1.0, 0.0), 0.0, 0.0, cplx(2.0, 0.0)};
    CHECK_THROWS_AS((void)weak_value(p), PostSelectionError);
}

TEST_CASE("f = i reduces to the ordinary expectation value") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        WeakValueProblem p;
        p.dim = 4;
        p.pre = random_state(rng, 4);
        p.post = p.pre;
        p.op = random_hermitian(rng, 4);
        const cplx w = weak_value(p);
        cplx expect{};
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c)
                expect += std::conj(p.pre[r]) * p.op[r * 4 + c] * p.pre[c];
        CHECK(std::abs(w - expect) < 1e-12);
        CHECK(std::abs(w.imag()) < 1e-12);  // real for f = i
    }
}

TEST_CASE("weak value is invariant under global phases") {
    std::mt19937_64 rng(32);
    WeakValueProblem p;
    p.dim = 3;
    p.pre = random_state(rng, 3);
    p.post = random_state(rng, 3);
    p.op = random_hermitian(rng, 3);
    const cplx base = weak_value(p);
    WeakValueProblem q = p;
    const cplx ph1 = std::polar(1.0, 1.234), ph2 = std::polar(1.0, -0.777);
    for (auto& c : q.pre) c *= ph1;
    for (auto& c : q.post) c *= ph2;
    CHECK(std::abs(weak_value(q) - base) < 1e-13);
}

TEST_CASE("state validation") {
    WeakValueProblem p;
    p.dim = 2;
    p.pre = {1.0, 1.0};  // not normalized
    p.post = {1.0, 0.0};
    p.op = {cplx(1.0, 0.0), 0.0, 0.0, cplx(1.0, 0.0)};
    CHECK_THROWS_AS((void)weak_value(p), ValidationError);

    p.pre = {1.0, 0.0};
    p.op = {cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(0.0, 1.0), cplx(1.0, 0.0)};  // not Hermitian
    CHECK_THROWS_AS((void)weak_value(p), ValidationError);
}

TEST_CASE("construct_states: named example and edge cases") {
    // z = 2, a1 = 0, a2 = 1 -> (1, -2)/sqrt(5)
    const auto [al1, al2] = construct_states(cplx(2.0, 0.0), 0.0, 1.0);
    CHECK(std::abs(al1 - cplx(1.0 / std::sqrt(5.0), 0.0)) < 1e-14);
    CHECK(std::abs(al2 - cplx(-2.0 / std::sqrt(5.0), 0.0)) < 1e-14);
    CHECK(std::abs(weak_value(diag_problem(al1, al2, 0.0, 1.0)) - cplx(2.0, 0.0)) < 1e-13);

    const auto e1 = construct_states(cplx(0.0, 0.0), 0.0, 1.0);
    CHECK(e1.first == cplx(1.0, 0.0));
    CHECK(e1.second == cplx(0.0, 0.0));
    const auto e2 = construct_states(cplx(1.0, 0.0), 0.0, 1.0);
    CHECK(e2.first == cplx(0.0, 0.0));
    CHECK(e2.second == cplx(1.0, 0.0));

    CHECK_THROWS_AS((void)construct_states(cplx(0.5, 0.5), 1.0, 1.0), DomainError);
}

TEST_CASE("construct_states round-trip over random complex targets") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> re(-4.0, 5.0), im(-4.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        const cplx z{re(rng), im(rng)};
        const auto [al1, al2] = construct_states(z, 0.0, 1.0);
        CHECK(std::abs(std::norm(al1) + std::norm(al2) - 1.0) < 1e-14);
        CHECK(std::abs(weak_value(diag_problem(al1, al2, 0.0, 1.0)) - z) < 1e-12);
    }
}

TEST_CASE("dwell integral: zero-length region") {
    DwellIntegralSpec d;
    d.packet = {1.0, 0.1};
    d.region_lo = d.region_hi = 0.0;
    d.t_lo = -80.0;
    d.t_hi = 80.0;
    d.t_points = 161;
    d.denom_lo = -60.0;
    d.denom_hi = 60.0;
    d.denom_points = 961;
    const auto res = dwell_weak_integral(d);
    CHECK(std::abs(res.value) == 0.0);
}

TEST_CASE("dwell integral: free packet crosses the region in L/v") {
    DwellIntegralSpec d;
    d.packet = {1.0, 0.1};  // sigma_x = 5, v = 1
    d.region_lo = 0.0;
    d.region_hi = 4.0;
    d.region_points = 65;
    d.t_lo = -80.0;
    d.t_hi = 80.0;
    d.t_points = 321;
    d.denom_lo = -60.0;
    d.denom_hi = 64.0;
    d.denom_points = 993;
    d.t_ref = 0.0;
    d.t_ref_check = 10.0;
    const auto res = dwell_weak_integral(d);
    CHECK(res.value.real() == doctest::Approx(4.0).epsilon(0.05));
    CHECK(std::abs(res.value.imag()) < 0.2);
    CHECK(res.denominator_drift < 1e-6);  // f = i here: exactly invariant
    CHECK(std::abs(res.denominator - cplx(1.0, 0.0)) < 1e-6);
}

TEST_CASE("dwell integral is additive over region splits") {
    DwellIntegralSpec whole;
    whole.packet = {1.0, 0.1};
    whole.region_lo = 0.0;
    whole.region_hi = 4.0;
    whole.region_points = 129;
    whole.t_lo = -80.0;
    whole.t_hi = 80.0;
    whole.t_points = 161;
    whole.denom_lo = -60.0;
    whole.denom_hi = 64.0;
    whole.denom_points = 993;

    DwellIntegralSpec left = whole, right = whole;
    left.region_hi = 2.0;
    left.region_points = 65;
    right.region_lo = 2.0;
    right.region_points = 65;

    const cplx a = dwell_weak_integral(whole).value;
    const cplx b = dwell_weak_integral(left).value + dwell_weak_integral(right).value;
    CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
}

TEST_CASE("whole-line region equals the arrival first-moment difference") {
    // crossing time of [-X, X] == mean arrival at X minus mean arrival at -X
    const double X = 6.0;
    DwellIntegralSpec d;
    d.packet = {1.0, 0.1};
    d.region_lo = -X;
    d.region_hi = X;
    d.region_points = 193;
    d.t_lo = -90.0;
    d.t_hi = 90.0;
    d.t_points = 361;
    d.denom_lo = -70.0;
    d.denom_hi = 70.0;
    d.denom_points = 1121;
    const auto res = dwell_weak_integral(d);

    const SpectralTable tab = synthesize(d.packet);
    BarrierArray empty;
    FieldRequest req;
    req.x = {-X, X};
    req.t = uniform_grid(-90.0, 90.0, 721);
    const FieldSample f = propagate(tab, empty, req);
    const double t_in = arrival_distribution(f, -X).mean_time;
    const double t_out = arrival_distribution(f, X).mean_time;
    CHECK(res.value.real() == doctest::Approx(t_out - t_in).epsilon(0.05));
}

TEST_CASE("dwell integral window and post-selection errors") {
    DwellIntegralSpec d;
    d.packet = {1.0, 0.1};
    d.region_lo = 0.0;
    d.region_hi = 4.0;
    d.region_points = 65;
    d.t_lo = -3.0;  // packet still inside the region at the window ends
    d.t_hi = 3.0;
    d.t_points = 21;
    d.denom_lo = -60.0;
    d.denom_hi = 64.0;
    d.denom_points = 993;
    CHECK_THROWS_AS((void)dwell_weak_integral(d), WindowError);

    DwellIntegralSpec far = d;
    far.t_lo = -80.0;
    far.t_hi = 80.0;
    far.t_points = 161;
    far.denom_lo = -5.0;  // covers only ~1 sigma of the packet
    far.denom_hi = 5.0;
    far.denom_points = 161;
    CHECK_THROWS_AS((void)dwell_weak_integral(far), WindowError);

    // post-selection packet displaced 16 sigma past the incident one: the
    // spectral overlap e^{-(X dk)^2/2} sits below the 1e-10 bar
    DwellIntegralSpec orth = d;
    orth.t_lo = -250.0;
    orth.t_hi = 250.0;
    orth.t_points = 201;
    orth.denom_lo = -60.0;
    orth.denom_hi = 144.0;
    orth.denom_points = 817;
    orth.barriers.positions = {0.0, 80.0};
    orth.barriers.strengths = {0.0, 0.0};
    CHECK_THROWS_AS((void)dwell_weak_integral(orth), PostSelectionError);
}

TEST_CASE("pointer shift readout") {
    const auto real_case = pointer_shift(cplx(0.5, 0.0), 10.0);
    CHECK(real_case.shift == doctest::Approx(0.5));
    CHECK(real_case.momentum_diagnostic == 0.0);

    const auto imag_case = pointer_shift(cplx(0.0, 0.7), 10.0);
    CHECK(imag_case.shift == 0.0);
    CHECK(imag_case.momentum_diagnostic == doctest::Approx(0.7));

    CHECK_THROWS_AS((void)pointer_shift(cplx(5.0, 0.0), 1.0), PerturbationError);
}

TEST_CASE("pointer shift sign pinned by an explicit displacement") {
    // e^{-i X P / hbar} translates a Gaussian pointer by +X; for complex X
    // the position mean moves by Re X only. Grid oracle for X = 0.3 + 0.4i.
    const double sigma = 2.0;
    const cplx X{0.3, 0.4};
    const auto grid = uniform_grid(-20.0, 20.0, 2001);
    const auto w = simpson_weights(grid.size(), 40.0 / 2000.0);
    double mass = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        // phi(tau - X) for phi ~ exp(-tau^2 / (4 sigma^2))
        const cplx arg = (grid[j] - X) / (2.0 * sigma);
        const double d = std::norm(std::exp(-arg * arg));
        mass += w[j] * d;
        mean += w[j] * d * grid[j];
    }
    mean /= mass;
    const auto ps = pointer_shift(X, sigma * 10.0);
    CHECK(mean == doctest::Approx(ps.shift).epsilon(1e-10));
}
