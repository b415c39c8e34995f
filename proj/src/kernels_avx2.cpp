// AVX2 kernel variants. This translation unit is compiled with -mavx2 -mfma;
// callers must check backend_available(Backend::avx2) before dispatching here.

#include "dsim/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace dsim::kernels {

namespace {

// Cody-Waite two-part split of pi/2 (fdlibm constants). Accurate reduction
// for |phase| up to ~2^20 * pi/2, far beyond the phases produced by the
// desk-scale grids used here.
constexpr double kTwoOverPi = 6.36619772367581382433e-01;
constexpr double kPio2Hi = 1.57079632673412561417e+00;
constexpr double kPio2Lo = 6.07710050650619224932e-11;

// Minimax coefficients for sin/cos on [-pi/4, pi/4] (Cephes).
constexpr double kSinC0 = 1.58962301576546568060e-10;
constexpr double kSinC1 = -2.50507477628578072866e-8;
constexpr double kSinC2 = 2.75573136213857245213e-6;
constexpr double kSinC3 = -1.98412698295895385996e-4;
constexpr double kSinC4 = 8.33333333333332211858e-3;
constexpr double kSinC5 = -1.66666666666666307295e-1;

constexpr double kCosC0 = -1.13585365213876817300e-11;
constexpr double kCosC1 = 2.08757008419747316778e-9;
constexpr double kCosC2 = -2.75573141792967388112e-7;
constexpr double kCosC3 = 2.48015872888517179954e-5;
constexpr double kCosC4 = -1.38888888888730564116e-3;
constexpr double kCosC5 = 4.16666666666665929218e-2;

// Simultaneous sin and cos of four doubles.
inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
    const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    // r = x - q*pi/2, in two steps
    __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Hi), x);
    r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Lo), r);

    const __m256d z = _mm256_mul_pd(r, r);

    // sin(r) = r + r*z*P(z)
    __m256d ps = _mm256_set1_pd(kSinC0);
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinC1));
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinC2));
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinC3));
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinC4));
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinC5));
    const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

    // cos(r) = 1 - z/2 + z^2*Q(z)
    __m256d pc = _mm256_set1_pd(kCosC0);
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosC1));
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosC2));
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosC3));
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosC4));
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosC5));
    __m256d c = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc,
                                _mm256_fnmadd_pd(z, _mm256_set1_pd(0.5), _mm256_set1_pd(1.0)));

    // quadrant fixup: qm = q mod 4 decides swap and sign flips
    const __m256d qm = _mm256_fnmadd_pd(
        _mm256_floor_pd(_mm256_mul_pd(q, _mm256_set1_pd(0.25))), _mm256_set1_pd(4.0), q);
    const __m256d m1 = _mm256_cmp_pd(qm, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
    const __m256d m2 = _mm256_cmp_pd(qm, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
    const __m256d m3 = _mm256_cmp_pd(qm, _mm256_set1_pd(3.0), _CMP_EQ_OQ);

    const __m256d swap = _mm256_or_pd(m1, m3);
    const __m256d sin_neg = _mm256_or_pd(m2, m3);
    const __m256d cos_neg = _mm256_or_pd(m1, m2);

    const __m256d signbit = _mm256_set1_pd(-0.0);
    __m256d s_sel = _mm256_blendv_pd(s, c, swap);
    __m256d c_sel = _mm256_blendv_pd(c, s, swap);
    s_out = _mm256_xor_pd(s_sel, _mm256_and_pd(sin_neg, signbit));
    c_out = _mm256_xor_pd(c_sel, _mm256_and_pd(cos_neg, signbit));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

cplx cexp_dot_avx2(const double* freq, const double* cre, const double* cim,
                   std::size_t n, double x) {
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    const __m256d xv = _mm256_set1_pd(x);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d ph = _mm256_mul_pd(_mm256_loadu_pd(freq + j), xv);
        __m256d s, c;
        sincos4(ph, s, c);
        const __m256d vr = _mm256_loadu_pd(cre + j);
        const __m256d vi = _mm256_loadu_pd(cim + j);
        acc_re = _mm256_fmadd_pd(vr, c, acc_re);
        acc_re = _mm256_fnmadd_pd(vi, s, acc_re);
        acc_im = _mm256_fmadd_pd(vr, s, acc_im);
        acc_im = _mm256_fmadd_pd(vi, c, acc_im);
    }
    double re = hsum(acc_re), im = hsum(acc_im);
    for (; j < n; ++j) {
        const double ph = freq[j] * x;
        const double c = std::cos(ph);
        const double s = std::sin(ph);
        re += cre[j] * c - cim[j] * s;
        im += cre[j] * s + cim[j] * c;
    }
    return {re, im};
}

cplx weighted_cdot_avx2(const double* w, const cplx* a, const cplx* b, std::size_t n) {
    // lanes hold [re0, im0, re1, im1]
    __m256d acc = _mm256_setzero_pd();
    const __m256d alt_sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
    const double* ad = reinterpret_cast<const double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const __m256d va = _mm256_loadu_pd(ad + 2 * j);
        const __m256d vb = _mm256_loadu_pd(bd + 2 * j);
        const __m256d t1 = _mm256_mul_pd(va, vb);                       // ar*br, ai*bi
        const __m256d vbs = _mm256_permute_pd(vb, 0x5);                 // bi, br
        const __m256d t2 = _mm256_mul_pd(_mm256_mul_pd(va, alt_sign), vbs); // ar*bi, -ai*br
        const __m256d pair = _mm256_hadd_pd(t1, t2);                    // [re0, im0, re1, im1]
        const __m128d w2 = _mm_loadu_pd(w + j);
        const __m256d ww = _mm256_set_m128d(_mm_unpackhi_pd(w2, w2), _mm_unpacklo_pd(w2, w2));
        acc = _mm256_fmadd_pd(ww, pair, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double re = lanes[0] + lanes[2];
    double im = lanes[1] + lanes[3];
    for (; j < n; ++j) {
        const double ar = a[j].real(), ai = a[j].imag();
        const double br = b[j].real(), bi = b[j].imag();
        re += w[j] * (ar * br + ai * bi);
        im += w[j] * (ar * bi - ai * br);
    }
    return {re, im};
}

double weighted_abs2_avx2(const double* w, const cplx* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const double* ad = reinterpret_cast<const double*>(a);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const __m256d va = _mm256_loadu_pd(ad + 2 * j);
        const __m128d w2 = _mm_loadu_pd(w + j);
        const __m256d ww = _mm256_set_m128d(_mm_unpackhi_pd(w2, w2), _mm_unpacklo_pd(w2, w2));
        acc = _mm256_fmadd_pd(ww, _mm256_mul_pd(va, va), acc);
    }
    double s = hsum(acc);
    for (; j < n; ++j)
        s += w[j] * (a[j].real() * a[j].real() + a[j].imag() * a[j].imag());
    return s;
}

} // namespace dsim::kernels

#endif // x86_64
