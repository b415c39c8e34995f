#include "dsim/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace dsim::kernels {

// ---------------------------------------------------------------------------
// Scalar reference kernels
// ---------------------------------------------------------------------------

cplx cexp_dot_scalar(const double* freq, const double* cre, const double* cim,
                     std::size_t n, double x) {
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double ph = freq[j] * x;
        const double c = std::cos(ph);
        const double s = std::sin(ph);
        acc_re += cre[j] * c - cim[j] * s;
        acc_im += cre[j] * s + cim[j] * c;
    }
    return {acc_re, acc_im};
}

cplx weighted_cdot_scalar(const double* w, const cplx* a, const cplx* b, std::size_t n) {
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double ar = a[j].real(), ai = a[j].imag();
        const double br = b[j].real(), bi = b[j].imag();
        acc_re += w[j] * (ar * br + ai * bi);
        acc_im += w[j] * (ar * bi - ai * br);
    }
    return {acc_re, acc_im};
}

double weighted_abs2_scalar(const double* w, const cplx* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        acc += w[j] * (a[j].real() * a[j].real() + a[j].imag() * a[j].imag());
    return acc;
}

// ---------------------------------------------------------------------------
// Backend selection
// ---------------------------------------------------------------------------

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

static Backend detect_backend() {
    if (const char* env = std::getenv("DSIM_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::avx2))
            return Backend::avx2;
        // "auto" and unknown values fall through to detection
    }
    if (backend_available(Backend::avx2)) return Backend::avx2;
    return Backend::scalar;
}

namespace {
int g_backend_override = -1;  // -1: none
}

Backend active_backend() {
    if (g_backend_override >= 0) return static_cast<Backend>(g_backend_override);
    static const Backend b = detect_backend();
    return b;
}

BackendGuard::BackendGuard(Backend b) {
    g_backend_override = static_cast<int>(backend_available(b) ? b : Backend::scalar);
}

BackendGuard::~BackendGuard() { g_backend_override = -1; }

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

cplx cexp_dot(const double* freq, const double* cre, const double* cim,
              std::size_t n, double x, Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
    if (b == Backend::avx2) return cexp_dot_avx2(freq, cre, cim, n, x);
#endif
    (void)b;
    return cexp_dot_scalar(freq, cre, cim, n, x);
}

cplx weighted_cdot(const double* w, const cplx* a, const cplx* b, std::size_t n, Backend bk) {
#if defined(__x86_64__) || defined(_M_X64)
    if (bk == Backend::avx2) return weighted_cdot_avx2(w, a, b, n);
#endif
    (void)bk;
    return weighted_cdot_scalar(w, a, b, n);
}

double weighted_abs2(const double* w, const cplx* a, std::size_t n, Backend bk) {
#if defined(__x86_64__) || defined(_M_X64)
    if (bk == Backend::avx2) return weighted_abs2_avx2(w, a, n);
#endif
    (void)bk;
    return weighted_abs2_scalar(w, a, n);
}

} // namespace dsim::kernels
