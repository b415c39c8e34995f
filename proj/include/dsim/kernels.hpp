#ifndef DSIM_KERNELS_HPP
#define DSIM_KERNELS_HPP

#include <complex>
#include <cstddef>
#include <string>

namespace dsim::kernels {

using cplx = std::complex<double>;

// Inner-loop kernels behind the spectral quadratures. Each kernel has a
// scalar reference implementation and an AVX2 variant; the active backend
// is chosen at runtime from CPU features, overridable with the environment
// variable DSIM_KERNELS (values: auto, scalar, avx2). The variants are
// equivalence-tested against each other; summation order differs between
// backends, so results may differ at rounding level.

enum class Backend { scalar, avx2 };

/// Backend selected from CPU detection + DSIM_KERNELS (cached after first call).
Backend active_backend();

/// Scoped override of the active backend (used by the reproduction driver to
/// pin results to the scalar reference). Not reentrant across threads.
class BackendGuard {
public:
    explicit BackendGuard(Backend b);
    ~BackendGuard();
    BackendGuard(const BackendGuard&) = delete;
    BackendGuard& operator=(const BackendGuard&) = delete;
};

/// True if this build/CPU can run the given backend.
bool backend_available(Backend b);

std::string backend_name(Backend b);

/// sum_j (cre[j] + i*cim[j]) * exp(i * freq[j] * x)
cplx cexp_dot(const double* freq, const double* cre, const double* cim,
              std::size_t n, double x, Backend b);
inline cplx cexp_dot(const double* freq, const double* cre, const double* cim,
                     std::size_t n, double x) {
    return cexp_dot(freq, cre, cim, n, x, active_backend());
}

/// sum_j w[j] * conj(a[j]) * b[j]   (interleaved complex arrays)
cplx weighted_cdot(const double* w, const cplx* a, const cplx* b,
                   std::size_t n, Backend bk);
inline cplx weighted_cdot(const double* w, const cplx* a, const cplx* b, std::size_t n) {
    return weighted_cdot(w, a, b, n, active_backend());
}

/// sum_j w[j] * |a[j]|^2
double weighted_abs2(const double* w, const cplx* a, std::size_t n, Backend bk);
inline double weighted_abs2(const double* w, const cplx* a, std::size_t n) {
    return weighted_abs2(w, a, n, active_backend());
}

// Scalar reference implementations (always available; used as the oracle in
// equivalence tests).
cplx cexp_dot_scalar(const double* freq, const double* cre, const double* cim,
                     std::size_t n, double x);
cplx weighted_cdot_scalar(const double* w, const cplx* a, const cplx* b, std::size_t n);
double weighted_abs2_scalar(const double* w, const cplx* a, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
cplx cexp_dot_avx2(const double* freq, const double* cre, const double* cim,
                   std::size_t n, double x);
cplx weighted_cdot_avx2(const double* w, const cplx* a, const cplx* b, std::size_t n);
double weighted_abs2_avx2(const double* w, const cplx* a, std::size_t n);
#endif

} // namespace dsim::kernels

#endif
