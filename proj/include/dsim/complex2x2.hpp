#ifndef DSIM_COMPLEX2X2_HPP
#define DSIM_COMPLEX2X2_HPP

#include <complex>
#include <utility>

namespace dsim {

using cplx = std::complex<double>;

// 2x2 complex matrix, the workhorse of the transfer-matrix formalism.
// Kept as four named entries; the chains here never need anything larger.
struct Mat2c {
    cplx m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};

    static Mat2c identity() { return {}; }

    Mat2c operator*(const Mat2c& o) const {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
                m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
    }

    // (u, v) -> M (u, v)
    std::pair<cplx, cplx> apply(const cplx& u, const cplx& v) const {
        return {m11 * u + m12 * v, m21 * u + m22 * v};
    }

    cplx det() const { return m11 * m22 - m12 * m21; }
};

} // namespace dsim

#endif
