#include "dsim/barrier.hpp"

#include <cmath>
#include <string>

#include "dsim/errors.hpp"

namespace dsim {

void BarrierArray::validate() const {
    if (positions.size() != strengths.size())
        throw ValidationError("barrier array: positions and strengths differ in length (" +
                              std::to_string(positions.size()) + " vs " +
                              std::to_string(strengths.size()) + ")");
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw ValidationError("barrier array: mass must be positive and finite");
    if (!(hbar > 0.0) || !std::isfinite(hbar))
        throw ValidationError("barrier array: hbar must be positive and finite");
    if (!std::isfinite(inner_potential))
        throw ValidationError("barrier array: inner potential must be finite");
    if (positions.empty()) return;
    if (positions.front() != 0.0)
        throw ValidationError("barrier array: first position must be 0 (got " +
                              std::to_string(positions.front()) + ")");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!std::isfinite(positions[i]) || !std::isfinite(strengths[i]))
            throw ValidationError("barrier array: non-finite entry at index " + std::to_string(i));
        if (i > 0 && !(positions[i] > positions[i - 1]))
            throw ValidationError("barrier array: positions not strictly increasing at index " +
                                  std::to_string(i));
    }
}

BarrierArray BarrierArray::equally_spaced(std::size_t n, double span, double alpha,
                                          double mass, double hbar) {
    if (n < 2) throw DomainError("equally_spaced: need at least two spikes");
    if (!(span > 0.0)) throw DomainError("equally_spaced: span must be positive");
    BarrierArray b;
    b.mass = mass;
    b.hbar = hbar;
    b.positions.resize(n);
    b.strengths.assign(n, alpha);
    for (std::size_t j = 0; j < n; ++j)
        b.positions[j] = span * static_cast<double>(j) / static_cast<double>(n - 1);
    b.positions.front() = 0.0;
    b.positions.back() = span;
    b.validate();
    return b;
}

} // namespace dsim
