#pragma once

#include <vector>

#include "kml/errors.hpp"

namespace kml {

// Shifted Legendre polynomials P~_k on [0,1], P~_k(t) = P_k(2t-1). They are
// L^2([0,1])-orthogonal with int P~_j P~_k = delta_jk / (2k+1) and bounded by
// one on the interval, which makes them the numerically safe basis for the
// moment-weight evaluations: the monomial coefficients coming out of the
// Hilbert solve cancel catastrophically already for moderate degrees, the
// Legendre recurrence does not.

/// Values P~_0(t), ..., P~_{count-1}(t).
inline std::vector<double> shifted_legendre_values(int count, double t) {
    if (count < 1) throw size_error("shifted_legendre_values: count must be >= 1");
    std::vector<double> p(static_cast<std::size_t>(count));
    const double u = 2.0 * t - 1.0;
    p[0] = 1.0;
    if (count > 1) p[1] = u;
    for (int k = 1; k + 1 < count; ++k)
        p[static_cast<std::size_t>(k + 1)] =
            ((2.0 * k + 1.0) * u * p[static_cast<std::size_t>(k)] -
             k * p[static_cast<std::size_t>(k - 1)]) /
            (k + 1.0);
    return p;
}

} // namespace kml
