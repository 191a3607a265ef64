#include "kml/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "kml/errors.hpp"

namespace kml {

GaussLegendreRule gauss_legendre_01(int q) {
    if (q < 1) throw size_error("gauss_legendre_01: q must be >= 1");
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(q));
    rule.weights.resize(static_cast<std::size_t>(q));

    const int half = (q + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess, then Newton on P_q.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < q; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = q * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        // Map [-1,1] -> [0,1].
        rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
        rule.nodes[static_cast<std::size_t>(q - 1 - i)] = 0.5 * (1.0 + z);
        rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
        rule.weights[static_cast<std::size_t>(q - 1 - i)] = 0.5 * w;
    }
    return rule;
}

QuadratureGrid::QuadratureGrid(int dim, int q, const DensityHandle& density,
                               std::size_t max_points)
    : dim_(dim), q_(q), axis_(gauss_legendre_01(q)) {
    if (dim < 1) throw size_error("QuadratureGrid: dimension must be >= 1");
    std::size_t n = 1;
    for (int i = 0; i < dim; ++i) {
        n *= static_cast<std::size_t>(q);
        if (n > max_points)
            throw size_error("QuadratureGrid: q^d exceeds the node budget of " +
                             std::to_string(max_points));
    }

    points_.resize(n * static_cast<std::size_t>(dim));
    weights_.resize(n);
    density_values_.resize(n);

    std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        for (int a = 0; a < dim; ++a) {
            const std::size_t k = idx[static_cast<std::size_t>(a)];
            points_[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)] =
                axis_.nodes[k];
            w *= axis_.weights[k];
        }
        weights_[i] = w;
        density_values_[i] = density(point(i));
        // odometer increment
        for (int a = dim - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < static_cast<std::size_t>(q)) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }

    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += weights_[i] * density_values_[i];
    if (std::abs(mass - 1.0) > 1e-8)
        throw numerical_error("QuadratureGrid: density does not integrate to one (got " +
                              std::to_string(mass) + ")");
}

} // namespace kml
