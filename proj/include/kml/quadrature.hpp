#pragma once

#include <span>
#include <vector>

#include "kml/density.hpp"

namespace kml {

struct GaussLegendreRule {
    std::vector<double> nodes;     // in (0,1)
    std::vector<double> weights;   // sum to 1
};

/// Gauss-Legendre rule with q nodes mapped to [0,1]; exact for polynomials
/// of degree <= 2q-1. Newton iteration on the Legendre recurrence.
GaussLegendreRule gauss_legendre_01(int q);

/// Tensorized Gauss-Legendre grid on [0,1]^d with per-axis order q and the
/// design density tabulated at the nodes.
class QuadratureGrid {
public:
    QuadratureGrid(int dim, int q, const DensityHandle& density,
                   std::size_t max_points = 20000);

    int dimension() const { return dim_; }
    int order() const { return q_; }
    std::size_t size() const { return weights_.size(); }

    std::span<const double> point(std::size_t i) const {
        return {points_.data() + i * static_cast<std::size_t>(dim_),
                static_cast<std::size_t>(dim_)};
    }
    double weight(std::size_t i) const { return weights_[i]; }
    double density_value(std::size_t i) const { return density_values_[i]; }

    const std::vector<double>& axis_nodes() const { return axis_.nodes; }
    const std::vector<double>& axis_weights() const { return axis_.weights; }
    const std::vector<double>& flat_points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& density_values() const { return density_values_; }

private:
    int dim_;
    int q_;
    GaussLegendreRule axis_;
    std::vector<double> points_;
    std::vector<double> weights_;
    std::vector<double> density_values_;
};

} // namespace kml
