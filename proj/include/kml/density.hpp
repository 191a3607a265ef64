#pragma once

#include <functional>
#include <span>
#include <string>

#include "kml/errors.hpp"

namespace kml {

/// Design-measure density on [0,1]^d with its bounds supplied up front.
/// The library never estimates p_min/p_max/c_p from samples.
struct DensityHandle {
    std::string name = "uniform";
    std::function<double(std::span<const double>)> eval;
    double p_min = 1.0;
    double p_max = 1.0;
    double c_p = 1.0;      // sup 1/p
    double param = 0.0;    // family parameter (eps for the perturbed family)
    bool uniform = true;

    double operator()(std::span<const double> z) const {
        const double v = eval ? eval(z) : 1.0;
        if (!(v > 0.0)) throw density_error("density: nonpositive sample");
        return v;
    }
};

inline DensityHandle uniform_density() {
    DensityHandle h;
    h.name = "uniform";
    h.eval = [](std::span<const double>) { return 1.0; };
    return h;
}

/// p(z) = 1 + eps * prod_i (2 z_i - 1); integrates to one on [0,1]^d for any
/// dimension and stays within [1-eps, 1+eps].
inline DensityHandle perturbed_density(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw domain_error("perturbed_density: eps must lie in (0,1)");
    DensityHandle h;
    h.name = "poly-perturbed";
    h.eval = [eps](std::span<const double> z) {
        double prod = 1.0;
        for (double zi : z) prod *= 2.0 * zi - 1.0;
        return 1.0 + eps * prod;
    };
    h.p_min = 1.0 - eps;
    h.p_max = 1.0 + eps;
    h.c_p = 1.0 / (1.0 - eps);
    h.param = eps;
    h.uniform = false;
    return h;
}

} // namespace kml
