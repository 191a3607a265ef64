#pragma once

#include <string>
#include <vector>

#include "kml/config.hpp"

namespace kml {

struct CriterionResult {
    std::string id;
    std::string title;
    bool passed = false;
    std::vector<std::string> details;
    double seconds = 0.0;
};

/// The verification suite ids, in run order.
const std::vector<std::string>& criterion_ids();

CriterionResult run_criterion(const std::string& id, const Tolerances& tol);

/// Runs the listed criteria (all when `only` is empty).
std::vector<CriterionResult> run_acceptance(const Tolerances& tol,
                                            const std::vector<std::string>& only = {});

/// Sup error of the operator image of the product weight against the kernel
/// section, computed through the tensor structure of the Gaussian kernel and
/// the product weight under the uniform density. Same quadrature sums as the
/// generic path, reorganized per axis; usable for large m where the generic
/// grid would not fit the node budget.
double sup_error_tensor(double sigma, int dim, int m, int q,
                        const std::vector<double>& anchor_axis, int grid_resolution);

} // namespace kml
