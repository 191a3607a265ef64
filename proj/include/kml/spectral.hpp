#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kml/moment.hpp"
#include "kml/quadrature.hpp"
#include "kml/radial.hpp"

#include <nlohmann/json_fwd.hpp>

namespace kml {

/**
 * Discretization of the integral operator (L_k f)(y) = int k(z,y) f(z) p(z) dz
 * by tensorized Gauss-Legendre quadrature. The eigenproblem is solved in the
 * symmetrized form B = D K D with D = diag(sqrt(w_i p_i)); node values of the
 * eigenfunctions are recovered as phi_l(z_i) = v_{l,i} / sqrt(w_i p_i) and
 * extended off the grid through the quadrature eigen-relation.
 */
class SpectralModel {
public:
    static constexpr double kRankCutoff = 1e-14;

    const QuadratureGrid& grid() const { return grid_; }
    const RadialKernelSpec& kernel() const { return kernel_; }
    int rank() const { return rank_; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

    /// Node values of phi_l (1-based l), column view.
    Eigen::VectorXd eigenfunction_nodes(int l) const;

    /// N x rank table of node values, one eigenfunction per column.
    const Eigen::MatrixXd& eigenfunction_table() const { return phi_; }

    /// Off-grid phi_l(x) = (1/mu_l) sum_i w_i p_i k(x, z_i) phi_l(z_i).
    double nystrom_extend(int l, std::span<const double> x) const;

    /// Quadrature application of the operator to node values f.
    double apply_operator(std::span<const double> f, std::span<const double> y) const;
    std::vector<double> apply_operator_nodes(std::span<const double> f) const;

    friend SpectralModel build_model(const RadialKernelSpec& kernel, int q);
    friend SpectralModel model_from_json(const nlohmann::json& j);

private:
    SpectralModel(QuadratureGrid grid, RadialKernelSpec kernel)
        : grid_(std::move(grid)), kernel_(std::move(kernel)) {}

    QuadratureGrid grid_;
    RadialKernelSpec kernel_;
    std::vector<double> eigenvalues_;   // non-increasing, length = rank
    Eigen::MatrixXd phi_;               // N x rank node values
    int rank_ = 0;
};

SpectralModel build_model(const RadialKernelSpec& kernel, int q);

/// Spectral representation of the regularized weight function
/// w_lambda^x = sum_l mu_l/(lambda+mu_l) phi_l(x) phi_l.
struct WeightFunctionRep {
    double lambda = 0.0;
    std::vector<double> coefficients;   // mu_l/(lambda+mu_l) phi_l(x)
    double squared_l2_norm = 0.0;       // sum coeff_l^2
    double mixed_norm = 0.0;            // sum mu_l/(lambda+mu_l) phi_l(x)^2
};

WeightFunctionRep weight_function(const SpectralModel& model, std::span<const double> x,
                                  double lambda);

/// sup over a uniform G^d grid of the mixed series
/// sum_l mu_l/(lambda+mu_l) phi_l(x)^2 (the form the growth bound controls).
double empirical_ninf(const SpectralModel& model, double lambda, int grid_resolution);

/// max over a uniform G^d grid of |(L_k W)(y) - k(x,y)|.
double empirical_sup_error(const SpectralModel& model, const ProductWeight& w,
                           std::span<const double> x, int grid_resolution);

/// Squared RKHS error sum_l <L_k W - k_x, phi_l>^2 / mu_l with
/// <k_x, phi_l> = mu_l phi_l(x).
double empirical_rkhs_error(const SpectralModel& model, const ProductWeight& w,
                            std::span<const double> x);

struct DecayFit {
    double c_big = 0.0;     // fitted C in mu_l ~ C exp(-c (l+d)^{2/d})
    double c_small = 0.0;   // fitted c
    double max_residual = 0.0;
    std::vector<double> residuals;   // ln mu_l - (ln C - c (l+d)^{2/d})
};

/// Least-squares fit of ln mu_l = ln C - c (l+d)^{2/d} over the retained
/// spectrum. Requires rank >= 8.
DecayFit eigen_decay_fit(const SpectralModel& model);

/// Verifies the interpolation inequality
///   ||f||_inf <= (pi/sqrt(6)) b ||f||_s^{3/s} ||f||_2^{1-3/s}
/// for f = sum c_l phi_l, with ||f||_s^2 = sum c_l^2 l^{2s}. The sup norm is
/// taken over a fine grid through the Nystrom extension.
BoundReport interpolation_check(const SpectralModel& model, std::span<const double> coefficients,
                                double s, double b, int grid_resolution = 512);

/// Cache format, version-tagged.
nlohmann::json to_json(const SpectralModel& model);
SpectralModel model_from_json(const nlohmann::json& j);

} // namespace kml
