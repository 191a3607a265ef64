#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kml/density.hpp"
#include "kml/radial.hpp"

namespace kml {

struct Dataset {
    Eigen::MatrixXd inputs;   // n x d, rows in [0,1]^d
    Eigen::VectorXd targets;
    std::string target_id;
    double noise = 0.0;
    std::uint64_t seed = 0;
};

/// Registered target functions: "one", "gauss-bump", "sine-sum".
double target_value(const std::string& id, std::span<const double> x);

/// i.i.d. inputs from the design density (rejection sampling off the uniform
/// proposal), targets f*(x) + N(0, noise^2). Deterministic under the seed.
Dataset generate_dataset(int d, long long n, const std::string& target_id, double noise,
                         std::uint64_t seed, const DensityHandle& density = uniform_density());

struct NystromModel {
    double sigma = 1.0;
    int dim = 1;
    Eigen::MatrixXd support;   // m x d
    Eigen::VectorXd beta;
    double lambda = 0.0;
    int jitter_level = 0;      // escalation steps taken (0 = plain solve)
    double residual = 0.0;     // relative residual of the final solve
};

/// Uniform-random support subset of size m (without replacement, seeded),
/// then the regularized least squares
///   (Knm^T Knm + n lambda Kmm) beta = Knm^T y
/// via LDLT with additive jitter escalation and one refinement sweep.
NystromModel fit_nystrom(const Dataset& data, const RadialKernelSpec& kernel, int m,
                         double lambda, std::uint64_t seed);

Eigen::VectorXd predict(const NystromModel& model, const Eigen::MatrixXd& x);

struct KrrModel {
    double sigma = 1.0;
    Eigen::MatrixXd inputs;
    Eigen::VectorXd alpha;
};

/// Dense kernel ridge regression (K + n lambda I) alpha = y; the reference
/// the m = n Nystrom fit is checked against.
KrrModel exact_krr(const Dataset& data, const RadialKernelSpec& kernel, double lambda);

Eigen::VectorXd predict(const KrrModel& model, const Eigen::MatrixXd& x);

/// Support-point criterion, delegated to the kernel-bound formula.
long long required_support(const RadialKernelSpec& kernel, double lambda);

enum class LambdaSchedule { one_over_n, exp_root, fixed_tiny };

std::string schedule_name(LambdaSchedule s);
double schedule_lambda(LambdaSchedule s, long long n, int d);

struct ScheduleConfig {
    int d = 1;
    double sigma = 1.0;
    std::vector<long long> n_values;
    std::vector<LambdaSchedule> lambda_schedules;
    std::vector<int> m_values;
    std::vector<std::uint64_t> seeds;
    std::string target_id = "gauss-bump";
    double noise = 0.0;
};

struct ScheduleRow {
    long long n = 0;
    int d = 1;
    double sigma = 1.0;
    double lambda = 0.0;
    std::string schedule;
    int m = 0;
    std::uint64_t seed = 0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    int jitter_level = 0;
};

/// One row per (n, schedule, m, seed) cell; fixed 1/5 holdout split derived
/// from the seed. Deterministic.
std::vector<ScheduleRow> schedule_experiment(const ScheduleConfig& config);

} // namespace kml
