#include "kml/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "kml/errors.hpp"
#include "kml/rng.hpp"

namespace kml {

namespace {

Eigen::MatrixXd gaussian_cross(double sigma, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j)
            out(i, j) = std::exp(-sigma * (a.row(i) - b.row(j)).squaredNorm());
    return out;
}

double gauss_draw(Xoshiro256pp& rng) {
    // Box-Muller; one value per call keeps the stream layout simple.
    double u1 = rng.uniform01();
    while (u1 <= 0.0) u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, Eigen::Index m,
                                                     Xoshiro256pp& rng) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto j = i + static_cast<Eigen::Index>(rng.uniform01() * static_cast<double>(n - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(std::min(j, n - 1))]);
    }
    idx.resize(static_cast<std::size_t>(m));
    return idx;
}

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

} // namespace

double target_value(const std::string& id, std::span<const double> x) {
    if (id == "one") return 1.0;
    if (id == "gauss-bump") {
        double r2 = 0.0;
        for (double xi : x) r2 += (xi - 0.5) * (xi - 0.5);
        return std::exp(-r2);
    }
    if (id == "sine-sum") {
        double s = 0.0;
        for (double xi : x) s += xi;
        return std::sin(2.0 * std::numbers::pi * s);
    }
    throw config_error("unknown target id: " + id);
}

Dataset generate_dataset(int d, long long n, const std::string& target_id, double noise,
                         std::uint64_t seed, const DensityHandle& density) {
    if (d < 1) throw domain_error("generate_dataset: dimension must be >= 1");
    if (n < 10) throw domain_error("generate_dataset: n must be >= 10");
    target_value(target_id, std::vector<double>(static_cast<std::size_t>(d), 0.5));   // id check

    Dataset data;
    data.inputs.resize(static_cast<Eigen::Index>(n), d);
    data.targets.resize(static_cast<Eigen::Index>(n));
    data.target_id = target_id;
    data.noise = noise;
    data.seed = seed;

    Xoshiro256pp rng(seed);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
        // rejection sampling against the uniform proposal
        while (true) {
            for (auto& v : x) v = rng.uniform01();
            if (density.uniform) break;
            const double p = density(x);
            if (rng.uniform01() * density.p_max <= p) break;
        }
        for (int a = 0; a < d; ++a) data.inputs(i, a) = x[static_cast<std::size_t>(a)];
        double y = target_value(target_id, x);
        if (noise > 0.0) y += noise * gauss_draw(rng);
        data.targets(i) = y;
    }
    return data;
}

NystromModel fit_nystrom(const Dataset& data, const RadialKernelSpec& kernel, int m,
                         double lambda, std::uint64_t seed) {
    const Eigen::Index n = data.inputs.rows();
    if (m < 1 || m > n) throw domain_error("fit_nystrom: requires 1 <= m <= n");
    if (lambda < 0.0) throw domain_error("fit_nystrom: lambda must be >= 0");
    if (kernel.family != RadialKernelSpec::Family::gaussian)
        throw domain_error("fit_nystrom: Gaussian kernels only");
    if (kernel.dim != static_cast<int>(data.inputs.cols()))
        throw shape_error("fit_nystrom: kernel/data dimension mismatch");

    Xoshiro256pp rng(seed);
    const auto chosen = sample_without_replacement(n, m, rng);

    NystromModel model;
    model.sigma = kernel.sigma;
    model.dim = kernel.dim;
    model.lambda = lambda;
    model.support.resize(m, data.inputs.cols());
    for (int i = 0; i < m; ++i)
        model.support.row(i) = data.inputs.row(chosen[static_cast<std::size_t>(i)]);

    const Eigen::MatrixXd knm = gaussian_cross(kernel.sigma, data.inputs, model.support);
    const Eigen::MatrixXd kmm = gaussian_cross(kernel.sigma, model.support, model.support);

    // beta minimizes |Knm b - y|^2 + n lambda b^T Kmm b. Solving in the
    // augmented least-squares form [Knm; sqrt(n lambda) L^T] keeps the
    // conditioning un-squared; the normal equations lose the tiny-lambda
    // regime entirely. Near-machine-precision lambda still leaves Kmm
    // numerically singular by design, so its factorization carries additive
    // jitter escalating x10 at most 3 times.
    double jitter = 1e-14 * kmm.trace() / static_cast<double>(m);
    for (int level = 0; level <= 3; ++level) {
        Eigen::MatrixXd kmm_j = kmm;
        kmm_j.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(kmm_j);
        if (llt.info() == Eigen::Success) {
            const double ridge = std::sqrt(static_cast<double>(n) * lambda);
            Eigen::MatrixXd aug(n + m, m);
            aug.topRows(n) = knm;
            aug.bottomRows(m) = ridge * Eigen::MatrixXd(llt.matrixU());
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
            rhs.head(n) = data.targets;

            Eigen::VectorXd beta = aug.colPivHouseholderQr().solve(rhs);
            // least-squares optimality residual, relative
            const Eigen::VectorXd grad = aug.transpose() * (aug * beta - rhs);
            const double scale = (aug.transpose() * rhs).norm();
            const double rel_res = scale > 0.0 ? grad.norm() / scale : grad.norm();
            if (beta.allFinite() && rel_res < 1e-6) {
                model.beta = std::move(beta);
                model.jitter_level = level;
                model.residual = rel_res;
                return model;
            }
        }
        jitter *= 10.0;
    }
    throw numerical_error("fit_nystrom: singular system after jitter escalation");
}

Eigen::VectorXd predict(const NystromModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.support.cols()) throw shape_error("predict: dimension mismatch");
    return gaussian_cross(model.sigma, x, model.support) * model.beta;
}

KrrModel exact_krr(const Dataset& data, const RadialKernelSpec& kernel, double lambda) {
    if (kernel.family != RadialKernelSpec::Family::gaussian)
        throw domain_error("exact_krr: Gaussian kernels only");
    const Eigen::Index n = data.inputs.rows();
    KrrModel model;
    model.sigma = kernel.sigma;
    model.inputs = data.inputs;
    Eigen::MatrixXd k = gaussian_cross(kernel.sigma, data.inputs, data.inputs);
    k.diagonal().array() += static_cast<double>(n) * lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
    if (ldlt.info() != Eigen::Success) throw numerical_error("exact_krr: factorization failed");
    model.alpha = ldlt.solve(data.targets);
    model.alpha += ldlt.solve(data.targets - k * model.alpha);
    return model;
}

Eigen::VectorXd predict(const KrrModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.inputs.cols()) throw shape_error("predict: dimension mismatch");
    return gaussian_cross(model.sigma, x, model.inputs) * model.alpha;
}

long long required_support(const RadialKernelSpec& kernel, double lambda) {
    return nystrom_support_points(kernel, lambda);
}

std::string schedule_name(LambdaSchedule s) {
    switch (s) {
        case LambdaSchedule::one_over_n: return "1/n";
        case LambdaSchedule::exp_root: return "exp-root";
        case LambdaSchedule::fixed_tiny: return "1e-12";
    }
    throw config_error("schedule_name: unknown schedule");
}

double schedule_lambda(LambdaSchedule s, long long n, int d) {
    switch (s) {
        case LambdaSchedule::one_over_n: return 1.0 / static_cast<double>(n);
        case LambdaSchedule::exp_root:
            return std::exp(-std::pow(static_cast<double>(n), 1.0 / (2.0 * d + 1.0)));
        case LambdaSchedule::fixed_tiny: return 1e-12;
    }
    throw config_error("schedule_lambda: unknown schedule");
}

std::vector<ScheduleRow> schedule_experiment(const ScheduleConfig& config) {
    std::vector<ScheduleRow> rows;
    if (config.lambda_schedules.empty()) return rows;

    const RadialKernelSpec kernel = gaussian_kernel(config.sigma, config.d);
    for (long long n : config.n_values) {
        for (std::uint64_t seed : config.seeds) {
            const Dataset data =
                generate_dataset(config.d, n, config.target_id, config.noise, seed);
            // seed-derived permutation, fixed 1/5 holdout
            const Eigen::Index n_idx = data.inputs.rows();
            std::vector<Eigen::Index> perm(static_cast<std::size_t>(n_idx));
            std::iota(perm.begin(), perm.end(), Eigen::Index{0});
            Xoshiro256pp rng(substream_seed(seed, 0xb07d));
            for (Eigen::Index i = n_idx - 1; i > 0; --i) {
                const auto j =
                    static_cast<Eigen::Index>(rng.uniform01() * static_cast<double>(i + 1));
                std::swap(perm[static_cast<std::size_t>(i)],
                          perm[static_cast<std::size_t>(std::min(j, i))]);
            }
            const Eigen::Index n_test = n_idx / 5;
            const Eigen::Index n_train = n_idx - n_test;

            Dataset train;
            train.inputs.resize(n_train, config.d);
            train.targets.resize(n_train);
            train.target_id = data.target_id;
            train.noise = data.noise;
            train.seed = seed;
            Eigen::MatrixXd test_x(n_test, config.d);
            Eigen::VectorXd test_y(n_test);
            for (Eigen::Index i = 0; i < n_test; ++i) {
                test_x.row(i) = data.inputs.row(perm[static_cast<std::size_t>(i)]);
                test_y(i) = data.targets(perm[static_cast<std::size_t>(i)]);
            }
            for (Eigen::Index i = 0; i < n_train; ++i) {
                train.inputs.row(i) = data.inputs.row(perm[static_cast<std::size_t>(n_test + i)]);
                train.targets(i) = data.targets(perm[static_cast<std::size_t>(n_test + i)]);
            }

            for (LambdaSchedule sched : config.lambda_schedules) {
                const double lambda = schedule_lambda(sched, n, config.d);
                for (int m : config.m_values) {
                    const int m_eff = static_cast<int>(std::min<Eigen::Index>(m, n_train));
                    const NystromModel model =
                        fit_nystrom(train, kernel, m_eff, lambda, substream_seed(seed, 0x5e1ec7));
                    ScheduleRow row;
                    row.n = n;
                    row.d = config.d;
                    row.sigma = config.sigma;
                    row.lambda = lambda;
                    row.schedule = schedule_name(sched);
                    row.m = m_eff;
                    row.seed = seed;
                    row.train_rmse = rmse(predict(model, train.inputs), train.targets);
                    row.test_rmse = rmse(predict(model, test_x), test_y);
                    row.jitter_level = model.jitter_level;
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

} // namespace kml
