#include "kml/random_gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "kml/errors.hpp"
#include "kml/rng.hpp"

namespace kml {

MinGapLaw::MinGapLaw(int n_) : n(n_) {
    if (n < 2) throw domain_error("MinGapLaw: n must be >= 2");
}

double min_gap_density(const MinGapLaw& law, double m) {
    const double n = static_cast<double>(law.n);
    if (m < 0.0 || m > 1.0 / (n - 1.0)) return 0.0;
    return n * (n - 1.0) * std::pow(1.0 - (n - 1.0) * m, law.n - 1);
}

double min_gap_survival(const MinGapLaw& law, double m) {
    const double n = static_cast<double>(law.n);
    const double base = 1.0 - (n - 1.0) * m;
    if (base <= 0.0) return 0.0;
    return std::min(1.0, std::pow(base, law.n));
}

double min_gap_cdf(const MinGapLaw& law, double m) {
    if (m <= 0.0) return 0.0;
    return 1.0 - min_gap_survival(law, m);
}

std::vector<double> sample_min_gap(const MinGapLaw& law, std::uint64_t seed, long long r) {
    if (r < 1) throw domain_error("sample_min_gap: replications must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(r));
    std::vector<double> u(static_cast<std::size_t>(law.n));
    Xoshiro256pp rng(seed);
    for (long long rep = 0; rep < r; ++rep) {
        for (auto& v : u) v = rng.uniform01();
        std::sort(u.begin(), u.end());
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < u.size(); ++i) gap = std::min(gap, u[i] - u[i - 1]);
        out[static_cast<std::size_t>(rep)] = gap;
    }
    return out;
}

namespace {

McEstimate mc_from_sums(double sum, double sum_sq, long long r, std::uint64_t seed) {
    McEstimate est;
    est.replications = r;
    est.seed = seed;
    est.value = sum / static_cast<double>(r);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(r) - est.value * est.value);
    est.std_error = std::sqrt(var / static_cast<double>(r));
    return est;
}

} // namespace

ExpGapBound expectation_exp_bound(const MinGapLaw& law, double c, std::uint64_t seed,
                                  long long r) {
    if (!(c > 0.0)) throw domain_error("expectation_exp_bound: c must be positive");
    if (r < 1) throw domain_error("expectation_exp_bound: replications must be >= 1");

    ExpGapBound out;
    out.a = std::min(std::pow(c, -2.0 / 3.0) / 3.0, 1.0 / (2.0 * (law.n - 1)));
    const double decay = std::exp(-2.0 * c / (out.a * out.a));
    out.lower = 0.25 * std::exp(-(law.n - 1.0)) * decay;
    out.lower_stated = 4.0 * decay;

    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> u(static_cast<std::size_t>(law.n));
    Xoshiro256pp rng(seed);
    for (long long rep = 0; rep < r; ++rep) {
        for (auto& v : u) v = rng.uniform01();
        std::sort(u.begin(), u.end());
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < u.size(); ++i) gap = std::min(gap, u[i] - u[i - 1]);
        const double x = gap > 0.0 ? std::exp(-c / (gap * gap)) : 0.0;
        sum += x;
        sum_sq += x * x;
    }
    out.mc = mc_from_sums(sum, sum_sq, r, seed);
    return out;
}

McEstimate gram_min_eigen_experiment(double sigma, int n, std::uint64_t seed, long long r) {
    if (n < 1 || n > 60) throw size_error("gram_min_eigen_experiment: requires 1 <= n <= 60");
    if (r < 1 || r > 2000) throw size_error("gram_min_eigen_experiment: requires 1 <= R <= 2000");

    double sum = 0.0, sum_sq = 0.0;
    Eigen::MatrixXd k(n, n);
    std::vector<double> u(static_cast<std::size_t>(n));
    Xoshiro256pp rng(seed);
    for (long long rep = 0; rep < r; ++rep) {
        for (auto& v : u) v = rng.uniform01();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double d = u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(j)];
                k(i, j) = std::exp(-sigma * d * d);
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
        const double lmin = solver.eigenvalues()(0);
        if (lmin < -1e-10)
            throw numerical_error("gram_min_eigen_experiment: Gram matrix not PSD");
        sum += lmin;
        sum_sq += lmin * lmin;
    }
    return mc_from_sums(sum, sum_sq, r, seed);
}

StarsBarsCheck stars_bars_check(int d, int n) {
    if (d < 2 || d > 6) throw size_error("stars_bars_check: requires 2 <= d <= 6");
    if (n < d || n > 20) throw size_error("stars_bars_check: requires d <= n <= 20");

    // Count positive-integer tuples (i_1..i_d) with sum <= n by recursion.
    std::function<long long(int, int)> count = [&](int left, int budget) -> long long {
        if (left == 0) return 1;
        long long total = 0;
        for (int i = 1; i + (left - 1) <= budget; ++i) total += count(left - 1, budget - i);
        return total;
    };

    StarsBarsCheck out;
    out.lhs = count(d, n);
    const double dd = static_cast<double>(d);
    const double pw = std::pow(static_cast<double>(n - 1), d);
    out.rhs_statement = pw / std::pow(dd - 1.0, d - 1) - dd;
    out.rhs_proof = pw / (dd * std::pow(dd - 1.0, d - 1)) - dd;
    out.holds = static_cast<double>(out.lhs) >= out.rhs_proof;
    out.holds_statement = static_cast<double>(out.lhs) >= out.rhs_statement;
    return out;
}

TensorDecayCheck tensor_decay_check(double rho, int d, int l_max) {
    if (d != 2 && d != 3) throw size_error("tensor_decay_check: d must be 2 or 3");
    if (l_max < 1 || l_max > 500) throw size_error("tensor_decay_check: requires 1 <= L <= 500");
    if (!(rho > 0.0)) throw domain_error("tensor_decay_check: rho must be positive");

    // Enumerate products e^{-rho sum l_i^2} for indices up to K per axis. Any
    // excluded tuple has sum l_i^2 > K^2, so taking K generously beyond the
    // L-th shell keeps the sorted head exact.
    const int k = 40;
    std::vector<double> exponents;   // sum of squares
    std::vector<int> idx(static_cast<std::size_t>(d), 1);
    while (true) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) {
            const double v = static_cast<double>(idx[static_cast<std::size_t>(a)]);
            s += v * v;
        }
        exponents.push_back(s);
        int a = d - 1;
        while (a >= 0 && idx[static_cast<std::size_t>(a)] == k) {
            idx[static_cast<std::size_t>(a)] = 1;
            --a;
        }
        if (a < 0) break;
        ++idx[static_cast<std::size_t>(a)];
    }
    std::sort(exponents.begin(), exponents.end());
    if (exponents.size() < static_cast<std::size_t>(l_max))
        throw size_error("tensor_decay_check: enumeration shorter than L");
    // Exactness of the head: the L-th smallest exponent must be below K^2.
    if (exponents[static_cast<std::size_t>(l_max - 1)] >= static_cast<double>(k) * k)
        throw numerical_error("tensor_decay_check: enumeration bound too small");

    const double dd = static_cast<double>(d);
    const double c_const = 2.0 * std::pow(dd, 2.0 / dd) * std::pow(dd - 1.0, 2.0 * (dd - 1.0) / dd);
    const double big_c = std::exp(-8.0 * rho);

    TensorDecayCheck out;
    out.holds = true;
    out.min_margin = std::numeric_limits<double>::infinity();
    for (int l = 1; l <= l_max; ++l) {
        const double mu = std::exp(-rho * exponents[static_cast<std::size_t>(l - 1)]);
        const double bound = big_c * std::exp(-c_const * rho * std::pow(l + dd, 2.0 / dd));
        out.min_margin = std::min(out.min_margin, mu - bound);
        if (mu < bound) out.holds = false;
    }
    return out;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw domain_error("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::abs(f - lo), std::abs(hi - f)});
    }
    return d;
}

} // namespace kml
