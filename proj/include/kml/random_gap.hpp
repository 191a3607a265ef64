#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace kml {

/// Law of the minimal pairwise gap M of n i.i.d. uniforms on [0,1]:
/// density n(n-1)(1-(n-1)m)^{n-1} on [0, 1/(n-1)].
struct MinGapLaw {
    int n;

    explicit MinGapLaw(int n_);
};

double min_gap_density(const MinGapLaw& law, double m);

/// P(M > m) = (1-(n-1)m)^n, clipped to [0,1].
double min_gap_survival(const MinGapLaw& law, double m);

double min_gap_cdf(const MinGapLaw& law, double m);

/// R independent draws of M, reproducible under the seed.
std::vector<double> sample_min_gap(const MinGapLaw& law, std::uint64_t seed, long long r);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long long replications = 0;
    std::uint64_t seed = 0;
};

struct ExpGapBound {
    McEstimate mc;
    double lower = 0.0;          // proof-backed: (1/4) e^{-(n-1)} e^{-2c/a^2}
    double lower_stated = 0.0;   // displayed form 4 e^{-2c/a^2}; falsified, kept as regression
    double a = 0.0;              // min{c^{-2/3}/3, 1/(2(n-1))}
};

/// Monte Carlo estimate of E e^{-c/M^2} together with the closed-form lower
/// bound. The displayed constant of the bound contradicts its own derivation
/// (it already exceeds one at n=2, c=0.01); `lower` carries the derivation's
/// value, `lower_stated` the displayed one.
ExpGapBound expectation_exp_bound(const MinGapLaw& law, double c, std::uint64_t seed,
                                  long long r);

/// Monte Carlo mean of the smallest eigenvalue of the n x n Gaussian Gram
/// matrix at i.i.d. uniform points on [0,1].
McEstimate gram_min_eigen_experiment(double sigma, int n, std::uint64_t seed, long long r);

struct StarsBarsCheck {
    long long lhs = 0;            // #{(i_1..i_d) positive, sum <= n} by enumeration
    double rhs_proof = 0.0;       // (n-1)^d / (d (d-1)^{d-1}) - d
    double rhs_statement = 0.0;   // (n-1)^d / (d-1)^{d-1} - d
    bool holds = false;           // lhs >= rhs_proof
    bool holds_statement = false; // lhs >= rhs_statement (fails at d=2, n=4)
};

StarsBarsCheck stars_bars_check(int d, int n);

struct TensorDecayCheck {
    bool holds = false;
    double min_margin = 0.0;   // min over l of mu_l^{(d)} - bound_l
};

/// Builds mu_l = e^{-rho l^2}, forms the sorted d-fold product spectrum and
/// verifies mu_l^{(d)} >= C exp(-c rho (l+d)^{2/d}) with C = e^{-8 rho},
/// c = 2 d^{2/d} (d-1)^{2(d-1)/d}, for all l <= L.
TensorDecayCheck tensor_decay_check(double rho, int d, int l_max);

/// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

} // namespace kml
