#include "kml/radial.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kml/errors.hpp"

namespace kml {

namespace {

constexpr double kE = std::numbers::e;

double squared_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw shape_error("kernel_eval: dimension mismatch");
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        r2 += d * d;
    }
    return r2;
}

void check_series_converges(const RadialKernelSpec& spec) {
    // Ratio test on the first 200 terms of sum |a_l| d^l / l!.
    double prev = 0.0;
    bool decreasing_seen = false;
    double term = std::abs(spec.coefficient(0));
    for (int l = 1; l < 200; ++l) {
        const double t = std::abs(spec.coefficient(l)) *
                         std::pow(static_cast<double>(spec.dim), l) / std::tgamma(l + 1.0);
        if (!std::isfinite(t)) throw series_error("kernel series: non-finite term");
        if (l > 100 && prev > 0.0 && t >= prev)
            throw series_error("kernel series: ratio test failed, terms not decaying");
        if (prev > 0.0 && t < prev) decreasing_seen = true;
        prev = t;
        term = t;
    }
    (void)term;
    (void)decreasing_seen;
}

GaussianConstants constants_from(double sigma, int dim, double c_p) {
    GaussianConstants g;
    const double d = static_cast<double>(dim);
    g.c_sigma = std::max(1.0, 2.0 * kE * sigma * d);
    const double ln3 = std::log(3.0);
    const double ln2 = std::log(2.0);
    g.c0 = (ln3 + (d - 1.0) * ln2 + 0.5 * std::log(c_p) + d * std::log(3.0 * g.c_sigma * d)) /
           (2.0 * d * ln3);
    g.c1 = ((2.0 * d - 1.0) * ln2 + d * std::log(3.0 * g.c_sigma) + 0.5 * std::log(c_p)) / d + 1.0;
    g.c2 = ((2.0 * d - 1.0) * ln2 + 0.5 * std::log(c_p)) / d;
    g.c = std::max({g.c0, g.c1, g.c2, 1.0});
    return g;
}

void require_gaussian(const RadialKernelSpec& spec, const char* what) {
    if (spec.family != RadialKernelSpec::Family::gaussian)
        throw domain_error(std::string(what) + ": defined for the Gaussian family only");
}

} // namespace

RadialKernelSpec gaussian_kernel(double sigma, int dim, DensityHandle density) {
    if (!(sigma > 0.0)) throw domain_error("gaussian_kernel: sigma must be positive");
    if (dim < 1) throw domain_error("gaussian_kernel: dimension must be >= 1");
    if (density.p_min > density.p_max || density.c_p * density.p_max < 1.0)
        throw domain_error("gaussian_kernel: inconsistent density bounds");
    RadialKernelSpec spec;
    spec.family = RadialKernelSpec::Family::gaussian;
    spec.sigma = sigma;
    spec.dim = dim;
    spec.coefficient = [sigma](int l) { return std::pow(-sigma, l); };
    spec.p_min = density.p_min;
    spec.p_max = density.p_max;
    spec.c_p = density.c_p;
    spec.density = std::move(density);
    check_series_converges(spec);
    return spec;
}

RadialKernelSpec custom_series_kernel(std::function<double(int)> coefficient, int dim,
                                      DensityHandle density) {
    if (dim < 1) throw domain_error("custom_series_kernel: dimension must be >= 1");
    RadialKernelSpec spec;
    spec.family = RadialKernelSpec::Family::custom_series;
    spec.sigma = 0.0;
    spec.dim = dim;
    spec.coefficient = std::move(coefficient);
    spec.p_min = density.p_min;
    spec.p_max = density.p_max;
    spec.c_p = density.c_p;
    spec.density = std::move(density);
    check_series_converges(spec);
    return spec;
}

double kernel_eval(const RadialKernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
    const double r2 = squared_distance(x, y);
    if (spec.family == RadialKernelSpec::Family::gaussian) return std::exp(-spec.sigma * r2);
    // phi(r2) = sum a_l r2^l / l!
    double sum = 0.0;
    double pow_term = 1.0;   // r2^l / l!
    for (int l = 0; l < 200; ++l) {
        const double t = spec.coefficient(l) * pow_term;
        sum += t;
        pow_term *= r2 / (l + 1.0);
        if (std::abs(t) < 1e-30 * std::max(1.0, std::abs(sum)) && l > 4) break;
    }
    return sum;
}

GaussianConstants gaussian_constants(const RadialKernelSpec& spec) {
    require_gaussian(spec, "gaussian_constants");
    return constants_from(spec.sigma, spec.dim, spec.c_p);
}

double taylor_tail(const RadialKernelSpec& spec, int start) {
    if (start < 0) throw domain_error("taylor_tail: start must be >= 0");
    const double d = static_cast<double>(spec.dim);
    double sum = 0.0;
    // term_l = |a_l| d^l / l!, accumulated until 1e-30 relative.
    double dl_over_fact = 1.0;
    for (int l = 0; l < start; ++l) dl_over_fact *= d / (l + 1.0);
    for (int l = start; l < start + 4000; ++l) {
        const double t = std::abs(spec.coefficient(l)) * dl_over_fact;
        if (!std::isfinite(t)) throw series_error("taylor_tail: non-finite term");
        sum += t;
        dl_over_fact *= d / (l + 1.0);
        if (t < 1e-30 * std::max(sum, std::numeric_limits<double>::min()) && l > start + 4)
            return sum;
    }
    throw series_error("taylor_tail: series did not converge in 4000 terms");
}

double taylor_uniform_bound(const RadialKernelSpec& spec, int m) {
    if (m < 1) throw domain_error("taylor_uniform_bound: m must be >= 1");
    const int start = (m - 1) / 2 + 1;
    return (1.0 + std::sqrt(spec.c_p) * std::pow(static_cast<double>(m), spec.dim)) *
           taylor_tail(spec, start);
}

namespace {

double gaussian_uniform_bound_impl(const RadialKernelSpec& spec, int m, bool positive_exponent,
                                   bool throw_on_violation) {
    require_gaussian(spec, "gaussian_uniform_bound");
    const double d = static_cast<double>(spec.dim);
    const double half_m = std::floor(m / 2.0);
    const double sed = spec.sigma * kE * d;
    // The closed form only needs floor(m/2) > sigma e d (so the truncated
    // geometric series converges and C(sigma,m) > 0); the schedule-level
    // condition m > c_sigma + 1 belongs to the m(s) choice, not the formula.
    if (!(half_m > sed)) {
        if (throw_on_violation)
            throw precondition_error(
                "gaussian_uniform_bound: requires floor(m/2) > sigma*e*d = " +
                std::to_string(sed));
        return std::numeric_limits<double>::infinity();
    }
    const double cap = 1.0 / (1.0 - sed / half_m);
    const double expo = positive_exponent ? half_m : -half_m;
    return (1.0 + std::sqrt(spec.c_p) * std::pow(static_cast<double>(m), spec.dim)) * cap *
           std::pow(half_m / sed, expo);
}

} // namespace

double gaussian_uniform_bound(const RadialKernelSpec& spec, int m) {
    return gaussian_uniform_bound_impl(spec, m, false, true);
}

double gaussian_uniform_bound_or_inf(const RadialKernelSpec& spec, int m) {
    return gaussian_uniform_bound_impl(spec, m, false, false);
}

double gaussian_uniform_bound_positive_exponent(const RadialKernelSpec& spec, int m) {
    return gaussian_uniform_bound_impl(spec, m, true, true);
}

int schedule_m(const RadialKernelSpec& spec, double s) {
    if (!(s > 0.0)) throw domain_error("schedule_m: s must be positive");
    require_gaussian(spec, "schedule_m");
    const GaussianConstants g = gaussian_constants(spec);
    return static_cast<int>(std::ceil(3.0 * g.c_sigma * s)) + 2;
}

double uniform_decay_bound(double s) { return 3.0 * std::pow(s, -3.0 * s); }

double rkhs_decay_bound(double s) { return 9.0 * std::pow(s, -2.0 * s); }

double uniform_bound_threshold(const RadialKernelSpec& spec) {
    const GaussianConstants g = gaussian_constants(spec);
    return std::max(g.c0, 1.0);
}

double s_of_lambda_value(double lambda, double dc_floor) {
    if (!(lambda > 0.0)) throw domain_error("s_of_lambda: lambda must be positive");
    return std::max({-0.5 * std::log(lambda / 9.0), dc_floor, kE});
}

double s_of_lambda(const RadialKernelSpec& spec, double lambda) {
    const GaussianConstants g = gaussian_constants(spec);
    return s_of_lambda_value(lambda, static_cast<double>(spec.dim) * g.c);
}

double ninf_growth_from_s(double s, double c_sigma, double c_p, int dim) {
    return 9.0 * c_p * std::pow(3.0 * c_sigma * s + 2.0, 2.0 * dim) + 1.0;
}

double ninf_growth_bound(const RadialKernelSpec& spec, double lambda) {
    const GaussianConstants g = gaussian_constants(spec);
    return ninf_growth_from_s(s_of_lambda(spec, lambda), g.c_sigma, spec.c_p, spec.dim);
}

double eigenfunction_bound(const RadialKernelSpec& spec, double mu) {
    if (!(mu > 0.0)) throw domain_error("eigenfunction_bound: eigenvalue must be positive");
    const GaussianConstants g = gaussian_constants(spec);
    const double s = s_of_lambda(spec, mu);
    return std::sqrt(18.0 * spec.c_p) * std::pow(3.0 * g.c_sigma * s + 2.0, spec.dim) +
           std::numbers::sqrt2;
}

double h_of_ell(const RadialKernelSpec& spec, int l, double c_big_fit, double c_small_fit) {
    if (l < 1) throw domain_error("h_of_ell: l must be >= 1");
    if (!(c_big_fit > 0.0) || !(c_small_fit > 0.0))
        throw domain_error("h_of_ell: fit constants must be positive");
    const GaussianConstants g = gaussian_constants(spec);
    const double d = static_cast<double>(spec.dim);
    const double inner = 0.5 * std::log(9.0) - 0.5 * std::log(c_big_fit) +
                         0.5 * c_small_fit * std::pow(l + d, 2.0 / d);
    return std::pow(3.0 * g.c_sigma * std::max(inner, 0.0) + 2.0, d);
}

double eigenfunction_index_bound(const RadialKernelSpec& spec, int l, double c_big_fit,
                                 double c_small_fit) {
    const GaussianConstants g = gaussian_constants(spec);
    const double d = static_cast<double>(spec.dim);
    const double floor_e = std::pow(3.0 * g.c_sigma * kE + 2.0, d);
    const double floor_dc = std::pow(3.0 * g.c_sigma * (d * g.c) + 2.0, d);
    const double h = h_of_ell(spec, l, c_big_fit, c_small_fit);
    return std::sqrt(18.0 * spec.c_p) * std::max({h, floor_e, floor_dc}) + std::numbers::sqrt2;
}

EffectiveDimension effective_dimension_quantities(std::span<const double> mu, double lambda) {
    if (mu.empty()) throw domain_error("effective_dimension: empty eigenvalue list");
    if (!(lambda > 0.0)) throw domain_error("effective_dimension: lambda must be positive");
    EffectiveDimension out;
    for (double m : mu) {
        if (!(m > 0.0)) break;
        const double term = m / (lambda + m);
        if (term < 1e-16) break;
        out.n_lambda += term;
    }
    out.g_lambda = std::log(2.0 * kE * (lambda + mu[0]) / mu[0] * out.n_lambda);
    return out;
}

ConcentrationCheck concentration_condition(std::span<const double> mu, double lambda,
                                           double tau, long long n, double ninf) {
    if (!(tau >= 1.0)) throw domain_error("concentration_condition: tau must be >= 1");
    if (n < 1) throw domain_error("concentration_condition: n must be >= 1");
    if (!(ninf > 0.0)) throw domain_error("concentration_condition: ninf must be positive");
    const EffectiveDimension ed = effective_dimension_quantities(mu, lambda);
    const double ratio = tau * ed.g_lambda * ninf / static_cast<double>(n);
    ConcentrationCheck out;
    out.lhs = (4.0 / 3.0) * ratio + std::sqrt(2.0 * ratio);
    out.satisfied = out.lhs <= 0.5;
    return out;
}

long long nystrom_support_points_from_ninf(double ninf_bound_value, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw domain_error("nystrom_support_points: lambda must lie in (0,1)");
    const double value = std::max(67.0, 5.0 * ninf_bound_value) * std::log(1.0 / lambda);
    return static_cast<long long>(std::ceil(value));
}

long long nystrom_support_points(const RadialKernelSpec& spec, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw domain_error("nystrom_support_points: lambda must lie in (0,1)");
    return nystrom_support_points_from_ninf(ninf_growth_bound(spec, lambda), lambda);
}

BoundReport make_bound_report(std::string name, std::string parameters, double theoretical,
                              std::optional<double> empirical, double tolerance,
                              std::string note) {
    BoundReport r;
    r.name = std::move(name);
    r.parameters = std::move(parameters);
    r.theoretical = theoretical;
    r.empirical = empirical;
    r.margin = empirical ? theoretical - *empirical : 0.0;
    r.passed = !empirical || *empirical <= theoretical + tolerance;
    r.note = std::move(note);
    return r;
}

} // namespace kml
