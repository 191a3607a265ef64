#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kml/density.hpp"

namespace kml {

/// Radial kernel k(x,y) = phi(||x-y||^2) on [0,1]^d, with phi given through
/// its Taylor coefficients a_l (phi(u) = sum a_l u^l / l!). The Gaussian
/// family has a_l = (-sigma)^l.
struct RadialKernelSpec {
    enum class Family { gaussian, custom_series };

    Family family = Family::gaussian;
    double sigma = 1.0;
    int dim = 1;
    std::function<double(int)> coefficient;   // signed a_l
    DensityHandle density;
    double p_min = 1.0;
    double p_max = 1.0;
    double c_p = 1.0;
};

RadialKernelSpec gaussian_kernel(double sigma, int dim,
                                 DensityHandle density = uniform_density());

/// Kernel from a user-supplied coefficient generator. The series
/// sum |a_l| d^l / l! must converge; a ratio test over the first 200 terms
/// guards against generators that cannot work.
RadialKernelSpec custom_series_kernel(std::function<double(int)> coefficient, int dim,
                                      DensityHandle density = uniform_density());

/// k(x,y); the Gaussian family evaluates the closed form, custom kernels sum
/// their series.
double kernel_eval(const RadialKernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

/// Derived constants for the Gaussian bounds. c_sigma = max{1, 2 e sigma d};
/// c = max{c0, c1, c2, 1} collects the thresholds of the norm estimates.
struct GaussianConstants {
    double c_sigma = 1.0;
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c = 1.0;
};

GaussianConstants gaussian_constants(const RadialKernelSpec& spec);

/// Tail sum_{l >= start} |a_l| d^l / l!, summed to 1e-30 relative.
double taylor_tail(const RadialKernelSpec& spec, int start);

/// (1 + sqrt(c_p) m^d) * taylor_tail(floor((m-1)/2) + 1).
double taylor_uniform_bound(const RadialKernelSpec& spec, int m);

/// Gaussian closed-form uniform bound
///   (1 + sqrt(c_p) m^d) C(sigma,m) (floor(m/2) / (sigma e d))^{-floor(m/2)},
/// C(sigma,m) = 1 / (1 - sigma e d / floor(m/2)). Requires m > c_sigma + 1
/// and floor(m/2) > sigma e d; throws precondition_error naming the violated
/// inequality otherwise.
double gaussian_uniform_bound(const RadialKernelSpec& spec, int m);

/// Same bound but returns +infinity instead of throwing, for sweep tools.
double gaussian_uniform_bound_or_inf(const RadialKernelSpec& spec, int m);

/// The non-decaying variant with the exponent taken positive. Exceeds one
/// where the decaying form is small; kept as a regression guard for the sign
/// decision, never used in bounds.
double gaussian_uniform_bound_positive_exponent(const RadialKernelSpec& spec, int m);

/// Moment order schedule m(s) = ceil(3 c_sigma s) + 2.
int schedule_m(const RadialKernelSpec& spec, double s);

/// 3 s^{-3s}: the uniform approximation bound at m = m(s), s = t d.
double uniform_decay_bound(double s);

/// 9 s^{-2s}: the RKHS approximation bound at m = m(s), s = t d.
double rkhs_decay_bound(double s);

/// Smallest admissible t for the uniform decay bound: max{c0, 1}.
double uniform_bound_threshold(const RadialKernelSpec& spec);

/// s(lambda) = max{ -ln(lambda/9)/2, d*c, e }.
double s_of_lambda(const RadialKernelSpec& spec, double lambda);
double s_of_lambda_value(double lambda, double dc_floor);

/// Growth bound for the worst-case weight-function norm:
///   9 c_p (3 c_sigma s(lambda) + 2)^{2d} + 1.
double ninf_growth_bound(const RadialKernelSpec& spec, double lambda);
double ninf_growth_from_s(double s, double c_sigma, double c_p, int dim);

/// Eigenfunction magnitude bound sqrt(18 c_p) (3 c_sigma s(mu) + 2)^d + sqrt(2).
double eigenfunction_bound(const RadialKernelSpec& spec, double mu);

/// h(l) from the explicit eigenfunction bound, with the fitted stand-ins
/// C_fit for p_min^2/p_max^2 C(d,sigma) and c_fit for the decay constant.
double h_of_ell(const RadialKernelSpec& spec, int l, double c_big_fit, double c_small_fit);

/// Full index-form bound: sqrt(18 c_p) max{h(l), (3 c_sigma e + 2)^d,
/// (3 c_sigma d c + 2)^d} + sqrt(2).
double eigenfunction_index_bound(const RadialKernelSpec& spec, int l, double c_big_fit,
                                 double c_small_fit);

struct EffectiveDimension {
    double n_lambda = 0.0;   // sum mu_l / (lambda + mu_l)
    double g_lambda = 0.0;   // ln(2e (lambda + mu_1)/mu_1 * n_lambda)
};

EffectiveDimension effective_dimension_quantities(std::span<const double> mu, double lambda);

struct ConcentrationCheck {
    double lhs = 0.0;
    bool satisfied = false;
};

/// Left side of the concentration condition
///   (4/3) tau g(lambda) Ninf/n + sqrt(2 tau g(lambda) Ninf/n) <= 1/2.
ConcentrationCheck concentration_condition(std::span<const double> mu, double lambda,
                                           double tau, long long n, double ninf);

/// Support-point criterion ceil(max{67, 5 * ninf_bound(lambda)} * ln(1/lambda)).
long long nystrom_support_points(const RadialKernelSpec& spec, double lambda);
long long nystrom_support_points_from_ninf(double ninf_bound_value, double lambda);

/// Named bound evaluation record produced by the experiment commands.
struct BoundReport {
    std::string name;
    std::string parameters;
    double theoretical = 0.0;
    std::optional<double> empirical;
    double margin = 0.0;
    bool passed = false;
    std::string note;
};

BoundReport make_bound_report(std::string name, std::string parameters, double theoretical,
                              std::optional<double> empirical, double tolerance,
                              std::string note = {});

} // namespace kml
