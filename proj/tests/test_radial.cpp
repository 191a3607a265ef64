#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kml/radial.hpp"
#include "kml/rng.hpp"

using namespace kml;

namespace {

constexpr double kE = std::numbers::e;

// partial-sum oracle for the exponential tail sum_{l>=L} r^l / l!
double exp_tail_oracle(double r, int start) {
    long double partial = 0.0L;
    long double term = 1.0L;
    for (int l = 0; l < start; ++l) {
        partial += 0;  // skipped below start
        term *= r / (l + 1);
    }
    // recompute term = r^start / start!
    term = 1.0L;
    for (int l = 1; l <= start; ++l) term *= r / l;
    long double sum = 0.0L;
    for (int l = start; l < start + 400; ++l) {
        sum += term;
        term *= r / (l + 1);
    }
    return static_cast<double>(sum);
}

RadialKernelSpec unit_gaussian() { return gaussian_kernel(1.0, 1); }

// c_sigma = 1 requires 2 e sigma d <= 1
RadialKernelSpec small_bandwidth_gaussian() { return gaussian_kernel(0.1, 1); }

} // namespace

TEST_SUITE("radial") {

TEST_CASE("kernel evaluation") {
    const RadialKernelSpec g1 = unit_gaussian();
    const std::vector<double> x{0.3}, y{0.3};
    CHECK(kernel_eval(g1, x, y) == doctest::Approx(1.0));
    CHECK(kernel_eval(g1, std::vector<double>{0.0}, std::vector<double>{1.0}) ==
          doctest::Approx(std::exp(-1.0)));

    const RadialKernelSpec g2 = gaussian_kernel(2.0, 2);
    CHECK(kernel_eval(g2, std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0}) ==
          doctest::Approx(std::exp(-4.0)));

    CHECK_THROWS_AS(kernel_eval(g1, std::vector<double>{0.0, 0.0}, std::vector<double>{1.0}),
                    shape_error);
}

TEST_CASE("custom series kernels") {
    // constant kernel: a_0 = 1, everything else zero
    const RadialKernelSpec one =
        custom_series_kernel([](int l) { return l == 0 ? 1.0 : 0.0; }, 1);
    CHECK(kernel_eval(one, std::vector<double>{0.1}, std::vector<double>{0.9}) ==
          doctest::Approx(1.0));

    // the Gaussian written as a series agrees with the closed form
    const RadialKernelSpec series =
        custom_series_kernel([](int l) { return std::pow(-1.0, l); }, 1);
    CHECK(kernel_eval(series, std::vector<double>{0.0}, std::vector<double>{0.8}) ==
          doctest::Approx(std::exp(-0.64)).epsilon(1e-12));

    // non-convergent generator is rejected
    CHECK_THROWS_AS(custom_series_kernel(
                        [](int l) {
                            double f = 1.0;
                            for (int i = 2; i <= l; ++i) f *= i;
                            return f * std::pow(2.0, l);
                        },
                        1),
                    series_error);
}

TEST_CASE("gaussian constants") {
    const GaussianConstants g = gaussian_constants(unit_gaussian());
    CHECK(g.c_sigma == doctest::Approx(2.0 * kE));
    const double c0_expected =
        (std::log(3.0) + std::log(3.0 * 2.0 * kE)) / (2.0 * std::log(3.0));
    CHECK(g.c0 == doctest::Approx(c0_expected));
    const double c1_expected = std::log(2.0) + std::log(3.0 * 2.0 * kE) + 1.0;
    CHECK(g.c1 == doctest::Approx(c1_expected));
    CHECK(g.c2 == doctest::Approx(std::log(2.0)));
    CHECK(g.c == doctest::Approx(c1_expected));

    CHECK(gaussian_constants(small_bandwidth_gaussian()).c_sigma == doctest::Approx(1.0));
    CHECK_THROWS_AS(
        gaussian_constants(custom_series_kernel([](int) { return 0.0; }, 1)),
        domain_error);
}

TEST_CASE("taylor tails") {
    const RadialKernelSpec g1 = unit_gaussian();
    CHECK(taylor_tail(g1, 0) == doctest::Approx(kE).epsilon(1e-12));
    CHECK(taylor_tail(g1, 3) == doctest::Approx(kE - 2.5).epsilon(1e-12));
    CHECK(taylor_tail(g1, 3) == doctest::Approx(exp_tail_oracle(1.0, 3)).epsilon(1e-13));

    const RadialKernelSpec g12 = gaussian_kernel(1.0, 2);
    CHECK(taylor_tail(g12, 0) == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(taylor_tail(g12, 4) == doctest::Approx(std::exp(2.0) - (1 + 2 + 2 + 4.0 / 3.0))
                                     .epsilon(1e-12));
    CHECK(taylor_tail(g12, 4) == doctest::Approx(exp_tail_oracle(2.0, 4)).epsilon(1e-13));

    SUBCASE("strictly decreasing to zero") {
        double prev = taylor_tail(g1, 0);
        for (int l = 1; l <= 24; ++l) {
            const double t = taylor_tail(g1, l);
            CHECK(t < prev);
            prev = t;
        }
        CHECK(prev < 1e-23);
    }
}

TEST_CASE("taylor uniform bound") {
    const RadialKernelSpec g1 = unit_gaussian();
    CHECK(taylor_uniform_bound(g1, 5) == doctest::Approx(6.0 * (kE - 2.5)).epsilon(1e-12));
    CHECK(taylor_uniform_bound(g1, 1) == doctest::Approx(2.0 * (kE - 1.0)).epsilon(1e-12));

    DensityHandle dens = uniform_density();
    dens.c_p = 4.0;
    const RadialKernelSpec g_cp = gaussian_kernel(1.0, 1, dens);
    CHECK(taylor_uniform_bound(g_cp, 5) == doctest::Approx(11.0 * (kE - 2.5)).epsilon(1e-12));
}

TEST_CASE("gaussian closed-form uniform bound") {
    const RadialKernelSpec g1 = unit_gaussian();
    const double cap = 1.0 / (1.0 - kE / 6.0);
    const double expected = 13.0 * cap * std::pow(6.0 / kE, -6.0);
    CHECK(gaussian_uniform_bound(g1, 12) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(gaussian_uniform_bound(g1, 20) < gaussian_uniform_bound(g1, 12));

    // floor(6/2) = 3 > e keeps the constant finite and positive
    const double v6 = gaussian_uniform_bound(g1, 6);
    CHECK(v6 > 0.0);
    CHECK(std::isfinite(v6));

    CHECK_THROWS_AS(gaussian_uniform_bound(g1, 5), precondition_error);
    CHECK(std::isinf(gaussian_uniform_bound_or_inf(g1, 5)));
    CHECK(gaussian_uniform_bound_or_inf(g1, 12) == doctest::Approx(expected));

    CHECK(gaussian_uniform_bound_positive_exponent(g1, 12) ==
          doctest::Approx(13.0 * cap * std::pow(6.0 / kE, 6.0)).epsilon(1e-12));
}

TEST_CASE("decay bound dominates the closed form at the scheduled order") {
    // at m = m(t d) the closed-form bound sits below 3 (t d)^{-3 t d}
    for (const auto& [sigma, d] : std::vector<std::pair<double, int>>{{1, 1}, {1, 2}, {2, 1}}) {
        const RadialKernelSpec spec = gaussian_kernel(sigma, d);
        const double t0 = uniform_bound_threshold(spec);
        for (int i = 0; i < 8; ++i) {
            const double t = t0 + 0.35 * i;
            const int m = schedule_m(spec, t * d);
            CHECK(gaussian_uniform_bound(spec, m) <= uniform_decay_bound(t * d) * (1 + 1e-12));
        }
    }
}

TEST_CASE("moment-order schedule") {
    const RadialKernelSpec small = small_bandwidth_gaussian();
    CHECK(schedule_m(small, 1.0) == 5);
    CHECK(schedule_m(small, 1e-12) == 3);
    CHECK(schedule_m(unit_gaussian(), 2.0) == 35);
    CHECK_THROWS_AS(schedule_m(small, 0.0), domain_error);
}

TEST_CASE("s(lambda)") {
    CHECK(s_of_lambda_value(9.0, 0.0) == doctest::Approx(kE));
    CHECK(s_of_lambda_value(9.0 * std::exp(-10.0), 0.0) == doctest::Approx(5.0));
    CHECK(s_of_lambda_value(100.0, 1.0) == doctest::Approx(kE));
    CHECK_THROWS_AS(s_of_lambda_value(0.0, 1.0), domain_error);

    const RadialKernelSpec g1 = unit_gaussian();
    const GaussianConstants gc = gaussian_constants(g1);
    CHECK(s_of_lambda(g1, 1e-2) == doctest::Approx(gc.c));   // dc floor binds, d = 1
    CHECK(s_of_lambda(g1, 1e-12) == doctest::Approx(-0.5 * std::log(1e-12 / 9.0)));
}

TEST_CASE("weight-norm growth bound") {
    const double v = ninf_growth_from_s(kE, 1.0, 1.0, 1);
    CHECK(v == doctest::Approx(9.0 * std::pow(3.0 * kE + 2.0, 2.0) + 1.0).epsilon(1e-12));

    const RadialKernelSpec g1 = unit_gaussian();
    SUBCASE("non-increasing in lambda") {
        double prev = 0.0;
        for (int k = 1; k <= 14; ++k) {
            const double b = ninf_growth_bound(g1, std::pow(10.0, -k));
            CHECK(b >= prev);
            prev = b;
        }
    }
    SUBCASE("squared-log asymptotics") {
        const GaussianConstants gc = gaussian_constants(g1);
        const double lambda = 1e-280;
        const double limit = 9.0 * std::pow(1.5 * gc.c_sigma, 2.0);
        const double ratio =
            ninf_growth_bound(g1, lambda) / std::pow(std::log(1.0 / lambda), 2.0);
        CHECK(ratio == doctest::Approx(limit).epsilon(0.02));
    }
}

TEST_CASE("eigenfunction magnitude bound") {
    const RadialKernelSpec small = small_bandwidth_gaussian();
    const GaussianConstants gc = gaussian_constants(small);
    // at mu = 9 the log term vanishes and the d*c floor binds
    const double expected =
        std::sqrt(18.0) * (3.0 * gc.c_sigma * gc.c + 2.0) + std::numbers::sqrt2;
    CHECK(eigenfunction_bound(small, 9.0) == doctest::Approx(expected).epsilon(1e-12));

    CHECK(eigenfunction_bound(small, 1e-8) >= eigenfunction_bound(small, 1e-4));
    CHECK_THROWS_AS(eigenfunction_bound(small, 0.0), domain_error);

    SUBCASE("doubling c_p scales the leading term by sqrt(2)") {
        DensityHandle dens = uniform_density();
        dens.c_p = 2.0;
        const RadialKernelSpec doubled = gaussian_kernel(0.1, 1, dens);
        const double lead1 = eigenfunction_bound(small, 1e-6) - std::numbers::sqrt2;
        const double lead2 = eigenfunction_bound(doubled, 1e-6) - std::numbers::sqrt2;
        // c_p also enters the thresholds c0..c2; at this lambda the log term
        // binds in s(.), leaving the pure sqrt(2) factor
        CHECK(lead2 / lead1 == doctest::Approx(std::numbers::sqrt2).epsilon(1e-9));
    }
}

TEST_CASE("index-form eigenfunction bound") {
    const RadialKernelSpec small = small_bandwidth_gaussian();
    SUBCASE("positive-part clamp") {
        CHECK(h_of_ell(small, 3, 1e30, 1.0) == doctest::Approx(2.0));
    }
    SUBCASE("arithmetic instance") {
        CHECK(h_of_ell(small, 1, 1.0, 1.0) ==
              doctest::Approx(3.0 * (std::log(3.0) + 2.0) + 2.0).epsilon(1e-12));
    }
    SUBCASE("quadratic growth in the index") {
        for (int dim : {1, 2}) {
            const RadialKernelSpec spec = gaussian_kernel(1.0, dim);
            double prev_ratio = 0.0;
            for (int l : {50, 100, 200, 400}) {
                const double ratio = h_of_ell(spec, l, 1.0, 1.0) /
                                     (static_cast<double>(l) * l);
                if (prev_ratio > 0.0) CHECK(ratio <= prev_ratio * 1.3);
                prev_ratio = ratio;
            }
            CHECK(h_of_ell(spec, 400, 1.0, 1.0) <=
                  prev_ratio * 400.0 * 400.0 * (1 + 1e-9));
        }
    }
    SUBCASE("full bound includes the floors") {
        const double full = eigenfunction_index_bound(small, 1, 1e30, 1.0);
        const GaussianConstants gc = gaussian_constants(small);
        const double floor_dc = 3.0 * gc.c_sigma * gc.c + 2.0;
        CHECK(full == doctest::Approx(std::sqrt(18.0) * floor_dc + std::numbers::sqrt2));
    }
    CHECK_THROWS_AS(h_of_ell(small, 0, 1.0, 1.0), domain_error);
    CHECK_THROWS_AS(h_of_ell(small, 1, -1.0, 1.0), domain_error);
}

TEST_CASE("effective dimension and concentration") {
    const std::vector<double> single{1.0};
    const EffectiveDimension ed = effective_dimension_quantities(single, 1.0);
    CHECK(ed.n_lambda == doctest::Approx(0.5));
    CHECK(ed.g_lambda == doctest::Approx(std::log(2.0 * kE)));

    CHECK(effective_dimension_quantities(single, 1e12).n_lambda < 1e-11);

    const std::vector<double> two{1.0, 0.5};
    CHECK(effective_dimension_quantities(two, 0.5).n_lambda == doctest::Approx(7.0 / 6.0));

    CHECK_THROWS_AS(effective_dimension_quantities(std::vector<double>{}, 1.0), domain_error);

    SUBCASE("condition arithmetic") {
        // tau g Ninf / n = 1/8 and 1/50, using a one-term spectrum scaled so
        // g = 1: g = ln(2e (l+mu)/mu N). Instead drive the ratio directly.
        // lhs = 4/3 r + sqrt(2 r)
        const std::vector<double> mu{1.0};
        const double g = effective_dimension_quantities(mu, 1.0).g_lambda;
        // choose n so that tau g Ninf / n equals r
        auto lhs_for = [&](double r) {
            const double tau = 1.0, ninf = 1.0;
            const double n_real = tau * g * ninf / r;
            const long long n = static_cast<long long>(n_real);
            // n must be integral: scale ninf to compensate
            const double ninf_adj = r * static_cast<double>(n) / (tau * g);
            return concentration_condition(mu, 1.0, tau, n, ninf_adj);
        };
        const ConcentrationCheck c1 = lhs_for(1.0 / 8.0);
        CHECK(c1.lhs == doctest::Approx(1.0 / 6.0 + 0.5).epsilon(1e-9));
        CHECK_FALSE(c1.satisfied);
        const ConcentrationCheck c2 = lhs_for(1.0 / 50.0);
        CHECK(c2.lhs == doctest::Approx(4.0 / 150.0 + 0.2).epsilon(1e-9));
        CHECK(c2.satisfied);
    }
    SUBCASE("monotone in n") {
        const std::vector<double> mu{0.8, 0.1, 0.01};
        bool was_satisfied = false;
        for (long long n = 1; n <= (1 << 22); n *= 2) {
            const bool now = concentration_condition(mu, 1e-3, 2.0, n, 50.0).satisfied;
            if (was_satisfied) CHECK(now);
            was_satisfied = now;
        }
        CHECK(was_satisfied);
    }
}

TEST_CASE("support-point criterion") {
    CHECK(nystrom_support_points_from_ninf(13.0, std::exp(-1.0)) == 67);
    CHECK(nystrom_support_points_from_ninf(13.0, std::exp(-2.0)) == 134);
    CHECK_THROWS_AS(nystrom_support_points_from_ninf(13.0, 1.0), domain_error);
    CHECK_THROWS_AS(nystrom_support_points_from_ninf(13.0, 1.5), domain_error);

    // spec-bound path at lambda = 9 e^{-10}: s = 5, bound = 9*17^2 + 1 = 2602
    const RadialKernelSpec small = small_bandwidth_gaussian();
    const double lambda = 9.0 * std::exp(-10.0);
    CHECK(ninf_growth_bound(small, lambda) == doctest::Approx(2602.0).epsilon(1e-12));
    const double expected = 5.0 * 2602.0 * std::log(1.0 / lambda);
    CHECK(nystrom_support_points(small, lambda) ==
          static_cast<long long>(std::ceil(expected)));
}

TEST_CASE("bound report semantics") {
    const BoundReport pass = make_bound_report("x", "p", 1.0, 0.5, 0.0);
    CHECK(pass.passed);
    CHECK(pass.margin == doctest::Approx(0.5));
    const BoundReport fail = make_bound_report("x", "p", 1.0, 1.5, 0.1);
    CHECK_FALSE(fail.passed);
    const BoundReport vacuous = make_bound_report("x", "p", 1.0, std::nullopt, 0.0);
    CHECK(vacuous.passed);
}

} // TEST_SUITE
