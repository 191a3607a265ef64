#include <doctest.h>

#include <cmath>
#include <vector>

#include "kml/random_gap.hpp"
#include "kml/spectral.hpp"

using namespace kml;

namespace {

// composite Simpson quadrature over [0, upper]
double simpson(const std::function<double(double)>& f, double upper, int intervals) {
    const double h = upper / intervals;
    double s = f(0.0) + f(upper);
    for (int i = 1; i < intervals; ++i) s += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

TEST_SUITE("random-gap") {

TEST_CASE("density") {
    const MinGapLaw two(2);
    CHECK(min_gap_density(two, 0.5) == doctest::Approx(1.0));
    CHECK(simpson([&](double m) { return min_gap_density(two, m); }, 1.0, 2000) ==
          doctest::Approx(1.0).epsilon(1e-9));

    const MinGapLaw five(5);
    CHECK(min_gap_density(five, 0.25) == 0.0);
    CHECK(min_gap_density(five, 0.3) == 0.0);
    CHECK(simpson([&](double m) { return min_gap_density(five, m); }, 0.25, 2000) ==
          doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(MinGapLaw(1), domain_error);
}

TEST_CASE("survival") {
    const MinGapLaw two(2);
    CHECK(min_gap_survival(two, 0.5) == doctest::Approx(0.25));
    CHECK(min_gap_survival(two, 0.0) == doctest::Approx(1.0));
    CHECK(min_gap_survival(MinGapLaw(3), 0.5) == 0.0);

    // geometric oracle for n=2: P(|U1-U2| > m) = (1-m)^2
    for (double m : {0.1, 0.3, 0.7})
        CHECK(min_gap_survival(two, m) == doctest::Approx((1 - m) * (1 - m)));
}

TEST_CASE("sampling") {
    const MinGapLaw law(5);
    const auto a = sample_min_gap(law, 99, 2000);
    const auto b = sample_min_gap(law, 99, 2000);
    CHECK(a == b);
    for (double v : a) {
        CHECK(v >= 0.0);
        CHECK(v <= 0.25);
    }

    SUBCASE("empirical survival against the closed form") {
        const MinGapLaw two(2);
        const long long r = 100000;
        const auto sample = sample_min_gap(two, 7, r);
        long long above = 0;
        for (double v : sample)
            if (v > 0.5) ++above;
        const double p_hat = static_cast<double>(above) / r;
        const double se = std::sqrt(0.25 * 0.75 / r);
        CHECK(std::abs(p_hat - 0.25) <= 3.0 * se);
    }
    SUBCASE("empirical mean is 1/3 for n=2") {
        const MinGapLaw two(2);
        const long long r = 100000;
        const auto sample = sample_min_gap(two, 11, r);
        double mean = 0.0, sq = 0.0;
        for (double v : sample) {
            mean += v;
            sq += v * v;
        }
        mean /= r;
        const double se = std::sqrt((sq / r - mean * mean) / r);
        CHECK(std::abs(mean - 1.0 / 3.0) <= 3.0 * se);
    }
    SUBCASE("KS against the closed-form CDF") {
        const MinGapLaw law10(10);
        auto sample = sample_min_gap(law10, 13, 100000);
        const double ks =
            ks_statistic(std::move(sample), [&](double m) { return min_gap_cdf(law10, m); });
        CHECK(ks <= 0.01);
    }
}

TEST_CASE("expectation lower bound") {
    SUBCASE("holds across the grid") {
        for (int n : {2, 5, 10})
            for (double c : {0.01, 0.1, 1.0}) {
                const ExpGapBound res = expectation_exp_bound(MinGapLaw(n), c, 17, 200000);
                CHECK(res.mc.value >= res.lower - 3.0 * res.mc.std_error);
            }
    }
    SUBCASE("matches the deterministic quadrature oracle") {
        const MinGapLaw two(2);
        const double c = 0.1;
        const ExpGapBound res = expectation_exp_bound(two, c, 23, 400000);
        const double oracle = simpson(
            [&](double m) {
                return m == 0.0 ? 0.0 : std::exp(-c / (m * m)) * 2.0 * (1.0 - m);
            },
            1.0, 20000);
        CHECK(std::abs(res.mc.value - oracle) <= 3.0 * res.mc.std_error);
    }
    SUBCASE("tends to one as c vanishes") {
        const ExpGapBound res = expectation_exp_bound(MinGapLaw(2), 1e-8, 29, 50000);
        CHECK(res.mc.value >= 0.999);
    }
    SUBCASE("the displayed constant is falsified, the derived one is not") {
        // The displayed lower bound exceeds one at n=2, c=0.01, so it cannot
        // bound an expectation of a quantity below one; the derivation's
        // constant stays valid. Guards against silently swapping them back.
        const ExpGapBound res = expectation_exp_bound(MinGapLaw(2), 0.01, 31, 100000);
        CHECK(res.lower_stated > 1.0);
        CHECK(res.mc.value < res.lower_stated);
        CHECK(res.mc.value >= res.lower - 3.0 * res.mc.std_error);
        CHECK(res.a == doctest::Approx(0.5));
    }
    CHECK_THROWS_AS(expectation_exp_bound(MinGapLaw(2), 0.0, 1, 10), domain_error);
}

TEST_CASE("gram minimum-eigenvalue experiment") {
    SUBCASE("single point") {
        const McEstimate est = gram_min_eigen_experiment(1.0, 1, 3, 50);
        CHECK(est.value == doctest::Approx(1.0));
        CHECK(est.std_error == doctest::Approx(0.0));
    }
    SUBCASE("two points against the integral oracle") {
        const double sigma = 1.0;
        const McEstimate est = gram_min_eigen_experiment(sigma, 2, 5, 2000);
        // lambda_min = 1 - e^{-sigma M^2} with M ~ 2(1-m) on [0,1]
        const double oracle = simpson(
            [&](double m) {
                return (1.0 - std::exp(-sigma * m * m)) * 2.0 * (1.0 - m);
            },
            1.0, 20000);
        CHECK(std::abs(est.value - oracle) <= 3.0 * est.std_error);
    }
    SUBCASE("decreasing in the sample count") {
        double prev = 2.0;
        for (int n : {2, 5, 10, 20}) {
            const McEstimate est = gram_min_eigen_experiment(1.0, n, 7, 400);
            CHECK(est.value < prev);
            prev = est.value;
        }
    }
    SUBCASE("descriptive link to the operator spectrum") {
        const SpectralModel model = build_model(gaussian_kernel(1.0, 1), 64);
        for (int n : {2, 5, 10}) {
            const McEstimate est = gram_min_eigen_experiment(1.0, n, 11, 400);
            const double mu_n = model.eigenvalues()[static_cast<std::size_t>(n - 1)];
            CHECK(mu_n >= est.value / n - 3.0 * est.std_error);
        }
    }
    CHECK_THROWS_AS(gram_min_eigen_experiment(1.0, 61, 1, 10), size_error);
    CHECK_THROWS_AS(gram_min_eigen_experiment(1.0, 10, 1, 2001), size_error);
}

TEST_CASE("combinatorial count bound") {
    const StarsBarsCheck sb = stars_bars_check(2, 4);
    CHECK(sb.lhs == 6);
    CHECK(sb.rhs_proof == doctest::Approx(2.5));
    CHECK(sb.rhs_statement == doctest::Approx(7.0));
    CHECK(sb.holds);
    CHECK_FALSE(sb.holds_statement);

    CHECK(stars_bars_check(2, 2).lhs == 1);

    SUBCASE("enumeration equals the binomial identity") {
        auto binom = [](int n, int k) {
            long long r = 1;
            for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
            return r;
        };
        for (int d = 2; d <= 6; ++d)
            for (int n = d; n <= 20; ++n) CHECK(stars_bars_check(d, n).lhs == binom(n, d));
    }
    SUBCASE("scaled bound holds on the full grid") {
        for (int d = 2; d <= 6; ++d)
            for (int n = d; n <= 20; ++n) CHECK(stars_bars_check(d, n).holds);
    }
    CHECK_THROWS_AS(stars_bars_check(1, 5), size_error);
    CHECK_THROWS_AS(stars_bars_check(7, 10), size_error);
    CHECK_THROWS_AS(stars_bars_check(3, 21), size_error);
    CHECK_THROWS_AS(stars_bars_check(3, 2), size_error);
}

TEST_CASE("tensor product decay") {
    CHECK(tensor_decay_check(1.0, 2, 100).holds);
    CHECK(tensor_decay_check(0.5, 3, 200).holds);

    SUBCASE("leading eigenvalue arithmetic") {
        for (int d : {2, 3}) {
            const double rho = 0.8;
            const double mu1 = std::exp(-rho * d);
            const double c = 2.0 * std::pow(static_cast<double>(d), 2.0 / d) *
                             std::pow(d - 1.0, 2.0 * (d - 1.0) / d);
            const double bound =
                std::exp(-8.0 * rho) * std::exp(-c * rho * std::pow(1.0 + d, 2.0 / d));
            CHECK(mu1 >= bound);
            const TensorDecayCheck res = tensor_decay_check(rho, d, 1);
            CHECK(res.min_margin == doctest::Approx(mu1 - bound).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(tensor_decay_check(1.0, 4, 10), size_error);
    CHECK_THROWS_AS(tensor_decay_check(1.0, 2, 501), size_error);
    CHECK_THROWS_AS(tensor_decay_check(-1.0, 2, 10), domain_error);
}

TEST_CASE("ks statistic basics") {
    std::vector<double> ideal(99);
    for (int i = 0; i < 99; ++i) ideal[static_cast<std::size_t>(i)] = (i + 0.5) / 99.0;
    CHECK(ks_statistic(ideal, [](double x) { return x; }) <=
          0.5 / 99.0 + 1e-12);
    CHECK_THROWS_AS(ks_statistic({}, [](double x) { return x; }), domain_error);
}

} // TEST_SUITE
