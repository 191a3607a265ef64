#include <doctest.h>

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "kml/moment.hpp"
#include "kml/quadrature.hpp"
#include "kml/radial.hpp"
#include "kml/rng.hpp"
#include "kml/spectral.hpp"
#include "kml/verify.hpp"

using namespace kml;

namespace {

RadialKernelSpec constant_kernel(int dim = 1) {
    return custom_series_kernel([](int l) { return l == 0 ? 1.0 : 0.0; }, dim);
}

} // namespace

TEST_SUITE("quadrature") {

TEST_CASE("gauss-legendre weights and exactness") {
    const GaussLegendreRule rule = gauss_legendre_01(8);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < rule.nodes.size(); ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    CHECK(rule.nodes.front() > 0.0);
    CHECK(rule.nodes.back() < 1.0);

    // exact for polynomials of degree <= 2q-1
    for (int k = 0; k <= 15; ++k) {
        double integral = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            integral += rule.weights[i] * std::pow(rule.nodes[i], k);
        CHECK(integral == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
}

TEST_CASE("tensor grid mass") {
    const QuadratureGrid uniform_grid(2, 8, uniform_density());
    double mass = 0.0;
    for (std::size_t i = 0; i < uniform_grid.size(); ++i)
        mass += uniform_grid.weight(i) * uniform_grid.density_value(i);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    const QuadratureGrid skew_grid(2, 8, perturbed_density(0.4));
    mass = 0.0;
    for (std::size_t i = 0; i < skew_grid.size(); ++i)
        mass += skew_grid.weight(i) * skew_grid.density_value(i);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(QuadratureGrid(2, 160, uniform_density()), size_error);
}

} // TEST_SUITE

TEST_SUITE("spectral") {

TEST_CASE("rank-one constant kernel") {
    const SpectralModel model = build_model(constant_kernel(), 16);
    CHECK(model.rank() == 1);
    CHECK(model.eigenvalues()[0] == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::VectorXd phi = model.eigenfunction_nodes(1);
    for (Eigen::Index i = 0; i < phi.size(); ++i)
        CHECK(std::abs(phi(i)) == doctest::Approx(1.0).epsilon(1e-10));
    // extension at any point matches the (sign-consistent) node values
    const double at = model.nystrom_extend(1, std::vector<double>{0.77});
    CHECK(at == doctest::Approx(phi(0)).epsilon(1e-10));
}

TEST_CASE("build preconditions") {
    CHECK_THROWS_AS(build_model(constant_kernel(), 4), size_error);
    CHECK_THROWS_AS(build_model(gaussian_kernel(1.0, 2), 160), size_error);
}

TEST_CASE("gaussian model invariants") {
    const RadialKernelSpec kernel = gaussian_kernel(1.0, 1);
    const SpectralModel m64 = build_model(kernel, 64);
    const SpectralModel m96 = build_model(kernel, 96);

    SUBCASE("trace identity") {
        double trace = 0.0;
        for (double mu : m64.eigenvalues()) trace += mu;
        // k(z,z) = 1, so the quadrature trace is the total mass
        CHECK(trace == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("quadrature orthonormality") {
        const QuadratureGrid& grid = m64.grid();
        for (int a = 1; a <= m64.rank(); ++a)
            for (int b = a; b <= m64.rank(); ++b) {
                double dot = 0.0;
                for (std::size_t i = 0; i < grid.size(); ++i)
                    dot += grid.weight(i) * grid.density_value(i) *
                           m64.eigenfunction_nodes(a)(static_cast<Eigen::Index>(i)) *
                           m64.eigenfunction_nodes(b)(static_cast<Eigen::Index>(i));
                CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-8);
            }
    }
    SUBCASE("leading eigenvalue stable under grid refinement") {
        CHECK(std::abs(m64.eigenvalues()[0] - m96.eigenvalues()[0]) / m96.eigenvalues()[0] <=
              1e-10);
    }
    SUBCASE("grid refinement for the retained spectrum") {
        // The discretization is converged at these orders; what remains is
        // eigensolver round-off at absolute size ~eps*mu_1, so tiny
        // eigenvalues can only be compared in that metric.
        const int l_max = std::min({m64.rank(), m96.rank(), 10});
        for (int l = 0; l < l_max; ++l) {
            const double a = m64.eigenvalues()[static_cast<std::size_t>(l)];
            const double b = m96.eigenvalues()[static_cast<std::size_t>(l)];
            const bool close_rel = std::abs(a - b) / b <= 1e-8;
            const bool close_abs = std::abs(a - b) <= 1e-13 * m96.eigenvalues()[0];
            CHECK((close_rel || close_abs));
        }
    }
    SUBCASE("non-increasing spectrum") {
        for (std::size_t l = 1; l < m96.eigenvalues().size(); ++l)
            CHECK(m96.eigenvalues()[l] <= m96.eigenvalues()[l - 1]);
    }
}

TEST_CASE("nystrom extension") {
    const SpectralModel model = build_model(gaussian_kernel(1.0, 1), 48);

    SUBCASE("consistency at grid nodes") {
        const QuadratureGrid& grid = model.grid();
        for (int l = 1; l <= std::min(6, model.rank()); ++l)
            for (std::size_t i = 0; i < grid.size(); i += 7) {
                const double ext = model.nystrom_extend(l, grid.point(i));
                CHECK(std::abs(ext - model.eigenfunction_nodes(l)(
                                         static_cast<Eigen::Index>(i))) <= 1e-8);
            }
    }
    SUBCASE("eigen-relation residual off the grid") {
        Xoshiro256pp rng(7);
        const QuadratureGrid& grid = model.grid();
        std::vector<double> f(grid.size());
        for (int l = 1; l <= std::min(10, model.rank()); ++l) {
            const double mu = model.eigenvalues()[static_cast<std::size_t>(l - 1)];
            for (std::size_t i = 0; i < grid.size(); ++i)
                f[i] = model.eigenfunction_nodes(l)(static_cast<Eigen::Index>(i));
            for (int rep = 0; rep < 50; ++rep) {
                const double x = rng.uniform01();
                const double lhs = model.apply_operator(f, std::span<const double>(&x, 1));
                const double rhs = mu * model.nystrom_extend(l, std::span<const double>(&x, 1));
                CHECK(std::abs(lhs - rhs) <= 1e-8 * model.eigenvalues()[0]);
            }
        }
    }
    SUBCASE("index bounds") {
        CHECK_THROWS_AS(model.nystrom_extend(model.rank() + 1, std::vector<double>{0.5}),
                        index_error);
        CHECK_THROWS_AS(model.nystrom_extend(0, std::vector<double>{0.5}), index_error);
    }
}

TEST_CASE("operator application") {
    const SpectralModel model = build_model(constant_kernel(), 16);
    const std::vector<double> zeros(model.grid().size(), 0.0);
    CHECK(model.apply_operator(zeros, std::vector<double>{0.4}) == 0.0);

    const std::vector<double> ones(model.grid().size(), 1.0);
    CHECK(model.apply_operator(ones, std::vector<double>{0.4}) == doctest::Approx(1.0));

    CHECK_THROWS_AS(model.apply_operator(std::vector<double>{1.0}, std::vector<double>{0.4}),
                    shape_error);
}

TEST_CASE("weight function representation") {
    const SpectralModel toy = build_model(constant_kernel(), 16);

    SUBCASE("halving at lambda = mu_1") {
        const WeightFunctionRep rep =
            weight_function(toy, std::vector<double>{0.3}, toy.eigenvalues()[0]);
        const double phi_x = toy.nystrom_extend(1, std::vector<double>{0.3});
        CHECK(rep.coefficients[0] == doctest::Approx(0.5 * phi_x).epsilon(1e-10));
        CHECK(rep.mixed_norm == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("large lambda kills the coefficients") {
        const WeightFunctionRep rep = weight_function(toy, std::vector<double>{0.3}, 1e12);
        CHECK(std::abs(rep.coefficients[0]) < 1e-11);
    }
    SUBCASE("Mercer partial sum recovers k(x,x); lambda=0 keeps the full series") {
        const SpectralModel model = build_model(gaussian_kernel(1.0, 1), 64);
        const std::vector<double> x{0.37};
        double mercer = 0.0, series = 0.0;
        for (int l = 1; l <= model.rank(); ++l) {
            const double phi = model.nystrom_extend(l, x);
            mercer += model.eigenvalues()[static_cast<std::size_t>(l - 1)] * phi * phi;
            series += phi * phi;
        }
        CHECK(mercer == doctest::Approx(1.0).epsilon(1e-6));   // k(x,x) = 1
        const WeightFunctionRep rep = weight_function(model, x, 0.0);
        CHECK(rep.mixed_norm == doctest::Approx(series).epsilon(1e-12));
    }
    CHECK_THROWS_AS(weight_function(toy, std::vector<double>{0.3}, -1.0), domain_error);
}

TEST_CASE("empirical weight-norm sup") {
    const SpectralModel toy = build_model(constant_kernel(), 16);
    CHECK(empirical_ninf(toy, toy.eigenvalues()[0], 9) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(empirical_ninf(toy, 0.0, 9), domain_error);
    CHECK_THROWS_AS(empirical_ninf(toy, 0.5, 2), domain_error);

    SUBCASE("non-increasing over a 10-decade sweep") {
        const SpectralModel model = build_model(gaussian_kernel(1.0, 1), 64);
        double prev = 0.0;
        for (int k = 1; k <= 10; ++k) {
            const double v = empirical_ninf(model, std::pow(10.0, -k), 65);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("empirical sup error") {
    SUBCASE("constant kernel with the order-one weight is exact") {
        const SpectralModel toy = build_model(constant_kernel(), 16);
        const ProductWeight w = build_product_weight(1, std::vector<double>{0.5},
                                                     uniform_density());
        CHECK(empirical_sup_error(toy, w, std::vector<double>{0.5}, 33) <= 1e-12);
    }
    SUBCASE("dominated by the tail bound") {
        const RadialKernelSpec kernel = gaussian_kernel(1.0, 1);
        for (int m : {3, 6, 9}) {
            const SpectralModel model = build_model(kernel, std::max(8, 2 * m));
            const double bound = taylor_uniform_bound(kernel, m);
            for (double x : {0.0, 0.5, 1.0}) {
                const ProductWeight w =
                    build_product_weight(m, std::vector<double>{x}, uniform_density());
                CHECK(empirical_sup_error(model, w, std::span<const double>(&x, 1), 257) <=
                      bound + 1e-8);
            }
        }
    }
    SUBCASE("tensor fast path equals the generic path") {
        const std::vector<double> anchors{0.0, 0.5, 1.0};
        const double tensor = sup_error_tensor(1.0, 2, 4, 8, anchors, 17);
        const SpectralModel model = build_model(gaussian_kernel(1.0, 2), 8);
        double generic = 0.0;
        for (double x1 : anchors)
            for (double x2 : anchors) {
                const ProductWeight w = build_product_weight(
                    4, std::vector<double>{x1, x2}, uniform_density());
                generic = std::max(
                    generic, empirical_sup_error(model, w, std::vector<double>{x1, x2}, 17));
            }
        CHECK(tensor == doctest::Approx(generic).epsilon(1e-11));
    }
}

TEST_CASE("empirical rkhs error") {
    const RadialKernelSpec kernel = gaussian_kernel(1.0, 1);
    const int m = schedule_m(kernel, 2.0);
    const SpectralModel model = build_model(kernel, 2 * m);
    const double x = 0.5;
    const ProductWeight w = build_product_weight(m, std::vector<double>{x}, uniform_density());
    const double err = empirical_rkhs_error(model, w, std::span<const double>(&x, 1));
    CHECK(err >= 0.0);
    CHECK(err <= rkhs_decay_bound(2.0));

    // norm comparison: ||g||_2^2 <= mu_1 ||g||_k^2
    const QuadratureGrid& grid = model.grid();
    const std::vector<double> f = w.node_values(grid);
    const std::vector<double> lf = model.apply_operator_nodes(f);
    double l2_sq = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = lf[i] - kernel_eval(kernel, std::span<const double>(&x, 1), grid.point(i));
        l2_sq += grid.weight(i) * grid.density_value(i) * g * g;
    }
    CHECK(err >= l2_sq / model.eigenvalues()[0] - 1e-15);
}

TEST_CASE("eigen decay fit") {
    SUBCASE("recovers a synthetic exact-model spectrum") {
        // Assemble a model document whose spectrum is exactly e^{-(l+1)^2}.
        const SpectralModel base = build_model(gaussian_kernel(1.0, 1), 16);
        nlohmann::json j = to_json(base);
        std::vector<double> mu(12);
        std::vector<std::vector<double>> phi(12, std::vector<double>(base.grid().size(), 0.0));
        for (int l = 1; l <= 12; ++l)
            mu[static_cast<std::size_t>(l - 1)] = std::exp(-std::pow(l + 1.0, 2.0));
        j["eigenvalues"] = mu;
        j["phi"] = phi;
        const SpectralModel synthetic = model_from_json(j);
        const DecayFit fit = eigen_decay_fit(synthetic);
        CHECK(fit.c_small == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(fit.c_big == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(fit.max_residual <= 1e-8);
    }
    SUBCASE("shifted fit lower-bounds the computed spectrum") {
        const SpectralModel model = build_model(gaussian_kernel(1.0, 1), 96);
        const DecayFit fit = eigen_decay_fit(model);
        CHECK(fit.c_small > 0.0);
        double min_res = 0.0;
        for (double r : fit.residuals) min_res = std::min(min_res, r);
        const double ln_c = std::log(fit.c_big) + min_res;
        for (int l = 1; l <= model.rank(); ++l)
            CHECK(std::log(model.eigenvalues()[static_cast<std::size_t>(l - 1)]) >=
                  ln_c - fit.c_small * std::pow(l + 1.0, 2.0) - 1e-9);
    }
    SUBCASE("tensor spectrum matches the product construction") {
        const SpectralModel one_d = build_model(gaussian_kernel(1.0, 1), 24);
        const SpectralModel two_d = build_model(gaussian_kernel(1.0, 2), 24);
        std::vector<double> products;
        for (double a : one_d.eigenvalues())
            for (double b : one_d.eigenvalues()) products.push_back(a * b);
        std::sort(products.begin(), products.end(), std::greater<>());
        for (int l = 0; l < 8; ++l)
            CHECK(two_d.eigenvalues()[static_cast<std::size_t>(l)] ==
                  doctest::Approx(products[static_cast<std::size_t>(l)]).epsilon(1e-8));
    }
    SUBCASE("insufficient rank") {
        CHECK_THROWS_AS(eigen_decay_fit(build_model(constant_kernel(), 16)), fit_error);
    }
}

TEST_CASE("interpolation inequality check") {
    const SpectralModel model = build_model(gaussian_kernel(1.0, 1), 64);
    // b valid for the first eigenfunction on the evaluation grid
    double b1 = 0.0;
    for (int i = 0; i <= 512; ++i) {
        const double x = static_cast<double>(i) / 512.0;
        b1 = std::max(b1, std::abs(model.nystrom_extend(1, std::span<const double>(&x, 1))));
    }

    SUBCASE("single-term case") {
        const std::vector<double> coeff{0.7};
        const BoundReport rep = interpolation_check(model, coeff, 4.0, b1, 513);
        CHECK(rep.passed);
    }
    SUBCASE("zero function") {
        const std::vector<double> coeff{0.0, 0.0};
        const BoundReport rep = interpolation_check(model, coeff, 4.0, b1, 129);
        CHECK(rep.passed);
        CHECK(*rep.empirical == 0.0);
    }
    CHECK_THROWS_AS(interpolation_check(model, std::vector<double>{1.0}, 3.0, b1, 65),
                    domain_error);
    CHECK_THROWS_AS(interpolation_check(
                        model, std::vector<double>(static_cast<std::size_t>(model.rank() + 1), 0.1),
                        4.0, b1, 65),
                    index_error);
}

TEST_CASE("model serialization round trip") {
    const SpectralModel model = build_model(gaussian_kernel(0.7, 1, perturbed_density(0.3)), 24);
    const nlohmann::json j = to_json(model);
    CHECK(j.at("version").get<int>() == 1);

    const SpectralModel restored = model_from_json(j);
    CHECK(restored.rank() == model.rank());
    for (int l = 0; l < model.rank(); ++l)
        CHECK(restored.eigenvalues()[static_cast<std::size_t>(l)] ==
              model.eigenvalues()[static_cast<std::size_t>(l)]);
    const std::vector<double> x{0.31};
    CHECK(restored.nystrom_extend(1, x) == model.nystrom_extend(1, x));

    nlohmann::json bad = j;
    bad["version"] = 2;
    CHECK_THROWS_AS(model_from_json(bad), config_error);
    nlohmann::json missing = j;
    missing.erase("version");
    CHECK_THROWS_AS(model_from_json(missing), config_error);
}

} // TEST_SUITE
