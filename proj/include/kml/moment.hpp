#pragma once

#include <span>
#include <vector>

#include "kml/density.hpp"
#include "kml/hilbert.hpp"
#include "kml/rational.hpp"

namespace kml {

class QuadratureGrid;

/**
 * Minimal moment function on [0,1]: the polynomial of degree m-1 with least
 * L^2 norm whose first m power moments are 1, x, ..., x^{m-1}. Coefficients
 * solve H_m a = (1, x, ..., x^{m-1}) exactly; float mirrors are the rounded
 * exact values.
 */
struct MomentPolynomial {
    int m = 0;
    Rational anchor;
    RationalVector coefficients;
    std::vector<double> float_coefficients;

    MomentPolynomial() : coefficients(1) {}

    /// Horner evaluation of the float mirrors. Only trustworthy for small m;
    /// larger degrees go through the orthogonal-basis path (moment_weight).
    double evaluate(double z) const;
};

MomentPolynomial build_moment_polynomial(int m, const Rational& x);

/// Exact value of int_0^1 z^l w(z) dz = sum_i a_i / (l + i).
Rational moment_integral(const MomentPolynomial& w, int l);

/// Exact value of int_0^1 w(z)^2 dz.
Rational squared_norm(const MomentPolynomial& w);

/// Coefficients for a double anchor: exact H_m^{-1} rounded to double, then
/// multiplied by the double power vector. Never a floating LU of H_m.
std::vector<double> moment_coefficients_double(int m, double x);

/**
 * The piecewise construction used to bound the interior-anchor norm: the
 * left piece rescales the anchor-1 function onto [0,x], the right piece is
 * its reflection on (x,1]. Satisfies all m moment constraints; its squared
 * L^2 norm is exactly m^2.
 */
struct AuxiliaryMomentFunction {
    int m = 0;
    Rational anchor;
    MomentPolynomial base;   // the anchor-1 minimal moment function

    double evaluate(double z) const;
};

AuxiliaryMomentFunction build_auxiliary(int m, const Rational& x);

/// Exact int_0^1 z^h w~(z) dz, by direct piecewise integration.
Rational auxiliary_moment_integral(const AuxiliaryMomentFunction& aux, int h);

/// Exact int_0^1 w~(z)^2 dz, by direct piecewise integration.
Rational auxiliary_squared_norm(const AuxiliaryMomentFunction& aux);

/**
 * Stable evaluator for the 1-D minimal moment function. The function equals
 * the reproducing kernel of degree-(m-1) polynomials in L^2([0,1]),
 *
 *   w_m^x(z) = sum_{k<m} (2k+1) P~_k(x) P~_k(z),
 *
 * so evaluating through the shifted Legendre recurrence avoids the monomial
 * cancellation entirely and works for any m.
 */
class MomentWeightEvaluator {
public:
    MomentWeightEvaluator(int m, double anchor);

    double operator()(double z) const;
    double anchor() const { return anchor_; }
    int order() const { return m_; }

    /// sum_{k<m} (2k+1) P~_k(x)^2 = ||w_m^x||^2, numerically.
    double squared_norm() const;

private:
    int m_;
    double anchor_;
    std::vector<double> scaled_anchor_values_;   // (2k+1) P~_k(x)
};

/// d-dimensional product weight W_m^x(z) = prod_i w_m^{x_i}(z_i) / p(z).
class ProductWeight {
public:
    ProductWeight(int m, std::vector<double> anchors, DensityHandle density);
    ProductWeight(int m, const std::vector<Rational>& anchors, DensityHandle density);

    int dimension() const { return static_cast<int>(axes_.size()); }
    int order() const { return m_; }
    const std::vector<double>& anchors() const { return anchors_; }
    const DensityHandle& density() const { return density_; }
    bool has_exact_anchors() const { return !exact_anchors_.empty(); }

    double value(std::span<const double> z) const;
    std::vector<double> node_values(const QuadratureGrid& grid) const;

    /// Exact squared L^2(P) norm for the uniform density: the product of the
    /// per-axis exact norms. Requires rational anchors.
    Rational squared_norm_exact_uniform() const;

    /// c_p * prod_i ||w_m^{x_i}||^2, the certified upper bound <= c_p m^{2d}.
    double squared_norm_bound() const;

private:
    int m_;
    std::vector<double> anchors_;
    std::vector<Rational> exact_anchors_;
    DensityHandle density_;
    std::vector<MomentWeightEvaluator> axes_;
};

ProductWeight build_product_weight(int m, const std::vector<Rational>& anchors,
                                   DensityHandle density);
ProductWeight build_product_weight(int m, const std::vector<double>& anchors,
                                   DensityHandle density);

/**
 * Quadrature check of the multivariate moment property
 *   int (||y-z||^2)^l W_m^x(z) p(z) dz = (||y-x||^2)^l.
 * Returns the absolute residual. Enforces 2l <= m-1 and q >= m + 2l.
 */
double multivariate_moment_check(const ProductWeight& w, std::span<const double> y, int l,
                                 int quadrature_order);

} // namespace kml
