#include "kml/moment.hpp"

#include <cmath>

#include "kml/legendre.hpp"
#include "kml/quadrature.hpp"

namespace kml {

namespace {

void check_anchor_closed(const Rational& x) {
    if (x < 0 || x > 1) throw domain_error("moment: anchor must lie in [0,1]");
}

BigInt binomial_int(int n, int k) {
    BigInt r(1);
    for (int i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

} // namespace

double MomentPolynomial::evaluate(double z) const {
    double acc = 0.0;
    for (std::size_t i = float_coefficients.size(); i-- > 0;)
        acc = acc * z + float_coefficients[i];
    return acc;
}

MomentPolynomial build_moment_polynomial(int m, const Rational& x) {
    if (m < 1) throw size_error("build_moment_polynomial: m must be >= 1");
    check_anchor_closed(x);

    MomentPolynomial w;
    w.m = m;
    w.anchor = x;
    w.coefficients = solve_hilbert(m, power_vector(m, x));
    w.float_coefficients.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        w.float_coefficients[static_cast<std::size_t>(i)] =
            to_double(w.coefficients[static_cast<std::size_t>(i)]);
    return w;
}

Rational moment_integral(const MomentPolynomial& w, int l) {
    if (l < 0) throw domain_error("moment_integral: l must be >= 0");
    Rational s(0);
    for (int i = 1; i <= w.m; ++i)
        s += w.coefficients[static_cast<std::size_t>(i - 1)] / Rational(l + i);
    return s;
}

Rational squared_norm(const MomentPolynomial& w) {
    // a^T H a = a^T xbar since H a = xbar.
    const RationalVector xbar = power_vector(w.m, w.anchor);
    Rational s(0);
    for (std::size_t i = 0; i < xbar.size(); ++i) s += w.coefficients[i] * xbar[i];
    return s;
}

std::vector<double> moment_coefficients_double(int m, double x) {
    if (m < 1) throw size_error("moment_coefficients_double: m must be >= 1");
    if (!(x >= 0.0 && x <= 1.0))
        throw domain_error("moment_coefficients_double: anchor must lie in [0,1]");
    const RationalMatrix inv = hilbert_inverse(m);
    std::vector<double> coeff(static_cast<std::size_t>(m), 0.0);
    double p = 1.0;
    std::vector<double> xbar(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        xbar[static_cast<std::size_t>(i)] = p;
        p *= x;
    }
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j)
            s += to_double(inv(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) *
                 xbar[static_cast<std::size_t>(j)];
        coeff[static_cast<std::size_t>(i)] = s;
    }
    return coeff;
}

double AuxiliaryMomentFunction::evaluate(double z) const {
    const double x = to_double(anchor);
    if (z <= x) return base.evaluate(z / x);
    return base.evaluate((1.0 - z) / (1.0 - x));
}

AuxiliaryMomentFunction build_auxiliary(int m, const Rational& x) {
    if (m < 1) throw size_error("build_auxiliary: m must be >= 1");
    if (x <= 0 || x >= 1)
        throw domain_error("build_auxiliary: anchor must lie strictly inside (0,1)");
    AuxiliaryMomentFunction aux;
    aux.m = m;
    aux.anchor = x;
    aux.base = build_moment_polynomial(m, Rational(1));
    return aux;
}

Rational auxiliary_moment_integral(const AuxiliaryMomentFunction& aux, int h) {
    if (h < 0) throw domain_error("auxiliary_moment_integral: h must be >= 0");
    const Rational& x = aux.anchor;
    const Rational one_minus = Rational(1) - x;

    // Base moments mu_p = int_0^1 v^p w(v) dv, needed up to p = h.
    std::vector<Rational> mu(static_cast<std::size_t>(h) + 1);
    for (int p = 0; p <= h; ++p) mu[static_cast<std::size_t>(p)] = moment_integral(aux.base, p);

    // Left piece: int_0^x z^h w(z/x) dz = x^{h+1} mu_h.
    const Rational left = rational_pow(x, static_cast<unsigned>(h) + 1) *
                          mu[static_cast<std::size_t>(h)];

    // Right piece after the substitutions z -> 1-u, u -> (1-x) v:
    //   (1-x) sum_p C(h,p) (-(1-x))^p mu_p.
    Rational right(0);
    for (int p = 0; p <= h; ++p) {
        Rational term = Rational(binomial_int(h, p)) *
                        rational_pow(one_minus, static_cast<unsigned>(p)) *
                        mu[static_cast<std::size_t>(p)];
        if (p % 2 == 1) term = -term;
        right += term;
    }
    right *= one_minus;

    return left + right;
}

Rational auxiliary_squared_norm(const AuxiliaryMomentFunction& aux) {
    // Each piece integrates the squared polynomial directly:
    //   int_0^x w(z/x)^2 dz = x sum_{ij} a_i a_j / (i+j-1), same for the
    //   reflected piece with factor (1-x).
    Rational q(0);
    for (int i = 1; i <= aux.m; ++i)
        for (int j = 1; j <= aux.m; ++j)
            q += aux.base.coefficients[static_cast<std::size_t>(i - 1)] *
                 aux.base.coefficients[static_cast<std::size_t>(j - 1)] / Rational(i + j - 1);
    return aux.anchor * q + (Rational(1) - aux.anchor) * q;
}

MomentWeightEvaluator::MomentWeightEvaluator(int m, double anchor) : m_(m), anchor_(anchor) {
    if (m < 1) throw size_error("MomentWeightEvaluator: m must be >= 1");
    if (!(anchor >= 0.0 && anchor <= 1.0))
        throw domain_error("MomentWeightEvaluator: anchor must lie in [0,1]");
    scaled_anchor_values_ = shifted_legendre_values(m, anchor);
    for (int k = 0; k < m; ++k) scaled_anchor_values_[static_cast<std::size_t>(k)] *= 2.0 * k + 1.0;
}

double MomentWeightEvaluator::operator()(double z) const {
    const std::vector<double> pz = shifted_legendre_values(m_, z);
    double s = 0.0;
    for (int k = 0; k < m_; ++k)
        s += scaled_anchor_values_[static_cast<std::size_t>(k)] * pz[static_cast<std::size_t>(k)];
    return s;
}

double MomentWeightEvaluator::squared_norm() const {
    double s = 0.0;
    for (int k = 0; k < m_; ++k) {
        const double v = scaled_anchor_values_[static_cast<std::size_t>(k)];
        s += v * v / (2.0 * k + 1.0);
    }
    return s;
}

ProductWeight::ProductWeight(int m, std::vector<double> anchors, DensityHandle density)
    : m_(m), anchors_(std::move(anchors)), density_(std::move(density)) {
    if (m < 1) throw size_error("ProductWeight: m must be >= 1");
    if (anchors_.empty()) throw size_error("ProductWeight: dimension must be >= 1");
    axes_.reserve(anchors_.size());
    for (double x : anchors_) axes_.emplace_back(m_, x);
    // Fail fast on a degenerate density: probe at the anchor.
    density_(std::span<const double>(anchors_.data(), anchors_.size()));
}

ProductWeight::ProductWeight(int m, const std::vector<Rational>& anchors, DensityHandle density)
    : ProductWeight(m,
                    [&] {
                        std::vector<double> a;
                        a.reserve(anchors.size());
                        for (const Rational& r : anchors) {
                            check_anchor_closed(r);
                            a.push_back(to_double(r));
                        }
                        return a;
                    }(),
                    std::move(density)) {
    exact_anchors_ = anchors;
}

double ProductWeight::value(std::span<const double> z) const {
    if (z.size() != anchors_.size()) throw shape_error("ProductWeight: dimension mismatch");
    double prod = 1.0;
    for (std::size_t i = 0; i < axes_.size(); ++i) prod *= axes_[i](z[i]);
    return prod / density_(z);
}

std::vector<double> ProductWeight::node_values(const QuadratureGrid& grid) const {
    if (grid.dimension() != dimension())
        throw shape_error("ProductWeight: grid dimension mismatch");
    // Per-axis tables over the shared axis nodes, then products over the grid.
    const std::vector<double>& nodes = grid.axis_nodes();
    std::vector<std::vector<double>> table(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        table[a].resize(nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) table[a][k] = axes_[a](nodes[k]);
    }
    std::vector<double> out(grid.size());
    const int d = dimension();
    const int q = grid.order();
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double prod = 1.0;
        for (int a = 0; a < d; ++a) prod *= table[static_cast<std::size_t>(a)][idx[static_cast<std::size_t>(a)]];
        out[i] = prod / grid.density_value(i);
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < static_cast<std::size_t>(q)) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
    return out;
}

Rational ProductWeight::squared_norm_exact_uniform() const {
    if (exact_anchors_.empty())
        throw domain_error("ProductWeight: exact norm requires rational anchors");
    if (!density_.uniform)
        throw domain_error("ProductWeight: exact norm implemented for the uniform density");
    Rational prod(1);
    for (const Rational& x : exact_anchors_) prod *= squared_norm(build_moment_polynomial(m_, x));
    return prod;
}

double ProductWeight::squared_norm_bound() const {
    double prod = 1.0;
    for (const auto& ax : axes_) prod *= ax.squared_norm();
    return density_.c_p * prod;
}

ProductWeight build_product_weight(int m, const std::vector<Rational>& anchors,
                                   DensityHandle density) {
    return ProductWeight(m, anchors, std::move(density));
}

ProductWeight build_product_weight(int m, const std::vector<double>& anchors,
                                   DensityHandle density) {
    return ProductWeight(m, anchors, std::move(density));
}

double multivariate_moment_check(const ProductWeight& w, std::span<const double> y, int l,
                                 int quadrature_order) {
    if (l < 0) throw domain_error("multivariate_moment_check: l must be >= 0");
    if (2 * l > w.order() - 1)
        throw constraint_error("multivariate_moment_check: requires 2l <= m-1");
    if (quadrature_order < w.order() + 2 * l)
        throw constraint_error("multivariate_moment_check: requires q >= m + 2l");
    if (y.size() != static_cast<std::size_t>(w.dimension()))
        throw shape_error("multivariate_moment_check: point dimension mismatch");

    const QuadratureGrid grid(w.dimension(), quadrature_order, w.density(),
                              std::size_t{200000});
    const std::vector<double> wv = w.node_values(grid);
    double lhs = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto z = grid.point(i);
        double r2 = 0.0;
        for (std::size_t a = 0; a < z.size(); ++a) {
            const double dlt = y[a] - z[a];
            r2 += dlt * dlt;
        }
        lhs += grid.weight(i) * grid.density_value(i) * wv[i] * std::pow(r2, l);
    }

    double rx2 = 0.0;
    for (std::size_t a = 0; a < y.size(); ++a) {
        const double dlt = y[a] - w.anchors()[a];
        rx2 += dlt * dlt;
    }
    return std::abs(lhs - std::pow(rx2, l));
}

} // namespace kml
