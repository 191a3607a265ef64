#include "kml/hilbert.hpp"

namespace kml {

namespace {

void check_order(int m) {
    if (m < 1 || m > kMaxHilbertOrder)
        throw size_error("hilbert: order must satisfy 1 <= m <= 64, got " + std::to_string(m));
}

// Gauss-Jordan with nonzero pivoting on an augmented system [A | B].
// Rational arithmetic is exact, so pivoting only needs to avoid zeros;
// Hilbert matrices are positive definite and never produce one.
std::vector<RationalVector> solve_columns(const RationalMatrix& a,
                                          std::vector<RationalVector> cols) {
    const std::size_t n = a.order();
    const std::size_t k = cols.size();
    std::vector<std::vector<Rational>> aug(n, std::vector<Rational>(n + k));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug[i][j] = a(i, j);
        for (std::size_t c = 0; c < k; ++c) aug[i][n + c] = cols[c][i];
    }

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && aug[pivot][col] == 0) ++pivot;
        if (pivot == n) throw numerical_error("hilbert: singular system (unexpected)");
        if (pivot != col) std::swap(aug[pivot], aug[col]);

        const Rational inv_p = Rational(1) / aug[col][col];
        for (std::size_t j = col; j < n + k; ++j) aug[col][j] *= inv_p;
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || aug[row][col] == 0) continue;
            const Rational factor = aug[row][col];
            for (std::size_t j = col; j < n + k; ++j) aug[row][j] -= factor * aug[col][j];
        }
    }

    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i < n; ++i) cols[c][i] = aug[i][n + c];
    return cols;
}

} // namespace

RationalMatrix hilbert_matrix(int m) {
    check_order(m);
    RationalMatrix h(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j)
            h(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) =
                rat(1, i + j - 1);
    return h;
}

RationalMatrix hilbert_inverse(int m) {
    check_order(m);
    const RationalMatrix h = hilbert_matrix(m);
    const std::size_t n = static_cast<std::size_t>(m);
    std::vector<RationalVector> cols;
    cols.reserve(n);
    for (std::size_t c = 0; c < n; ++c) {
        RationalVector e(n);
        e[c] = 1;
        cols.push_back(std::move(e));
    }
    cols = solve_columns(h, std::move(cols));
    RationalMatrix inv(n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i < n; ++i) inv(i, c) = cols[c][i];
    return inv;
}

RationalVector solve_hilbert(int m, const RationalVector& rhs) {
    check_order(m);
    if (rhs.size() != static_cast<std::size_t>(m))
        throw shape_error("solve_hilbert: rhs length must equal m");
    std::vector<RationalVector> cols;
    cols.push_back(rhs);
    cols = solve_columns(hilbert_matrix(m), std::move(cols));
    return cols[0];
}

Rational quadratic_form_inverse(int m, const RationalVector& v) {
    check_order(m);
    if (v.size() != static_cast<std::size_t>(m))
        throw shape_error("quadratic_form_inverse: vector length must equal m");
    const RationalVector x = solve_hilbert(m, v);
    Rational s(0);
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * x[i];
    return s;
}

RationalVector power_vector(int m, const Rational& x) {
    if (m < 1) throw size_error("power_vector: m must be >= 1");
    RationalVector v(static_cast<std::size_t>(m));
    Rational p(1);
    for (int i = 0; i < m; ++i) {
        v[static_cast<std::size_t>(i)] = p;
        p *= x;
    }
    return v;
}

} // namespace kml
