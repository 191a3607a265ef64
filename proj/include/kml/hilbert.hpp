#pragma once

#include "kml/rational.hpp"

namespace kml {

// Exact arithmetic for Hilbert matrices H_m with entries 1/(i+j-1).
// Everything here is pure rational arithmetic; no floating point. The
// order is capped because entry bit-lengths grow rapidly with m.

inline constexpr int kMaxHilbertOrder = 64;

/// H_m with (i,j) entry 1/(i+j-1), 1-based. 1 <= m <= 64.
RationalMatrix hilbert_matrix(int m);

/// Exact inverse of H_m, computed by rational Gauss-Jordan elimination.
RationalMatrix hilbert_inverse(int m);

/// Exact solution of H_m a = rhs.
RationalVector solve_hilbert(int m, const RationalVector& rhs);

/// v^T H_m^{-1} v, exact.
Rational quadratic_form_inverse(int m, const RationalVector& v);

/// Power vector (1, x, x^2, ..., x^{m-1}).
RationalVector power_vector(int m, const Rational& x);

} // namespace kml
