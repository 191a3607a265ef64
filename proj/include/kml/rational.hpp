#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <string>
#include <vector>

#include "kml/errors.hpp"

namespace kml {

// Arbitrary-precision rational scalar. boost::multiprecision keeps every
// value canonical (reduced by gcd, denominator > 0) after each operation,
// so equality is structural.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long long num, long long den = 1) {
    if (den == 0) throw domain_error("rational: zero denominator");
    return Rational(BigInt(num), BigInt(den));
}

inline BigInt numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

inline Rational rational_pow(const Rational& base, unsigned exp) {
    Rational acc(1), b = base;
    while (exp != 0) {
        if (exp & 1u) acc *= b;
        b *= b;
        exp >>= 1u;
    }
    return acc;
}

/// Dense vector of rationals, length >= 1.
class RationalVector {
public:
    explicit RationalVector(std::size_t n) : entries_(n) {
        if (n == 0) throw size_error("RationalVector: length must be >= 1");
    }
    RationalVector(std::initializer_list<Rational> init) : entries_(init) {
        if (entries_.empty()) throw size_error("RationalVector: length must be >= 1");
    }

    std::size_t size() const { return entries_.size(); }

    Rational& operator[](std::size_t i) {
        if (i >= entries_.size()) throw index_error("RationalVector: index out of range");
        return entries_[i];
    }
    const Rational& operator[](std::size_t i) const {
        if (i >= entries_.size()) throw index_error("RationalVector: index out of range");
        return entries_[i];
    }

    bool operator==(const RationalVector& other) const { return entries_ == other.entries_; }

private:
    std::vector<Rational> entries_;
};

/// Square matrix of rationals with bounds-checked access.
class RationalMatrix {
public:
    explicit RationalMatrix(std::size_t order) : order_(order), entries_(order * order) {
        if (order == 0) throw size_error("RationalMatrix: order must be >= 1");
    }

    std::size_t order() const { return order_; }

    Rational& operator()(std::size_t i, std::size_t j) {
        check(i, j);
        return entries_[i * order_ + j];
    }
    const Rational& operator()(std::size_t i, std::size_t j) const {
        check(i, j);
        return entries_[i * order_ + j];
    }

    bool operator==(const RationalMatrix& other) const {
        return order_ == other.order_ && entries_ == other.entries_;
    }

    static RationalMatrix identity(std::size_t order) {
        RationalMatrix m(order);
        for (std::size_t i = 0; i < order; ++i) m(i, i) = 1;
        return m;
    }

    RationalMatrix operator*(const RationalMatrix& rhs) const {
        if (order_ != rhs.order_) throw shape_error("RationalMatrix: order mismatch");
        RationalMatrix out(order_);
        for (std::size_t i = 0; i < order_; ++i)
            for (std::size_t k = 0; k < order_; ++k) {
                const Rational& a = (*this)(i, k);
                if (a == 0) continue;
                for (std::size_t j = 0; j < order_; ++j) out(i, j) += a * rhs(k, j);
            }
        return out;
    }

    RationalVector operator*(const RationalVector& v) const {
        if (v.size() != order_) throw shape_error("RationalMatrix: vector length mismatch");
        RationalVector out(order_);
        for (std::size_t i = 0; i < order_; ++i) {
            Rational s(0);
            for (std::size_t j = 0; j < order_; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

private:
    void check(std::size_t i, std::size_t j) const {
        if (i >= order_ || j >= order_) throw index_error("RationalMatrix: index out of range");
    }

    std::size_t order_;
    std::vector<Rational> entries_;
};

} // namespace kml
