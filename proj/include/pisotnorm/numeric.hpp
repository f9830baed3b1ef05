#pragma once

// Exact integer/rational aliases and certified floating-point enclosures.
//
// Every transcendental quantity used by the library (logarithms, powers with
// real exponents, pi) is carried as a closed interval with MPFR outward
// rounding, so that decisions taken on it are either provably correct or
// explicitly retried at higher precision.

#include <gmpxx.h>
#include <mpfr.h>

#include <cstddef>
#include <string>

namespace pisotnorm {

using Integer = mpz_class;
using Rational = mpq_class;

/// Floor of a rational.
Integer floor(const Rational& q);
/// Ceiling of a rational.
Integer ceil(const Rational& q);
/// Smallest k with 2^k >= n (n >= 1).
std::size_t ceil_log2(const Integer& n);
Integer pow(const Integer& base, unsigned long exponent);
Rational pow(const Rational& base, long exponent);
Integer factorial(unsigned long n);

/// Renders q as "p/q" (or "p" when integral).
std::string to_string(const Rational& q);
/// Decimal rendering with `digits` significant digits. Display only.
std::string to_decimal(const Rational& q, int digits = 12);
/// Parses "p", "p/q" or a finite decimal such as "0.125".
Rational parse_rational(const std::string& text);

/// RAII wrapper around mpfr_t.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t precision);
    BigFloat(const BigFloat& other);
    BigFloat& operator=(const BigFloat& other);
    ~BigFloat();

    mpfr_ptr get() { return value_; }
    mpfr_srcptr get() const { return value_; }
    mpfr_prec_t precision() const { return mpfr_get_prec(value_); }

    /// Exact rational value of this (finite) float.
    Rational to_rational() const;
    double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

private:
    mpfr_t value_;
};

/// Closed interval [lo, hi] of reals with outward-rounded arithmetic.
class RealInterval {
public:
    explicit RealInterval(mpfr_prec_t precision);
    RealInterval(const Rational& lo, const Rational& hi, mpfr_prec_t precision);
    static RealInterval point(const Rational& q, mpfr_prec_t precision) { return {q, q, precision}; }
    static RealInterval pi(mpfr_prec_t precision);

    const BigFloat& lo() const { return lo_; }
    const BigFloat& hi() const { return hi_; }
    mpfr_prec_t precision() const { return lo_.precision(); }

    Rational lower() const { return lo_.to_rational(); }
    Rational upper() const { return hi_.to_rational(); }
    double midpoint() const;
    double width() const;
    bool contains_zero() const;
    bool strictly_positive() const;
    bool strictly_negative() const;

    RealInterval operator+(const RealInterval& other) const;
    RealInterval operator-(const RealInterval& other) const;
    RealInterval operator*(const RealInterval& other) const;
    /// Division; the divisor must not contain zero.
    RealInterval operator/(const RealInterval& other) const;
    RealInterval operator-() const;

    /// Natural logarithm; requires lo > 0.
    RealInterval log() const;
    RealInterval exp() const;
    RealInterval sqrt() const;
    RealInterval min(const RealInterval& other) const;

private:
    BigFloat lo_;
    BigFloat hi_;
};

/// Three-way certified comparison of two intervals: -1/+1 when disjoint,
/// 0 when they overlap (undecided at this precision).
int separate(const RealInterval& a, const RealInterval& b);

}  // namespace pisotnorm
