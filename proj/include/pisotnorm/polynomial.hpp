#pragma once

// Dense univariate polynomials over Q with the handful of exact algorithms the
// algebraic layer needs: Euclidean division, gcd, Sturm sequences and
// Schur-Cohn root counting in a disc.

#include "pisotnorm/numeric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pisotnorm::poly {

/// Coefficients, constant term first. The zero polynomial is the empty vector.
using QPoly = std::vector<Rational>;

void trim(QPoly& p);
int degree(const QPoly& p);  // -1 for the zero polynomial
QPoly add(const QPoly& a, const QPoly& b);
QPoly sub(const QPoly& a, const QPoly& b);
QPoly mul(const QPoly& a, const QPoly& b);
QPoly scale(const QPoly& a, const Rational& c);
/// Quotient and remainder; b must be non-zero.
std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
/// Monic gcd (zero if both inputs are zero).
QPoly gcd(QPoly a, QPoly b);
QPoly make_monic(const QPoly& p);
QPoly derivative(const QPoly& p);
Rational evaluate(const QPoly& p, const Rational& x);
int sign_at(const QPoly& p, const Rational& x);
/// Square-free part p / gcd(p, p').
QPoly squarefree(const QPoly& p);
std::string to_string(const QPoly& p, const std::string& var = "x");

/// Sturm sequence of a square-free polynomial.
std::vector<QPoly> sturm_sequence(const QPoly& p);
/// Number of distinct real roots in the half-open interval (a, b].
int count_roots(const std::vector<QPoly>& sturm, const Rational& a, const Rational& b);
/// Number of distinct real roots in (a, +inf).
int count_roots_above(const std::vector<QPoly>& sturm, const Rational& a);
/// Number of distinct real roots on the whole line.
int count_real_roots(const std::vector<QPoly>& sturm);

/// Number of roots (with multiplicity) of p strictly inside |z| < radius,
/// via the Schur-Cohn transform. Returns nullopt in the singular case
/// (a root on the circle, or a self-inversive intermediate polynomial).
std::optional<int> roots_inside_disc(const QPoly& p, const Rational& radius);

}  // namespace pisotnorm::poly
