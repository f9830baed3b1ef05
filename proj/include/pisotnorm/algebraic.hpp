#pragma once

// Pisot bases and exact arithmetic in the real number field Q(beta).
//
// A FieldElement is a rational-coefficient polynomial in beta of degree
// below deg(beta), always reduced modulo the minimal polynomial. Its real
// value is the canonical embedding at the dominant root. Signs are decided
// exactly: a non-zero reduced polynomial cannot vanish at beta (the minimal
// polynomial is irreducible), so refining the enclosure of beta always
// terminates.

#include "pisotnorm/error.hpp"
#include "pisotnorm/numeric.hpp"
#include "pisotnorm/polynomial.hpp"

#include <complex>
#include <compare>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pisotnorm {

/// Monic integer polynomial, constant term first.
class MinimalPolynomial {
public:
    /// Throws Error(NotMonic) unless the leading coefficient is 1, and
    /// Error(InvalidArgument) for degree < 1.
    explicit MinimalPolynomial(std::vector<Integer> coefficients);

    /// Parses the canonical text form, e.g. "x^3-x-1" or "x - 2".
    static MinimalPolynomial parse(std::string_view text);
    /// Parses a raw coefficient list without the monic check.
    static std::vector<Integer> parse_coefficients(std::string_view text);

    int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
    const std::vector<Integer>& coefficients() const { return coefficients_; }
    poly::QPoly as_qpoly() const;
    std::string to_string() const;

    bool operator==(const MinimalPolynomial& other) const = default;

private:
    std::vector<Integer> coefficients_;
};

/// Integer polynomial irreducibility over Q for degree <= 4 (rational roots
/// plus a search for monic quadratic factors). Returns nullopt for higher
/// degree, where no check is implemented.
std::optional<bool> is_irreducible(const MinimalPolynomial& p);

/// Dyadic enclosure beta in [numerator/2^bits, (numerator+1)/2^bits].
struct DyadicEnclosure {
    Integer numerator;
    std::size_t bits = 0;

    Rational lower() const;
    Rational upper() const;
};

class PisotNumber;
using PisotPtr = std::shared_ptr<const PisotNumber>;

enum class CertifyFailure { NotMonic, Reducible, IrreducibilityUnverified, NotPisot, NoRealRootAboveOne };
const char* to_string(CertifyFailure f);

struct NotPisot {
    CertifyFailure reason;
    std::string witness;
};

struct CertifyOptions {
    /// Accept degree > 4 polynomials without an irreducibility proof.
    bool assume_irreducible = false;
};

using CertifyResult = std::variant<PisotPtr, NotPisot>;

CertifyResult certify_pisot(const MinimalPolynomial& minpoly, const CertifyOptions& options = {});
CertifyResult certify_pisot(const std::vector<Integer>& coefficients, const CertifyOptions& options = {});
/// Parses and certifies, throwing Error on failure.
PisotPtr make_pisot(std::string_view text, const CertifyOptions& options = {});
/// The integer base b >= 2 as the degree-one Pisot number x - b.
PisotPtr make_integer_base(long b);

class FieldElement;

/// A certified Pisot number. Immutable after construction; the enclosure
/// cache is internally synchronised.
class PisotNumber : public std::enable_shared_from_this<PisotNumber> {
public:
    struct Data {
        MinimalPolynomial minpoly;
        DyadicEnclosure enclosure;
        Integer floor_beta;
        int real_embeddings = 1;
        int complex_pairs = 0;
        Rational conjugate_modulus_bound;
        std::vector<std::complex<double>> conjugates;
        Integer discriminant;
        std::string irreducibility_certificate;
    };

    explicit PisotNumber(Data data);

    const MinimalPolynomial& minpoly() const { return data_.minpoly; }
    int degree() const { return data_.minpoly.degree(); }
    bool is_integer() const { return degree() == 1; }
    const Integer& floor_beta() const { return data_.floor_beta; }
    long alphabet_max() const { return data_.floor_beta.get_si(); }
    int real_embeddings() const { return data_.real_embeddings; }
    int complex_pairs() const { return data_.complex_pairs; }
    /// Rational upper bound (< 1) on the moduli of the other conjugates.
    const Rational& conjugate_modulus_bound() const { return data_.conjugate_modulus_bound; }
    /// Floating-point approximations of the conjugates other than beta.
    const std::vector<std::complex<double>>& conjugates() const { return data_.conjugates; }
    const Integer& discriminant() const { return data_.discriminant; }
    const std::string& irreducibility_certificate() const { return data_.irreducibility_certificate; }
    std::string label() const { return data_.minpoly.to_string(); }
    double approx() const { return approx_; }

    /// Enclosure with at least `bits` fractional bits (refined on demand).
    DyadicEnclosure enclosure(std::size_t bits) const;
    /// Certified real interval around beta.
    RealInterval interval(mpfr_prec_t precision) const;

    /// Reduced coefficients of x^(d+j), j = 0..d-2.
    const std::vector<std::vector<Rational>>& reduction_table() const { return reduction_; }
    bool same_field(const PisotNumber& other) const { return minpoly() == other.minpoly(); }

    FieldElement beta() const;
    FieldElement inverse() const;
    FieldElement constant(const Rational& q) const;
    FieldElement zero() const;
    FieldElement one() const;

private:
    Data data_;
    double approx_ = 0;
    std::vector<std::vector<Rational>> reduction_;
    std::vector<Rational> inverse_coeffs_;
    mutable std::mutex mutex_;
    mutable DyadicEnclosure cache_;
};

/// Exact element of Q(beta).
class FieldElement {
public:
    FieldElement(PisotPtr base, std::vector<Rational> coefficients);

    const PisotPtr& base() const { return base_; }
    const std::vector<Rational>& coefficients() const { return coeffs_; }
    bool is_zero() const;
    bool is_rational() const;
    /// Value when is_rational().
    const Rational& rational_value() const { return coeffs_[0]; }

    FieldElement operator+(const FieldElement& other) const;
    FieldElement operator-(const FieldElement& other) const;
    FieldElement operator*(const FieldElement& other) const;
    FieldElement operator/(const FieldElement& other) const;
    FieldElement operator-() const;
    FieldElement operator*(const Rational& q) const;
    FieldElement operator+(const Rational& q) const;
    FieldElement operator-(const Rational& q) const;
    FieldElement& operator+=(const FieldElement& other);
    FieldElement& operator-=(const FieldElement& other);
    FieldElement& operator*=(const FieldElement& other);
    FieldElement inverse() const;
    FieldElement pow(long exponent) const;

    /// Exact sign of the real value.
    int sign() const;
    /// Certified enclosure of the real value.
    RealInterval enclosure(mpfr_prec_t precision) const;
    double approx() const;
    /// Approximate log2 of |value| (for sizing searches; not for decisions).
    double approx_log2() const;
    /// Exact floor of the real value.
    Integer floor() const;
    /// Minimal polynomial over Q (monic).
    poly::QPoly minimal_polynomial() const;

    std::string to_string() const;

private:
    void check_same(const FieldElement& other) const;
    void reduce();

    PisotPtr base_;
    std::vector<Rational> coeffs_;
};

/// Same-field exact comparison; throws Error(MixedBases) across fields.
std::strong_ordering compare(const FieldElement& a, const FieldElement& b);
/// Exact comparison of elements of possibly different fields.
std::strong_ordering compare_cross_field(const FieldElement& a, const FieldElement& b);
/// Exact comparison against a rational.
std::strong_ordering compare(const FieldElement& a, const Rational& q);

inline bool operator<(const FieldElement& a, const FieldElement& b) { return compare_cross_field(a, b) < 0; }
inline bool operator<=(const FieldElement& a, const FieldElement& b) { return compare_cross_field(a, b) <= 0; }
inline bool operator>(const FieldElement& a, const FieldElement& b) { return compare_cross_field(a, b) > 0; }
inline bool operator>=(const FieldElement& a, const FieldElement& b) { return compare_cross_field(a, b) >= 0; }
inline bool operator==(const FieldElement& a, const FieldElement& b) { return compare_cross_field(a, b) == 0; }

/// Re-expresses a rational element of one field in another field.
FieldElement transfer_rational(const FieldElement& x, const PisotPtr& target);

}  // namespace pisotnorm
