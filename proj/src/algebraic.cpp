#include "pisotnorm/algebraic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace pisotnorm {

// ---------------------------------------------------------------------------
// MinimalPolynomial

MinimalPolynomial::MinimalPolynomial(std::vector<Integer> coefficients) : coefficients_(std::move(coefficients)) {
    while (!coefficients_.empty() && coefficients_.back() == 0) {
        coefficients_.pop_back();
    }
    if (coefficients_.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "minimal polynomial must have degree >= 1");
    }
    if (coefficients_.back() != 1) {
        throw Error(ErrorCode::NotMonic, "leading coefficient is " + coefficients_.back().get_str());
    }
}

std::vector<Integer> MinimalPolynomial::parse_coefficients(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty polynomial");
    }
    std::vector<Integer> coeffs;
    if (s.front() == '[') {
        // JSON-style list, constant term first.
        if (s.back() != ']') {
            throw Error(ErrorCode::InvalidArgument, "unterminated coefficient list");
        }
        std::stringstream in(s.substr(1, s.size() - 2));
        std::string item;
        while (std::getline(in, item, ',')) {
            try {
                coeffs.emplace_back(item);
            } catch (const std::invalid_argument&) {
                throw Error(ErrorCode::InvalidArgument, "bad coefficient '" + item + "'");
            }
        }
        return coeffs;
    }
    auto add_term = [&](std::size_t power, const Integer& c) {
        if (coeffs.size() <= power) coeffs.resize(power + 1);
        coeffs[power] += c;
    };
    std::size_t i = 0;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        }
        std::size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        Integer c = start == i ? Integer(1) : Integer(s.substr(start, i - start));
        bool has_number = start != i;
        std::size_t power = 0;
        if (i < s.size() && s[i] == '*') {
            if (!has_number) throw Error(ErrorCode::InvalidArgument, "misplaced '*' in " + s);
            ++i;
        }
        if (i < s.size() && (s[i] == 'x' || s[i] == 'b' || s[i] == 'X')) {
            ++i;
            power = 1;
            if (i < s.size() && (s[i] == '^' || (s[i] == '*' && i + 1 < s.size() && s[i + 1] == '*'))) {
                i += s[i] == '^' ? 1 : 2;
                std::size_t p0 = i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                if (p0 == i) throw Error(ErrorCode::InvalidArgument, "missing exponent in " + s);
                power = std::stoul(s.substr(p0, i - p0));
            }
        } else if (!has_number) {
            throw Error(ErrorCode::InvalidArgument, "cannot parse polynomial '" + std::string(text) + "'");
        }
        add_term(power, sign * c);
        if (i < s.size() && s[i] != '+' && s[i] != '-') {
            throw Error(ErrorCode::InvalidArgument, "unexpected '" + std::string(1, s[i]) + "' in " + s);
        }
    }
    return coeffs;
}

MinimalPolynomial MinimalPolynomial::parse(std::string_view text) {
    return MinimalPolynomial(parse_coefficients(text));
}

poly::QPoly MinimalPolynomial::as_qpoly() const {
    poly::QPoly p;
    p.reserve(coefficients_.size());
    for (const auto& c : coefficients_) p.emplace_back(c);
    return p;
}

std::string MinimalPolynomial::to_string() const { return poly::to_string(as_qpoly(), "x"); }

namespace {

std::vector<Integer> divisors(Integer n) {
    n = abs(n);
    std::vector<Integer> out;
    for (Integer k = 1; k * k <= n; ++k) {
        if (n % k == 0) {
            out.push_back(k);
            if (k * k != n) out.push_back(n / k);
        }
    }
    return out;
}

Integer eval_int(const std::vector<Integer>& c, const Integer& x) {
    Integer acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// Integer root of a monic polynomial, if any.
std::optional<Integer> integer_root(const std::vector<Integer>& c) {
    if (c[0] == 0) return Integer(0);
    for (const auto& k : divisors(c[0])) {
        if (eval_int(c, k) == 0) return k;
        if (eval_int(c, -k) == 0) return Integer(-k);
    }
    return std::nullopt;
}

// Monic quadratic factor x^2 + a x + b of a monic quartic, if any.
std::optional<std::pair<Integer, Integer>> quadratic_factor(const std::vector<Integer>& c) {
    // (x^2 + a x + b)(x^2 + e x + g): b g = c0, a + e = c3.
    for (const auto& bd : divisors(c[0])) {
        for (int sb : {1, -1}) {
            Integer b = sb * bd;
            Integer g = c[0] / b;
            // Coefficient equations: c1 = a g + b e, c2 = b + g + a e, e = c3 - a.
            // c1 = a g + b (c3 - a) = a (g - b) + b c3.
            std::vector<Integer> as;
            if (g != b) {
                Integer num = c[1] - b * c[3];
                Integer den = g - b;
                if (num % den == 0) as.push_back(num / den);
            } else {
                if (c[1] != b * c[3]) continue;
                // a e = c2 - 2b with a + e = c3: integer solutions of a^2 - c3 a + (c2 - 2b) = 0.
                Integer disc = c[3] * c[3] - 4 * (c[2] - 2 * b);
                if (disc < 0) continue;
                Integer r = sqrt(disc);
                if (r * r != disc) continue;
                if ((c[3] + r) % 2 == 0) as.push_back((c[3] + r) / 2);
                if ((c[3] - r) % 2 == 0) as.push_back((c[3] - r) / 2);
            }
            for (const auto& a : as) {
                Integer e = c[3] - a;
                if (b + g + a * e == c[2] && a * g + b * e == c[1]) return std::make_pair(a, b);
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<bool> is_irreducible(const MinimalPolynomial& p) {
    const auto& c = p.coefficients();
    int d = p.degree();
    if (d == 1) return true;
    if (d > 4) return std::nullopt;
    if (integer_root(c)) return false;
    if (d == 4 && quadratic_factor(c)) return false;
    return true;
}

Rational DyadicEnclosure::lower() const {
    Rational r(numerator, pow(Integer(2), bits));
    r.canonicalize();
    return r;
}

Rational DyadicEnclosure::upper() const {
    Rational r(numerator + 1, pow(Integer(2), bits));
    r.canonicalize();
    return r;
}

const char* to_string(CertifyFailure f) {
    switch (f) {
        case CertifyFailure::NotMonic: return "NotMonic";
        case CertifyFailure::Reducible: return "Reducible";
        case CertifyFailure::IrreducibilityUnverified: return "IrreducibilityUnverified";
        case CertifyFailure::NotPisot: return "NotPisot";
        case CertifyFailure::NoRealRootAboveOne: return "NoRealRootAboveOne";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// Certification

namespace {

// sign of f(M / 2^K) for an integer polynomial f.
int sign_at_dyadic(const std::vector<Integer>& f, const Integer& m, std::size_t k) {
    int d = static_cast<int>(f.size()) - 1;
    Integer acc = f.back();
    for (int i = d - 1; i >= 0; --i) {
        Integer scale;
        mpz_mul_2exp(scale.get_mpz_t(), f[static_cast<std::size_t>(i)].get_mpz_t(), k * static_cast<std::size_t>(d - i));
        acc = acc * m + scale;
    }
    return sgn(acc);
}

Rational determinant(std::vector<std::vector<Rational>> a) {
    std::size_t n = a.size();
    Rational det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) return 0;
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t row = col + 1; row < n; ++row) {
            if (a[row][col] == 0) continue;
            Rational factor = a[row][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[row][j] -= factor * a[col][j];
        }
    }
    return det;
}

// Discriminant of a monic polynomial: (-1)^(d(d-1)/2) Res(f, f').
Integer discriminant(const std::vector<Integer>& f) {
    int d = static_cast<int>(f.size()) - 1;
    if (d == 1) return 1;
    std::vector<Integer> df(f.size() - 1);
    for (int i = 1; i <= d; ++i) df[static_cast<std::size_t>(i - 1)] = f[static_cast<std::size_t>(i)] * i;
    int n = 2 * d - 1;
    std::vector<std::vector<Rational>> s(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
    // Rows of the Sylvester matrix, highest power first.
    for (int r = 0; r < d - 1; ++r) {
        for (int i = 0; i <= d; ++i) s[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + i)] = f[static_cast<std::size_t>(d - i)];
    }
    for (int r = 0; r < d; ++r) {
        for (int i = 0; i <= d - 1; ++i) {
            s[static_cast<std::size_t>(d - 1 + r)][static_cast<std::size_t>(r + i)] = df[static_cast<std::size_t>(d - 1 - i)];
        }
    }
    Rational res = determinant(std::move(s));
    if ((d * (d - 1) / 2) % 2 == 1) res = -res;
    return res.get_num();
}

std::vector<std::complex<double>> numeric_roots(const std::vector<Integer>& f) {
    int d = static_cast<int>(f.size()) - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) companion(i, d - 1) = -f[static_cast<std::size_t>(i)].get_d();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<std::complex<double>> roots;
    for (int i = 0; i < d; ++i) roots.push_back(solver.eigenvalues()[i]);
    return roots;
}

Rational from_double(double x) {
    Rational r(x);
    return r;
}

// Smallest-found rational rho < 1 with all non-dominant roots in |z| < rho,
// certified by a Schur-Cohn count on f(rho z).
std::optional<Rational> conjugate_bound(const poly::QPoly& f, int d, double numeric_max) {
    double gap = 1e-9;
    while (true) {
        double candidate = numeric_max + gap + numeric_max * gap;
        if (candidate >= 1.0) break;
        Rational rho = from_double(candidate);
        auto inside = poly::roots_inside_disc(f, rho);
        if (inside && *inside == d - 1) return rho;
        gap *= 16;
    }
    if (numeric_max >= 1.0) {
        return std::nullopt;
    }
    Rational lo = from_double(numeric_max);
    for (int k = 1; k < 200; ++k) {
        Rational rho = 1 - (1 - lo) / pow(Integer(2), static_cast<unsigned long>(k));
        auto inside = poly::roots_inside_disc(f, rho);
        if (inside && *inside == d - 1) return rho;
    }
    return std::nullopt;
}

std::string describe(std::complex<double> z) {
    std::ostringstream out;
    out.precision(10);
    out << z.real();
    if (z.imag() != 0.0) out << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    out << " (modulus " << std::abs(z) << ")";
    return out.str();
}

}  // namespace

CertifyResult certify_pisot(const std::vector<Integer>& coefficients, const CertifyOptions& options) {
    std::optional<MinimalPolynomial> m;
    try {
        m.emplace(coefficients);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotMonic) return NotPisot{CertifyFailure::NotMonic, e.what()};
        throw;
    }
    return certify_pisot(*m, options);
}

CertifyResult certify_pisot(const MinimalPolynomial& minpoly, const CertifyOptions& options) {
    const auto& c = minpoly.coefficients();
    int d = minpoly.degree();
    PisotNumber::Data data{minpoly, {}, 0, 1, 0, 0, {}, 1, ""};

    if (d == 1) {
        Integer b = -c[0];
        if (b < 2) {
            return NotPisot{CertifyFailure::NoRealRootAboveOne, "root " + b.get_str() + " is not above 1"};
        }
        data.enclosure = {b, 0};
        data.floor_beta = b;
        data.irreducibility_certificate = "degree 1";
        return std::make_shared<const PisotNumber>(std::move(data));
    }

    auto irreducible = is_irreducible(minpoly);
    if (!irreducible) {
        if (!options.assume_irreducible) {
            return NotPisot{CertifyFailure::IrreducibilityUnverified,
                            "degree " + std::to_string(d) + " requires an explicit irreducibility assumption"};
        }
        data.irreducibility_certificate = "assumed (degree " + std::to_string(d) + ")";
    } else if (!*irreducible) {
        std::string witness;
        if (auto root = integer_root(c)) {
            witness = "rational root " + root->get_str();
        } else if (auto q = quadratic_factor(c)) {
            witness = "factor " + poly::to_string({Rational(q->second), Rational(q->first), Rational(1)}, "x");
        }
        return NotPisot{CertifyFailure::Reducible, witness};
    } else {
        data.irreducibility_certificate = d == 4 ? "no rational root, no quadratic factor" : "no rational root";
    }

    poly::QPoly f = minpoly.as_qpoly();
    auto sturm = poly::sturm_sequence(f);
    if (poly::count_roots_above(sturm, Rational(1)) == 0) {
        return NotPisot{CertifyFailure::NoRealRootAboveOne, "no real root in (1, inf)"};
    }

    auto roots = numeric_roots(c);
    auto dominant = std::max_element(roots.begin(), roots.end(), [](auto a, auto b) {
        double ka = std::abs(a.imag()) < 1e-9 ? a.real() : -1e300;
        double kb = std::abs(b.imag()) < 1e-9 ? b.real() : -1e300;
        return ka < kb;
    });
    std::vector<std::complex<double>> conjugates;
    for (auto it = roots.begin(); it != roots.end(); ++it) {
        if (it != dominant) conjugates.push_back(*it);
    }

    // Roots of a self-reciprocal polynomial pair up as z, 1/z; beyond degree 2
    // some pair other than {beta, 1/beta} cannot lie strictly inside the disc.
    // Conversely an irreducible polynomial with a root on |z| = 1 is self-reciprocal.
    bool reciprocal = true;
    bool antireciprocal = true;
    for (int i = 0; i <= d; ++i) {
        if (c[static_cast<std::size_t>(i)] != c[static_cast<std::size_t>(d - i)]) reciprocal = false;
        if (c[static_cast<std::size_t>(i)] != -c[static_cast<std::size_t>(d - i)]) antireciprocal = false;
    }
    auto worst = std::max_element(conjugates.begin(), conjugates.end(),
                                  [](auto a, auto b) { return std::abs(a) < std::abs(b); });
    if ((reciprocal || antireciprocal) && d > 2) {
        return NotPisot{CertifyFailure::NotPisot, "self-reciprocal, conjugate " + describe(*worst)};
    }
    double numeric_max = 0;
    for (auto z : conjugates) numeric_max = std::max(numeric_max, std::abs(z));
    auto bound = conjugate_bound(f, d, numeric_max);
    if (!bound) {
        // No root lies on |z| = 1, so the count at a radius between 1 and the
        // next modulus equals the count inside the unit disc.
        double next = std::abs(roots.front());
        for (auto z : roots) {
            if (std::abs(z) > 1.0) next = std::min(next, std::abs(z));
        }
        std::optional<int> inside;
        for (int k = 1; k < 60 && !inside; ++k) {
            double radius = 1.0 + (next - 1.0) * (0.5 + 1.0 / (k + 3));
            inside = poly::roots_inside_disc(f, from_double(radius));
        }
        if (inside && *inside < d - 1) {
            return NotPisot{CertifyFailure::NotPisot, "conjugate " + describe(*worst)};
        }
        throw Error(ErrorCode::NotPisot, "could not certify conjugate moduli for " + minpoly.to_string());
    }

    // f < 0 on (1, beta), f > 0 beyond.
    Integer n = 1;
    while (sign_at_dyadic(c, n + 1, 0) < 0) ++n;
    data.floor_beta = n;
    data.enclosure = {n, 0};

    int r = poly::count_real_roots(sturm);
    data.real_embeddings = r;
    data.complex_pairs = (d - r) / 2;
    data.conjugate_modulus_bound = *bound;
    data.conjugates = std::move(conjugates);
    data.discriminant = discriminant(c);
    auto number = std::make_shared<const PisotNumber>(std::move(data));
    number->enclosure(64);
    return number;
}

PisotPtr make_pisot(std::string_view text, const CertifyOptions& options) {
    auto result = certify_pisot(MinimalPolynomial::parse_coefficients(text), options);
    if (auto* failure = std::get_if<NotPisot>(&result)) {
        ErrorCode code = ErrorCode::NotPisot;
        if (failure->reason == CertifyFailure::NotMonic) code = ErrorCode::NotMonic;
        if (failure->reason == CertifyFailure::Reducible || failure->reason == CertifyFailure::IrreducibilityUnverified) {
            code = ErrorCode::Reducible;
        }
        if (failure->reason == CertifyFailure::NoRealRootAboveOne) code = ErrorCode::NoRealRootAboveOne;
        throw Error(code, std::string(text) + ": " + failure->witness);
    }
    return std::get<PisotPtr>(result);
}

PisotPtr make_integer_base(long b) {
    return make_pisot("x-" + std::to_string(b));
}

// ---------------------------------------------------------------------------
// PisotNumber

PisotNumber::PisotNumber(Data data) : data_(std::move(data)), cache_(data_.enclosure) {
    const auto& c = data_.minpoly.coefficients();
    auto d = static_cast<std::size_t>(degree());
    if (d >= 2) {
        std::vector<Rational> row(d);
        for (std::size_t i = 0; i < d; ++i) row[i] = -c[i];
        reduction_.push_back(row);
        for (std::size_t j = 1; j + 1 < d; ++j) {
            const auto& prev = reduction_.back();
            std::vector<Rational> next(d);
            Rational top = prev[d - 1];
            for (std::size_t i = 0; i < d; ++i) {
                next[i] = (i > 0 ? prev[i - 1] : Rational(0)) + top * reduction_[0][i];
            }
            reduction_.push_back(std::move(next));
        }
        // beta^{-1} = -(beta^{d-1} + c_{d-1} beta^{d-2} + ... + c_1) / c_0
        inverse_coeffs_.assign(d, 0);
        for (std::size_t i = 1; i <= d; ++i) inverse_coeffs_[i - 1] = Rational(-c[i]) / Rational(c[0]);
    } else {
        inverse_coeffs_ = {Rational(1) / Rational(-c[0])};
    }
    mpfr_prec_t prec = 64;
    approx_ = interval(prec).midpoint();
}

DyadicEnclosure PisotNumber::enclosure(std::size_t bits) const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (cache_.bits >= bits) {
        return cache_;
    }
    const auto& c = data_.minpoly.coefficients();
    if (is_integer()) {
        mpz_mul_2exp(cache_.numerator.get_mpz_t(), data_.floor_beta.get_mpz_t(), bits);
        cache_.bits = bits;
        return cache_;
    }
    while (cache_.bits < bits) {
        Integer mid = 2 * cache_.numerator + 1;
        ++cache_.bits;
        if (sign_at_dyadic(c, mid, cache_.bits) < 0) {
            cache_.numerator = mid;
        } else {
            cache_.numerator = mid - 1;
        }
    }
    return cache_;
}

RealInterval PisotNumber::interval(mpfr_prec_t precision) const {
    if (is_integer()) {
        return RealInterval::point(Rational(data_.floor_beta), precision);
    }
    auto e = enclosure(static_cast<std::size_t>(precision) + 8);
    return {e.lower(), e.upper(), precision};
}

FieldElement PisotNumber::beta() const {
    std::vector<Rational> c(static_cast<std::size_t>(degree()));
    if (degree() == 1) {
        c[0] = data_.floor_beta;
    } else {
        c[1] = 1;
    }
    return {shared_from_this(), std::move(c)};
}

FieldElement PisotNumber::inverse() const { return {shared_from_this(), inverse_coeffs_}; }

FieldElement PisotNumber::constant(const Rational& q) const {
    std::vector<Rational> c(static_cast<std::size_t>(degree()));
    c[0] = q;
    return {shared_from_this(), std::move(c)};
}

FieldElement PisotNumber::zero() const { return constant(0); }
FieldElement PisotNumber::one() const { return constant(1); }

// ---------------------------------------------------------------------------
// FieldElement

FieldElement::FieldElement(PisotPtr base, std::vector<Rational> coefficients)
    : base_(std::move(base)), coeffs_(std::move(coefficients)) {
    reduce();
}

void FieldElement::reduce() {
    auto d = static_cast<std::size_t>(base_->degree());
    if (coeffs_.size() > d) {
        if (d == 1) {
            Rational x = base_->floor_beta();
            Rational acc = 0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
            coeffs_.assign(1, acc);
        } else {
            const auto& table = base_->reduction_table();
            // Fold from the top so that high powers beyond 2d-2 are handled too.
            for (std::size_t k = coeffs_.size() - 1; k >= d; --k) {
                Rational top = coeffs_[k];
                coeffs_[k] = 0;
                if (top == 0) continue;
                for (std::size_t i = 0; i < d; ++i) coeffs_[k - d + i] += top * table[0][i];
            }
            coeffs_.resize(d);
        }
    }
    coeffs_.resize(d);
}

bool FieldElement::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c == 0; });
}

bool FieldElement::is_rational() const {
    return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const Rational& c) { return c == 0; });
}

void FieldElement::check_same(const FieldElement& other) const {
    if (base_ != other.base_ && !base_->same_field(*other.base_)) {
        throw Error(ErrorCode::MixedBases, base_->label() + " vs " + other.base_->label());
    }
}

FieldElement FieldElement::operator+(const FieldElement& other) const {
    check_same(other);
    FieldElement r(*this);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] += other.coeffs_[i];
    return r;
}

FieldElement FieldElement::operator-(const FieldElement& other) const {
    check_same(other);
    FieldElement r(*this);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] -= other.coeffs_[i];
    return r;
}

FieldElement FieldElement::operator-() const {
    FieldElement r(*this);
    for (auto& c : r.coeffs_) c = -c;
    return r;
}

FieldElement FieldElement::operator*(const Rational& q) const {
    FieldElement r(*this);
    for (auto& c : r.coeffs_) c *= q;
    return r;
}

FieldElement FieldElement::operator+(const Rational& q) const {
    FieldElement r(*this);
    r.coeffs_[0] += q;
    return r;
}

FieldElement FieldElement::operator-(const Rational& q) const {
    FieldElement r(*this);
    r.coeffs_[0] -= q;
    return r;
}

FieldElement FieldElement::operator*(const FieldElement& other) const {
    check_same(other);
    std::size_t d = coeffs_.size();
    if (is_rational()) return other * coeffs_[0];
    if (other.is_rational()) return *this * other.coeffs_[0];
    std::vector<Rational> prod(2 * d - 1);
    for (std::size_t i = 0; i < d; ++i) {
        if (coeffs_[i] == 0) continue;
        for (std::size_t j = 0; j < d; ++j) {
            if (other.coeffs_[j] == 0) continue;
            prod[i + j] += coeffs_[i] * other.coeffs_[j];
        }
    }
    const auto& table = base_->reduction_table();
    for (std::size_t k = d; k < prod.size(); ++k) {
        if (prod[k] == 0) continue;
        const auto& row = table[k - d];
        for (std::size_t i = 0; i < d; ++i) prod[i] += prod[k] * row[i];
    }
    prod.resize(d);
    FieldElement r(base_, {});
    r.coeffs_ = std::move(prod);
    return r;
}

FieldElement& FieldElement::operator+=(const FieldElement& other) { return *this = *this + other; }
FieldElement& FieldElement::operator-=(const FieldElement& other) { return *this = *this - other; }
FieldElement& FieldElement::operator*=(const FieldElement& other) { return *this = *this * other; }

FieldElement FieldElement::inverse() const {
    if (is_zero()) {
        throw Error(ErrorCode::DivisionByZero, "inverse of zero");
    }
    if (is_rational()) {
        return base_->constant(1 / coeffs_[0]);
    }
    poly::QPoly r0 = base_->minpoly().as_qpoly();
    poly::QPoly r1 = coeffs_;
    poly::trim(r1);
    poly::QPoly s0;
    poly::QPoly s1{Rational(1)};
    while (poly::degree(r1) > 0) {
        auto [q, rem] = poly::divmod(r0, r1);
        poly::QPoly s2 = poly::sub(s0, poly::mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    // r1 is a non-zero constant because the minimal polynomial is irreducible.
    return FieldElement(base_, poly::scale(s1, 1 / r1[0]));
}

FieldElement FieldElement::operator/(const FieldElement& other) const {
    check_same(other);
    if (other.is_zero()) {
        throw Error(ErrorCode::DivisionByZero, "division by zero");
    }
    return *this * other.inverse();
}

FieldElement FieldElement::pow(long exponent) const {
    if (exponent < 0) {
        return inverse().pow(-exponent);
    }
    FieldElement result = base_->one();
    FieldElement square = *this;
    auto e = static_cast<unsigned long>(exponent);
    while (e > 0) {
        if (e & 1UL) result *= square;
        e >>= 1;
        if (e > 0) square *= square;
    }
    return result;
}

std::string FieldElement::to_string() const { return poly::to_string(coeffs_, "b"); }

namespace {

struct ScaledValue {
    // value * D * 2^{K(d-1)} lies in [lo, hi], beta in [m/2^K, (m+1)/2^K].
    Integer lo;
    Integer hi;
    Integer denominator;
    std::size_t bits;
    std::size_t shift;
};

ScaledValue scaled_enclosure(const FieldElement& x, std::size_t bits) {
    const auto& c = x.coefficients();
    std::size_t d = c.size();
    Integer den = 1;
    for (const auto& q : c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
    std::vector<Integer> pos(d);
    std::vector<Integer> neg(d);
    for (std::size_t i = 0; i < d; ++i) {
        Integer v = c[i].get_num() * (den / c[i].get_den());
        if (v > 0) pos[i] = v;
        else neg[i] = -v;
    }
    auto enc = x.base()->enclosure(bits);
    bits = enc.bits;
    const Integer& m = enc.numerator;
    Integer m1 = m + 1;
    // Horner for sum a_i x^i 2^{K(d-1-i)} at x in {m, m+1}.
    auto horner = [&](const std::vector<Integer>& a, const Integer& at) {
        Integer acc = a[d - 1];
        for (std::size_t i = d - 1; i-- > 0;) {
            Integer scaled;
            mpz_mul_2exp(scaled.get_mpz_t(), a[i].get_mpz_t(), bits * (d - 1 - i));
            acc = acc * at + scaled;
        }
        return acc;
    };
    ScaledValue out;
    out.lo = horner(pos, m) - horner(neg, m1);
    out.hi = horner(pos, m1) - horner(neg, m);
    out.denominator = den;
    out.bits = bits;
    out.shift = bits * (d - 1);
    return out;
}

Rational unscale(const Integer& v, const ScaledValue& s) {
    Integer den;
    mpz_mul_2exp(den.get_mpz_t(), s.denominator.get_mpz_t(), s.shift);
    Rational r(v, den);
    r.canonicalize();
    return r;
}

}  // namespace

int FieldElement::sign() const {
    if (is_rational()) {
        return sgn(coeffs_[0]);
    }
    double b = base_->approx();
    double value = 0;
    double magnitude = 0;
    double power = 1;
    bool finite = true;
    for (const auto& c : coeffs_) {
        double ci = c.get_d();
        if (!std::isfinite(ci)) finite = false;
        value += ci * power;
        magnitude += std::abs(ci) * power;
        power *= b;
    }
    if (finite && std::isfinite(magnitude) && std::abs(value) > magnitude * 1e-10 &&
        std::abs(value) > std::numeric_limits<double>::min() * 1e20) {
        return value > 0 ? 1 : -1;
    }
    for (std::size_t bits = 64;; bits *= 2) {
        auto s = scaled_enclosure(*this, bits);
        if (s.lo > 0) return 1;
        if (s.hi < 0) return -1;
    }
}

RealInterval FieldElement::enclosure(mpfr_prec_t precision) const {
    if (is_rational()) {
        return RealInterval::point(coeffs_[0], precision);
    }
    auto s = scaled_enclosure(*this, static_cast<std::size_t>(precision) + 32);
    return {unscale(s.lo, s), unscale(s.hi, s), precision};
}

double FieldElement::approx() const {
    if (is_rational()) {
        return coeffs_[0].get_d();
    }
    return enclosure(64).midpoint();
}

double FieldElement::approx_log2() const {
    int s = sign();
    if (s == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    for (mpfr_prec_t prec = 64;; prec *= 2) {
        RealInterval e = s > 0 ? enclosure(prec) : -enclosure(prec);
        if (e.strictly_positive()) {
            BigFloat l(prec);
            mpfr_log2(l.get(), e.lo().get(), MPFR_RNDN);
            return l.to_double();
        }
    }
}

Integer FieldElement::floor() const {
    if (is_rational()) {
        return pisotnorm::floor(coeffs_[0]);
    }
    // Irrational, so never an integer: refinement separates it from every integer.
    for (mpfr_prec_t prec = 64;; prec *= 2) {
        auto s = scaled_enclosure(*this, static_cast<std::size_t>(prec));
        Integer lo = pisotnorm::floor(unscale(s.lo, s));
        Integer hi = pisotnorm::floor(unscale(s.hi, s));
        if (lo == hi) return lo;
    }
}

poly::QPoly FieldElement::minimal_polynomial() const {
    std::size_t d = coeffs_.size();
    // Incremental echelon form of 1, a, a^2, ... tracking combinations.
    std::vector<std::vector<Rational>> rows;
    std::vector<std::vector<Rational>> combos;
    std::vector<std::size_t> pivots;
    FieldElement power = base_->one();
    for (std::size_t j = 0; j <= d; ++j) {
        std::vector<Rational> v = power.coeffs_;
        std::vector<Rational> combo(d + 1);
        combo[j] = 1;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            Rational f = v[pivots[r]];
            if (f == 0) continue;
            for (std::size_t i = 0; i < d; ++i) v[i] -= f * rows[r][i];
            for (std::size_t i = 0; i <= d; ++i) combo[i] -= f * combos[r][i];
        }
        auto pivot = std::find_if(v.begin(), v.end(), [](const Rational& q) { return q != 0; });
        if (pivot == v.end()) {
            poly::trim(combo);
            return poly::make_monic(combo);
        }
        Rational inv = 1 / *pivot;
        for (auto& q : v) q *= inv;
        for (auto& q : combo) q *= inv;
        pivots.push_back(static_cast<std::size_t>(pivot - v.begin()));
        rows.push_back(std::move(v));
        combos.push_back(std::move(combo));
        power *= *this;
    }
    throw Error(ErrorCode::InvalidArgument, "no linear dependency among powers");
}

std::strong_ordering compare(const FieldElement& a, const FieldElement& b) {
    int s = (a - b).sign();
    return s < 0 ? std::strong_ordering::less : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::strong_ordering compare(const FieldElement& a, const Rational& q) {
    int s = (a - q).sign();
    return s < 0 ? std::strong_ordering::less : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::strong_ordering compare_cross_field(const FieldElement& a, const FieldElement& b) {
    if (a.base() == b.base() || a.base()->same_field(*b.base())) {
        return compare(a, FieldElement(a.base(), b.coefficients()));
    }
    if (b.is_rational()) {
        return compare(a, b.rational_value());
    }
    if (a.is_rational()) {
        return 0 <=> compare(b, a.rational_value());
    }
    std::optional<std::vector<poly::QPoly>> common_sturm;
    bool checked = false;
    for (mpfr_prec_t prec = 64;; prec *= 2) {
        auto ea = a.enclosure(prec);
        auto eb = b.enclosure(prec);
        int s = separate(ea, eb);
        if (s != 0) {
            return s < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        if (prec < 256) continue;
        if (!checked) {
            checked = true;
            poly::QPoly g = poly::gcd(a.minimal_polynomial(), b.minimal_polynomial());
            if (poly::degree(g) >= 1) common_sturm = poly::sturm_sequence(g);
        }
        if (common_sturm) {
            // Both values are roots of g inside the hull; one root means equal.
            Rational lo = std::min(ea.lower(), eb.lower());
            Rational hi = std::max(ea.upper(), eb.upper());
            if (poly::count_roots(*common_sturm, lo, hi) == 1) {
                return std::strong_ordering::equal;
            }
        }
    }
}

FieldElement transfer_rational(const FieldElement& x, const PisotPtr& target) {
    if (!x.is_rational()) {
        throw Error(ErrorCode::MixedBases, "cannot transfer an irrational element between fields");
    }
    return target->constant(x.rational_value());
}

}  // namespace pisotnorm
