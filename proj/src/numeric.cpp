#include "pisotnorm/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pisotnorm {

Integer floor(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

Integer ceil(const Rational& q) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

std::size_t ceil_log2(const Integer& n) {
    if (n <= 1) {
        return 0;
    }
    Integer m = n - 1;
    return mpz_sizeinbase(m.get_mpz_t(), 2);
}

Integer pow(const Integer& base, unsigned long exponent) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
    return r;
}

Rational pow(const Rational& base, long exponent) {
    if (exponent < 0) {
        if (base == 0) {
            throw std::domain_error("zero to a negative power");
        }
        Rational inv = 1 / base;
        return pow(inv, -exponent);
    }
    Integer num = pow(Integer(base.get_num()), static_cast<unsigned long>(exponent));
    Integer den = pow(Integer(base.get_den()), static_cast<unsigned long>(exponent));
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Integer factorial(unsigned long n) {
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) {
        return q.get_num().get_str();
    }
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_decimal(const Rational& q, int digits) {
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(digits * 4 + 32);
    BigFloat f(prec);
    mpfr_set_q(f.get(), q.get_mpq_t(), MPFR_RNDN);
    if (mpfr_zero_p(f.get())) {
        return "0";
    }
    char* buffer = nullptr;
    std::string format = "%." + std::to_string(digits) + "Rg";
    mpfr_asprintf(&buffer, format.c_str(), f.get());
    std::string out(buffer);
    mpfr_free_str(buffer);
    return out;
}

Rational parse_rational(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) {
        throw std::invalid_argument("empty rational");
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        bool negative = s[0] == '-';
        std::string digits = s.substr(negative ? 1 : 0);
        dot = digits.find('.');
        std::string whole = digits.substr(0, dot);
        std::string frac = digits.substr(dot + 1);
        if (whole.empty()) {
            whole = "0";
        }
        if (frac.find_first_not_of("0123456789") != std::string::npos ||
            whole.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("malformed decimal: " + text);
        }
        Integer num(whole + frac);
        Integer den = pow(Integer(10), frac.size());
        Rational r(num, den);
        r.canonicalize();
        return negative ? Rational(-r) : r;
    }
    Rational r;
    if (r.set_str(s, 10) != 0) {
        throw std::invalid_argument("malformed rational: " + text);
    }
    if (r.get_den() == 0) {
        throw std::invalid_argument("zero denominator: " + text);
    }
    r.canonicalize();
    return r;
}

BigFloat::BigFloat(mpfr_prec_t precision) {
    mpfr_init2(value_, precision);
    mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(const BigFloat& other) {
    mpfr_init2(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
    if (this != &other) {
        mpfr_set_prec(value_, other.precision());
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

Rational BigFloat::to_rational() const {
    if (!mpfr_number_p(value_)) {
        throw std::overflow_error("non-finite MPFR value");
    }
    Rational r;
    mpfr_get_q(r.get_mpq_t(), value_);
    return r;
}

RealInterval::RealInterval(mpfr_prec_t precision) : lo_(precision), hi_(precision) {}

RealInterval::RealInterval(const Rational& lo, const Rational& hi, mpfr_prec_t precision)
    : lo_(precision), hi_(precision) {
    if (lo > hi) {
        throw std::invalid_argument("RealInterval: lo > hi");
    }
    mpfr_set_q(lo_.get(), lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_.get(), hi.get_mpq_t(), MPFR_RNDU);
}

RealInterval RealInterval::pi(mpfr_prec_t precision) {
    RealInterval r(precision);
    mpfr_const_pi(r.lo_.get(), MPFR_RNDD);
    mpfr_const_pi(r.hi_.get(), MPFR_RNDU);
    return r;
}

double RealInterval::midpoint() const {
    return 0.5 * (mpfr_get_d(lo_.get(), MPFR_RNDN) + mpfr_get_d(hi_.get(), MPFR_RNDN));
}

double RealInterval::width() const {
    BigFloat w(precision());
    mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
    return mpfr_get_d(w.get(), MPFR_RNDU);
}

bool RealInterval::contains_zero() const { return mpfr_sgn(lo_.get()) <= 0 && mpfr_sgn(hi_.get()) >= 0; }
bool RealInterval::strictly_positive() const { return mpfr_sgn(lo_.get()) > 0; }
bool RealInterval::strictly_negative() const { return mpfr_sgn(hi_.get()) < 0; }

RealInterval RealInterval::operator+(const RealInterval& other) const {
    RealInterval r(std::max(precision(), other.precision()));
    mpfr_add(r.lo_.get(), lo_.get(), other.lo_.get(), MPFR_RNDD);
    mpfr_add(r.hi_.get(), hi_.get(), other.hi_.get(), MPFR_RNDU);
    return r;
}

RealInterval RealInterval::operator-(const RealInterval& other) const {
    RealInterval r(std::max(precision(), other.precision()));
    mpfr_sub(r.lo_.get(), lo_.get(), other.hi_.get(), MPFR_RNDD);
    mpfr_sub(r.hi_.get(), hi_.get(), other.lo_.get(), MPFR_RNDU);
    return r;
}

RealInterval RealInterval::operator-() const {
    RealInterval r(precision());
    mpfr_neg(r.lo_.get(), hi_.get(), MPFR_RNDD);
    mpfr_neg(r.hi_.get(), lo_.get(), MPFR_RNDU);
    return r;
}

RealInterval RealInterval::operator*(const RealInterval& other) const {
    mpfr_prec_t prec = std::max(precision(), other.precision());
    RealInterval r(prec);
    BigFloat candidates_lo[4] = {BigFloat(prec), BigFloat(prec), BigFloat(prec), BigFloat(prec)};
    BigFloat candidates_hi[4] = {BigFloat(prec), BigFloat(prec), BigFloat(prec), BigFloat(prec)};
    const BigFloat* as[2] = {&lo_, &hi_};
    const BigFloat* bs[2] = {&other.lo_, &other.hi_};
    int idx = 0;
    for (auto* a : as) {
        for (auto* b : bs) {
            mpfr_mul(candidates_lo[idx].get(), a->get(), b->get(), MPFR_RNDD);
            mpfr_mul(candidates_hi[idx].get(), a->get(), b->get(), MPFR_RNDU);
            ++idx;
        }
    }
    mpfr_set(r.lo_.get(), candidates_lo[0].get(), MPFR_RNDD);
    mpfr_set(r.hi_.get(), candidates_hi[0].get(), MPFR_RNDU);
    for (int i = 1; i < 4; ++i) {
        mpfr_min(r.lo_.get(), r.lo_.get(), candidates_lo[i].get(), MPFR_RNDD);
        mpfr_max(r.hi_.get(), r.hi_.get(), candidates_hi[i].get(), MPFR_RNDU);
    }
    return r;
}

RealInterval RealInterval::operator/(const RealInterval& other) const {
    if (other.contains_zero()) {
        throw std::domain_error("interval division by an interval containing zero");
    }
    mpfr_prec_t prec = std::max(precision(), other.precision());
    RealInterval inv(prec);
    mpfr_ui_div(inv.lo_.get(), 1, other.hi_.get(), MPFR_RNDD);
    mpfr_ui_div(inv.hi_.get(), 1, other.lo_.get(), MPFR_RNDU);
    return *this * inv;
}

RealInterval RealInterval::log() const {
    if (!strictly_positive()) {
        throw std::domain_error("interval log of a non-positive interval");
    }
    RealInterval r(precision());
    mpfr_log(r.lo_.get(), lo_.get(), MPFR_RNDD);
    mpfr_log(r.hi_.get(), hi_.get(), MPFR_RNDU);
    return r;
}

RealInterval RealInterval::exp() const {
    RealInterval r(precision());
    mpfr_exp(r.lo_.get(), lo_.get(), MPFR_RNDD);
    mpfr_exp(r.hi_.get(), hi_.get(), MPFR_RNDU);
    return r;
}

RealInterval RealInterval::sqrt() const {
    if (mpfr_sgn(lo_.get()) < 0) {
        throw std::domain_error("interval sqrt of a negative interval");
    }
    RealInterval r(precision());
    mpfr_sqrt(r.lo_.get(), lo_.get(), MPFR_RNDD);
    mpfr_sqrt(r.hi_.get(), hi_.get(), MPFR_RNDU);
    return r;
}

RealInterval RealInterval::min(const RealInterval& other) const {
    RealInterval r(std::max(precision(), other.precision()));
    mpfr_min(r.lo_.get(), lo_.get(), other.lo_.get(), MPFR_RNDD);
    mpfr_min(r.hi_.get(), hi_.get(), other.hi_.get(), MPFR_RNDU);
    return r;
}

int separate(const RealInterval& a, const RealInterval& b) {
    if (mpfr_less_p(a.hi().get(), b.lo().get())) {
        return -1;
    }
    if (mpfr_greater_p(a.lo().get(), b.hi().get())) {
        return 1;
    }
    return 0;
}

}  // namespace pisotnorm
