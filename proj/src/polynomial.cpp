#include "pisotnorm/polynomial.hpp"

#include <sstream>
#include <stdexcept>

namespace pisotnorm::poly {

void trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) {
        p.pop_back();
    }
}

int degree(const QPoly& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) {
        if (p[static_cast<std::size_t>(i)] != 0) {
            return i;
        }
    }
    return -1;
}

QPoly add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

QPoly sub(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

QPoly mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) {
        return {};
    }
    QPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            r[i + j] += a[i] * b[j];
        }
    }
    trim(r);
    return r;
}

QPoly scale(const QPoly& a, const Rational& c) {
    if (c == 0) {
        return {};
    }
    QPoly r(a);
    for (auto& x : r) x *= c;
    return r;
}

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
    int db = degree(b);
    if (db < 0) {
        throw std::domain_error("polynomial division by zero");
    }
    QPoly rem(a);
    trim(rem);
    int da = degree(rem);
    if (da < db) {
        return {QPoly{}, rem};
    }
    QPoly quot(static_cast<std::size_t>(da - db + 1));
    const Rational& lead = b[static_cast<std::size_t>(db)];
    for (int k = da; k >= db; --k) {
        Rational c = rem[static_cast<std::size_t>(k)] / lead;
        quot[static_cast<std::size_t>(k - db)] = c;
        if (c == 0) continue;
        for (int j = 0; j <= db; ++j) {
            rem[static_cast<std::size_t>(k - db + j)] -= c * b[static_cast<std::size_t>(j)];
        }
    }
    trim(rem);
    trim(quot);
    return {quot, rem};
}

QPoly make_monic(const QPoly& p) {
    int d = degree(p);
    if (d < 0) {
        return {};
    }
    return scale(p, 1 / p[static_cast<std::size_t>(d)]);
}

QPoly gcd(QPoly a, QPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        QPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(a);
}

QPoly derivative(const QPoly& p) {
    if (p.size() <= 1) {
        return {};
    }
    QPoly r(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) {
        r[i - 1] = p[i] * static_cast<long>(i);
    }
    trim(r);
    return r;
}

Rational evaluate(const QPoly& p, const Rational& x) {
    Rational acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

int sign_at(const QPoly& p, const Rational& x) { return sgn(evaluate(p, x)); }

QPoly squarefree(const QPoly& p) {
    QPoly g = gcd(p, derivative(p));
    if (degree(g) <= 0) {
        return make_monic(p);
    }
    return make_monic(divmod(p, g).first);
}

std::string to_string(const QPoly& p, const std::string& var) {
    int d = degree(p);
    if (d < 0) {
        return "0";
    }
    std::ostringstream out;
    bool first = true;
    for (int i = d; i >= 0; --i) {
        const Rational& c = p[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        Rational mag = abs(c);
        if (first) {
            if (c < 0) out << "-";
        } else {
            out << (c < 0 ? "-" : "+");
        }
        first = false;
        bool unit = mag == 1;
        if (!unit || i == 0) {
            out << pisotnorm::to_string(mag);
        }
        if (i > 0) {
            if (!unit) out << "*";
            out << var;
            if (i > 1) out << "^" << i;
        }
    }
    return out.str();
}

std::vector<QPoly> sturm_sequence(const QPoly& p) {
    std::vector<QPoly> seq;
    QPoly a = p;
    trim(a);
    QPoly b = derivative(a);
    seq.push_back(a);
    while (!b.empty()) {
        seq.push_back(b);
        QPoly r = divmod(a, b).second;
        a = std::move(b);
        b = scale(r, -1);
    }
    return seq;
}

namespace {

int variations(const std::vector<int>& signs) {
    int count = 0;
    int last = 0;
    for (int s : signs) {
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

int variations_at(const std::vector<QPoly>& sturm, const Rational& x) {
    std::vector<int> signs;
    signs.reserve(sturm.size());
    for (const auto& q : sturm) signs.push_back(sign_at(q, x));
    return variations(signs);
}

int variations_at_infinity(const std::vector<QPoly>& sturm, bool positive) {
    std::vector<int> signs;
    for (const auto& q : sturm) {
        int d = degree(q);
        int s = sgn(q[static_cast<std::size_t>(d)]);
        if (!positive && d % 2 == 1) s = -s;
        signs.push_back(s);
    }
    return variations(signs);
}

}  // namespace

int count_roots(const std::vector<QPoly>& sturm, const Rational& a, const Rational& b) {
    return variations_at(sturm, a) - variations_at(sturm, b);
}

int count_roots_above(const std::vector<QPoly>& sturm, const Rational& a) {
    return variations_at(sturm, a) - variations_at_infinity(sturm, true);
}

int count_real_roots(const std::vector<QPoly>& sturm) {
    return variations_at_infinity(sturm, false) - variations_at_infinity(sturm, true);
}

std::optional<int> roots_inside_disc(const QPoly& p, const Rational& radius) {
    if (radius <= 0) {
        throw std::invalid_argument("roots_inside_disc: radius must be positive");
    }
    QPoly f(p);
    trim(f);
    Rational power = 1;
    for (auto& c : f) {
        c *= power;
        power *= radius;
    }
    // Schur-Cohn: T f = a0 f - an f*, with f* the reversed polynomial.
    // Z(f) = n - Z(Tf) when |a0| < |an|, Z(f) = Z(Tf) when |a0| > |an|.
    // Unwound iteratively as Z(original) = total + sign * Z(current).
    int total = 0;
    int sign = 1;
    while (true) {
        int n = degree(f);
        if (n < 0) {
            return std::nullopt;
        }
        if (n == 0) {
            break;
        }
        const Rational a0 = f[0];
        const Rational an = f[static_cast<std::size_t>(n)];
        Rational gamma = a0 * a0 - an * an;
        if (gamma == 0) {
            return std::nullopt;
        }
        QPoly g(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i) {
            g[static_cast<std::size_t>(i)] = a0 * f[static_cast<std::size_t>(i)] -
                                             an * f[static_cast<std::size_t>(n - i)];
        }
        trim(g);
        if (gamma < 0) {
            total += sign * n;
            sign = -sign;
        }
        f = std::move(g);
    }
    return total;
}

}  // namespace pisotnorm::poly
