#pragma once

// Straight-line reference versions of the first generator steps. They use
// plain GMP rationals and long-double logarithms and share no code with the
// library, so agreement is a real cross-check.

#include <gmpxx.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace naive {

inline mpz_class pow2(unsigned long e) {
    mpz_class r = 1;
    r <<= e;
    return r;
}

inline mpz_class fact(long n) {
    mpz_class r = 1;
    for (long j = 2; j <= n; ++j) r *= j;
    return r;
}

inline long ceil_log2(long x) {
    long e = 0;
    while ((1L << e) < x) ++e;
    return e;
}

// ---------------------------------------------------------------------------
// integer-base construction with f(i) = i^2, while only base 2 is active

struct Bhs {
    long i = 1;
    long t = 2;
    mpq_class eps{1, 2};
    mpz_class num = 0;  // I = [num/2^order, (num+1)/2^order)
    unsigned long order = 0;
    std::string digits;  // x_{i,2}

    static mpz_class k_of(const mpq_class& eps, const mpq_class& delta, long t) {
        long double e = eps.get_d();
        long double a = std::ceil(6.0L / e);
        long double q = delta.get_d() / (2.0L * static_cast<long double>(t));
        long double b = std::ceil(-std::log(q) * 6.0L / (e * e));
        return mpz_class(static_cast<long>(std::max(a, b)) + 1);
    }

    // One step; returns the canonical line describing it.
    std::string step() {
        // t only grows at powers of two, and only if f(m) beats h, which is
        // at least 2^(ceil(log2(t+1)) k). With f(i) = i^2 costing 4 units per
        // value, m = floor(i/4).
        long next = i + 1;
        if ((next & (next - 1)) == 0) {
            long m = i / 4;
            mpq_class d{1, 8 * t * pow2(static_cast<unsigned long>(2 * t + 1)) * fact(t) * fact(t + 1)};
            mpz_class kk = k_of(mpq_class(1, t + 1), d, t + 1);
            mpz_class hstar = pow2(static_cast<unsigned long>(ceil_log2(t + 1)) * kk.get_ui());
            if (m > 0 && mpz_class(m) * m > hstar) throw std::runtime_error("naive reference: t would grow");
        }
        mpq_class delta{1, 8 * t * pow2(static_cast<unsigned long>(2 * t)) * fact(t) * fact(t)};
        mpz_class k = k_of(eps, delta, t);
        unsigned long s = static_cast<unsigned long>(ceil_log2(t)) * k.get_ui();
        // I is dyadic, so the coarsest dyadic interval inside it is I itself.
        mpz_class l_num = num;
        unsigned long l_order = order;
        std::string chosen;
        mpz_class index = 0;
        for (mpz_class r = 0; r < pow2(s); ++r) {
            mpz_class jn = l_num * pow2(s) + r;
            unsigned long jo = l_order + s;
            std::string w = jo ? jn.get_str(2) : "";
            w = std::string(jo - w.size(), '0') + w;
            std::string u = w.substr(digits.size());
            long zeros = 0;
            for (char c : u) zeros += c == '0';
            mpq_class f0(zeros, static_cast<long>(u.size()));
            f0.canonicalize();
            mpq_class d0 = f0 - mpq_class(1, 2);
            if (d0 < 0) d0 = -d0;
            if (!u.empty() && d0 <= eps) {
                chosen = w;
                index = r;
                num = jn;
                order = jo;
                break;
            }
        }
        std::ostringstream out;
        out << "step=" << next << " t=" << t << " eps=" << eps.get_str() << " k=" << k.get_str()
            << " delta=" << delta.get_str() << " L=" << l_num.get_str() << "/2^" << l_order << " s=" << s
            << " index=" << index.get_str() << " J=" << num.get_str() << "/2^" << order
            << " u=" << chosen.substr(digits.size());
        digits = chosen;
        i = next;
        return out.str();
    }
};

// ---------------------------------------------------------------------------
// Pisot construction with the single base 2 (M = 0), steps 2 and 3

// Lower end of the normality exponent for base 2, M = 0.
inline long double eta2(long double eps, long k) {
    long double beta_k = std::pow(2.0L, static_cast<long double>(k));
    long double m = std::min(eps * beta_k / 16.0L, 0.75L);
    return eps * m / (std::log(2.0L) + std::log(2.0L));
}

// Least n >= k with 4 * 4 * 2^k * 2^(-n eta) < delta, delta = 2^-e.
inline long choose_n(long double eps, long k, long e) {
    long double eta = eta2(eps, k);
    for (long n = k;; ++n) {
        long double lhs = 4.0L + static_cast<long double>(k) - static_cast<long double>(n) * eta;
        if (lhs < -static_cast<long double>(e)) return n;
    }
}

inline long t_of(long i) {
    long t = static_cast<long>(std::ceil(std::log(static_cast<long double>(i))));
    return std::max(1L, t);
}

// Does a binary word start at digit `first`, with exactly a_xy overlapping
// blocks xy, for some a with a_xy in [lo_xy - c_xy, hi_xy - c_xy] and
// sum a = r? Euler-path conditions on the two-vertex graph.
inline bool completes(int first, long r, const long c[4], const long lo[4], const long hi[4]) {
    if (r == 0) {
        for (int d = 0; d < 4; ++d)
            if (c[d] < lo[d] || c[d] > hi[d]) return false;
        return true;
    }
    for (long a01 = 0; a01 <= r; ++a01) {
        for (long diff = -1; diff <= 1; ++diff) {
            long a10 = a01 - diff;
            if (a10 < 0 || a01 + a10 > r) continue;
            // out-in at the start vertex is +1 unless the path ends there.
            int end;
            if (diff == 0) end = first;
            else if (diff == 1 && first == 0) end = 1;
            else if (diff == -1 && first == 1) end = 0;
            else continue;
            (void)end;
            long rest = r - a01 - a10;
            long l00 = std::max(0L, lo[0] - c[0]), h00 = hi[0] - c[0];
            long l11 = std::max(0L, lo[3] - c[3]), h11 = hi[3] - c[3];
            if (c[1] + a01 < lo[1] || c[1] + a01 > hi[1]) continue;
            if (c[2] + a10 < lo[2] || c[2] + a10 > hi[2]) continue;
            if (h00 < 0 || h11 < 0) continue;
            bool crosses = a01 + a10 > 0;
            for (long a00 = l00; a00 <= std::min(h00, rest); ++a00) {
                long a11 = rest - a00;
                if (a11 < l11 || a11 > h11) continue;
                // Loops need their vertex on the path.
                if (!crosses && ((first == 0 && a11 > 0) || (first == 1 && a00 > 0))) continue;
                return true;
            }
        }
    }
    return false;
}

struct PisotStep {
    long step = 0;
    long n = 0;
    long delta_exp = 0;  // delta = 2^-delta_exp
    mpz_class index = 0;
    std::string block;  // u_1
};

// Runs steps 2 and 3 from [0, 1).
inline std::vector<PisotStep> pisot_base2() {
    std::vector<PisotStep> out;
    // step 2: t = 1, eps = 1, k = 1, delta = 1/(4*1*2^2) * 2^-(4*3).
    {
        PisotStep s;
        s.step = 2;
        s.delta_exp = 4 + 12;
        s.n = choose_n(1.0L, 1, s.delta_exp);
        // (1,1)-normal: each digit occurs strictly between 0 and n times.
        s.block = std::string(static_cast<std::size_t>(s.n - 1), '0') + "1";
        s.index = 1;
        out.push_back(s);
    }
    // step 3: t = ceil(log 3) = 2, eps = 1/2, k = 2, base 2 repeated;
    // delta = 1/(4*1*2^3) * 2^-(4*4).
    {
        PisotStep s;
        s.step = 3;
        if (t_of(3) != 2) throw std::runtime_error("unexpected t_3");
        s.delta_exp = 5 + 16;
        s.n = choose_n(0.5L, 2, s.delta_exp);
        // strict bounds (1 +- 1/2) * n / 4 on every two-digit block
        mpq_class mu(s.n, 4);
        mpq_class lo_q = mu * mpq_class(1, 2), hi_q = mu * mpq_class(3, 2);
        mpz_class lo_z, hi_z;
        mpz_fdiv_q(lo_z.get_mpz_t(), lo_q.get_num_mpz_t(), lo_q.get_den_mpz_t());
        mpz_cdiv_q(hi_z.get_mpz_t(), hi_q.get_num_mpz_t(), hi_q.get_den_mpz_t());
        long lo[4], hi[4];
        for (int d = 0; d < 4; ++d) {
            lo[d] = lo_z.get_si() + 1;
            hi[d] = hi_z.get_si() - 1;
        }
        long c[4] = {0, 0, 0, 0};
        std::string w;
        for (long p = 0; p < s.n; ++p) {
            bool placed = false;
            for (int d = 0; d < 2 && !placed; ++d) {
                long cc[4] = {c[0], c[1], c[2], c[3]};
                if (!w.empty()) ++cc[2 * (w.back() - '0') + d];
                long remaining = s.n - 1 - static_cast<long>(w.empty() ? 0 : w.size());
                if (p == 0) remaining = s.n - 1;
                if (completes(d, remaining, cc, lo, hi)) {
                    w.push_back(static_cast<char>('0' + d));
                    for (int q = 0; q < 4; ++q) c[q] = cc[q];
                    placed = true;
                }
            }
            if (!placed) throw std::runtime_error("naive reference: no completion");
        }
        s.block = w;
        s.index = mpz_class(w, 2);
        out.push_back(s);
    }
    return out;
}

}  // namespace naive
