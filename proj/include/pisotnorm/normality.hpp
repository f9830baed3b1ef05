#pragma once

// Block statistics, (eps,k)-normality of finite words, the explicit
// constants of the Pisot construction and discrepancy measurements.

#include "pisotnorm/beta_system.hpp"

#include <unordered_map>

namespace pisotnorm {

/// Overlapping occurrences of d inside w[0..n).
std::size_t count_occurrences(const Word& w, const Word& d, std::size_t n);

/// max_digit |N_digit(u)/|u| - 1/b|. Throws Error(EmptyWord).
Rational simple_discrepancy(const Word& u, int b);

/// The admissible blocks of length k with their exact Parry measures.
class BlockTable {
public:
    BlockTable(const BetaSystem& system, std::size_t k);

    std::size_t k() const { return k_; }
    std::size_t size() const { return blocks_.size(); }
    const Word& block(std::size_t i) const { return blocks_[i]; }
    const FieldElement& measure(std::size_t i) const { return measures_[i]; }
    /// Index of the block starting at `digits`, or npos when inadmissible.
    std::size_t index_of(const int* digits) const;
    /// Overlapping counts of every block inside w[0..n).
    std::vector<std::size_t> counts(const Word& w, std::size_t n) const;
    void add_counts(const int* digits, std::size_t n, std::vector<std::size_t>& out) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t encode(const int* digits) const;

    std::size_t k_;
    std::size_t radix_;
    std::vector<Word> blocks_;
    std::vector<FieldElement> measures_;
    std::vector<std::size_t> dense_;
    std::unordered_map<std::size_t, std::size_t> sparse_;
};

/// Integer count ranges [lo_d, hi_d] equivalent to the strict bounds
/// mu(1-eps)n < N_d < mu(1+eps)n.
struct CountBounds {
    std::vector<Integer> lo;
    std::vector<Integer> hi;
};
CountBounds count_bounds(const BlockTable& table, const Rational& epsilon, std::size_t n);

struct NormalityReport {
    bool verdict = true;
    Word worst_block;
    Rational worst_ratio;    // N_d / n of the worst block
    double worst_deviation = 0;  // |N_d / (mu_d n) - 1|, display only
    std::size_t length = 0;
};

NormalityReport is_eps_k_normal(const BetaSystem& system, const Word& w, const Rational& epsilon, std::size_t k);
NormalityReport is_eps_k_normal(const BlockTable& table, const Word& w, const Rational& epsilon);

/// max over blocks of |N_d/n - mu(c(d))|, exact in Q(beta).
FieldElement block_frequency_deviation(const BlockTable& table, const Word& w);

struct BlichfeldtBound {
    Rational value;  // rigorous upper bound
    Integer ceiling;
};
BlichfeldtBound blichfeldt_bound(const PisotNumber& beta);

/// Certified enclosure of the exponent eta. `lower` is a rigorous lower
/// bound, `upper` a rigorous upper bound.
struct EtaBounds {
    Rational lower;
    Rational upper;
};
EtaBounds eta_exponent(const PisotNumber& beta, const Rational& epsilon, std::size_t k, std::size_t m);

/// Which M feeds eta and the constants.
enum class ZeroRunSource { Exact, Blichfeldt };

struct ConstantsBundle {
    int m_exact = 0;
    BlichfeldtBound blichfeldt;
    Rational c_big;  // 1 + floor(beta) / (1 - eta_conj)
    std::size_t m_used = 0;
    EtaBounds eta;
    FieldElement c_corollary;  // 4 |L_k| beta^{M+1} beta / (beta - 1)
    std::size_t n0 = 0;        // M + k
};
ConstantsBundle constants(const BetaSystem& system, const Rational& epsilon, std::size_t k,
                          ZeroRunSource source = ZeroRunSource::Exact);

struct CensusResult {
    Integer total;       // |L_n|
    Integer count;       // non-normal words
    FieldElement mass;   // exact Parry mass of the non-normal cylinders
};
CensusResult non_normal_census(const BetaSystem& system, std::size_t n, const Rational& epsilon, std::size_t k,
                               unsigned jobs = 1, std::size_t budget = 10'000'000);

struct CensusCheck {
    Rational mass_bound;   // rational lower bound of 4 |L_k| |L_n|^{-eta}
    Rational count_bound;  // rational lower bound of C |L_n|^{1-eta}
    bool applicable = false;  // n >= M + k
    bool mass_ok = true;
    bool count_ok = true;
};
/// Checks the census against the analytic bounds with eta taken at its upper
/// enclosure, so a pass is a pass for the exact exponent.
CensusCheck check_census(const BetaSystem& system, const CensusResult& census, std::size_t n, const Rational& epsilon,
                         std::size_t k, ZeroRunSource source = ZeroRunSource::Exact);

/// max(ceil(6/eps), ceil(-ln(delta/(2t)) 6/eps^2)) + 1.
Integer k_bhs(const Rational& epsilon, const Rational& delta, const Integer& t);

/// Extreme discrepancy over all subintervals of [0,1).
Rational extreme_discrepancy(std::vector<Rational> points);

struct OrbitPoints {
    std::vector<Rational> points;
    Rational error_bound;  // every point is within this of the true value
};
std::size_t default_guard(long b, std::size_t n);
/// {b^i x mod 1}, i = 1..n, from a truncated digit string of x. Throws
/// Error(InsufficientDigits) unless |digits| >= n + guard.
OrbitPoints orbit_points(const Word& digits, long b, std::size_t n, std::optional<std::size_t> guard = std::nullopt);

}  // namespace pisotnorm
