#pragma once

// Beta-transformation dynamics over a certified Pisot base: the orbit of 1,
// the admissibility automaton of the beta-shift, exact cylinder geometry and
// the Parry measure.

#include "pisotnorm/algebraic.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pisotnorm {

using Word = std::vector<int>;

/// Digits joined directly when the alphabet fits in one character,
/// comma-separated otherwise.
std::string word_to_string(const Word& w, long alphabet_max);
Word parse_word(const std::string& text, long alphabet_max);

struct StepResult {
    int digit;
    FieldElement next;
};

/// x -> (floor(beta x), beta x - floor(beta x)); requires 0 <= x < 1.
StepResult t_beta_step(const FieldElement& x);

struct ExpansionOfOne {
    Word d1;                    // greedy expansion of 1 (finite part, or one preperiod+period)
    bool finite = false;        // d1 terminates
    Word dstar_preperiod;       // d*(1) = preperiod . period^omega
    Word dstar_period;
    std::vector<FieldElement> orbit;  // distinct T^k(1), k = 0, 1, ...
    std::size_t orbit_preperiod = 0;  // first index of the orbit cycle
    std::size_t orbit_period = 0;
    int zero_run = 0;                 // longest run of zeros in d*(1)

    /// t_i of d*(1), 1-indexed.
    int dstar_digit(std::size_t i) const;
};

/// Orbit of 1 with exact cycle detection. The budget defaults to the ceiling
/// of the Blichfeldt bound.
ExpansionOfOne expansion_of_one(const PisotPtr& beta, std::optional<std::size_t> budget = std::nullopt);

/// Deterministic automaton of the beta-shift: state q means the current
/// suffix matches t_1..t_q tightly. Every state accepts.
class Automaton {
public:
    explicit Automaton(const ExpansionOfOne& e);

    int states() const { return static_cast<int>(limit_.size()); }
    long alphabet_max() const { return alphabet_max_; }
    /// Largest digit allowed in state q.
    int limit(int q) const { return limit_[static_cast<std::size_t>(q)]; }
    /// Successor state, or -1 for a forbidden digit.
    int step(int q, int digit) const;
    /// State after reading w from the start state, or -1.
    int run(const Word& w, int from = 0) const;
    bool accepts(const Word& w) const { return run(w) >= 0; }

private:
    std::vector<int> limit_;
    std::vector<int> tight_;
    long alphabet_max_;
};

/// Exact numbers of admissible continuations, memoised by length.
class WordCounter {
public:
    explicit WordCounter(const Automaton& a);
    /// Number of admissible words of length n read from state q.
    const Integer& from_state(int q, std::size_t n);
    const Integer& total(std::size_t n) { return from_state(0, n); }

private:
    const Automaton* automaton_;
    std::vector<std::vector<Integer>> table_;
};

struct Cylinder {
    Word word;
    int state = 0;  // automaton state after the word
    FieldElement left;
    FieldElement right;
    FieldElement lebesgue;

    std::size_t order() const { return word.size(); }
};

class ParryMeasure;

/// Everything derived from one Pisot base; immutable after construction and
/// safe to share between threads.
class BetaSystem {
public:
    explicit BetaSystem(PisotPtr beta, std::optional<std::size_t> orbit_budget = std::nullopt);

    const PisotPtr& base() const { return beta_; }
    const ExpansionOfOne& expansion() const { return expansion_; }
    const Automaton& automaton() const { return automaton_; }
    const ParryMeasure& parry() const { return *parry_; }
    long alphabet_max() const { return beta_->alphabet_max(); }
    int zero_run() const { return expansion_.zero_run; }

    /// Follower-set measures F_q, from the linear system (I - A/beta) F = 0, F_0 = 1.
    const std::vector<FieldElement>& follower_measures() const { return follower_; }
    /// beta^{-n}, cached.
    FieldElement inverse_power(std::size_t n) const;

    bool is_admissible(const Word& w) const { return automaton_.accepts(w); }
    std::size_t count_words(std::size_t n) const;  // fits in size_t or throws
    Integer count_words_exact(std::size_t n) const;

    /// Throws Error(Inadmissible).
    Cylinder cylinder(const Word& w) const;
    /// Extends a cylinder by one digit; throws Error(Inadmissible).
    Cylinder extend(const Cylinder& c, int digit) const;
    /// Lexicographic successor of an admissible word of the same length.
    std::optional<Word> successor(const Word& w) const;
    /// The order-n cylinder containing x in [0,1); x may live in any field.
    Cylinder locate(const FieldElement& x, std::size_t n) const;
    /// Refines a containing cylinder by one more digit around x.
    Cylinder locate_next(const Cylinder& c, const FieldElement& x) const;

    /// Visits the order-n cylinders in lexicographic order; the visitor returns
    /// false to stop. Throws Error(EnumerationBudgetExceeded) past `budget`.
    void enumerate(std::size_t n, const std::function<bool(const Cylinder&)>& visit,
                   std::size_t budget = 10'000'000) const;

    /// mu_beta of [left, right) for endpoints in this field, 0 <= left <= right <= 1.
    FieldElement parry_measure(const FieldElement& left, const FieldElement& right) const;
    FieldElement parry_measure(const Cylinder& c) const { return parry_measure(c.left, c.right); }

private:
    PisotPtr beta_;
    ExpansionOfOne expansion_;
    Automaton automaton_;
    std::vector<FieldElement> follower_;
    std::shared_ptr<const ParryMeasure> parry_;
    mutable std::mutex counter_mutex_;
    mutable std::unique_ptr<WordCounter> counter_;
    mutable std::mutex power_mutex_;
    mutable std::vector<FieldElement> inverse_powers_;
};

/// Piecewise-constant Parry density on [0,1).
class ParryMeasure {
public:
    ParryMeasure(const PisotPtr& beta, const ExpansionOfOne& e);

    /// Sorted distinct breakpoints including 0 and 1.
    const std::vector<FieldElement>& breakpoints() const { return breakpoints_; }
    /// Density on [breakpoints[i], breakpoints[i+1]).
    const std::vector<FieldElement>& densities() const { return densities_; }
    const FieldElement& normalizer() const { return normalizer_; }
    FieldElement measure(const FieldElement& left, const FieldElement& right) const;

private:
    std::vector<FieldElement> points_;   // orbit points
    std::vector<FieldElement> weights_;  // weight of 1[x < point]
    FieldElement normalizer_;
    std::vector<FieldElement> breakpoints_;
    std::vector<FieldElement> densities_;
};

/// Half-open interval [left, right) with both endpoints in one field.
struct Interval {
    FieldElement left;
    FieldElement right;
};

struct InscribeOptions {
    /// A cylinder known to contain the left endpoint, to skip a prefix of the descent.
    const Cylinder* hint = nullptr;
};

/// Coarsest (then leftmost) beta-adic cylinder contained in I. Throws
/// Error(EmptyInterval) when I has no positive length or lies outside [0,1].
Cylinder inscribed_beta_adic(const BetaSystem& system, const Interval& interval, const InscribeOptions& options = {});

/// Smallest m with beta^{-m} < length.
std::size_t smallest_order_below(const BetaSystem& system, const FieldElement& length);

}  // namespace pisotnorm
