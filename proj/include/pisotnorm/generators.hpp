#pragma once

// The two digit-generating step loops: the integer-base construction driven
// by a computable function f, and the multi-base construction over Pisot
// numbers. Both keep a nested sequence of adic intervals, one per active
// base, and append the digits of the refined left endpoints each step.

#include "pisotnorm/normality.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace pisotnorm {

// ---------------------------------------------------------------------------
// f and its declared evaluation cost

struct FunctionSpec {
    enum class Kind { Polynomial, Table };
    Kind kind = Kind::Polynomial;
    std::vector<Rational> coefficients{0, 0, 1};  // f(m) = sum c_j m^j
    std::vector<Rational> table;                  // f(1), f(2), ...
    /// Cost units charged per evaluation; 0 means the default
    /// (2 * degree for polynomials, 1 for tables).
    std::size_t cost_per_eval = 0;

    static FunctionSpec polynomial(std::vector<Rational> coefficients);
    static FunctionSpec constant(const Rational& value);

    Rational operator()(std::size_t m) const;
    std::size_t unit_cost() const;
    /// Largest m <= i whose first m values fit into i cost units (0 if none).
    std::size_t reachable(std::size_t i) const;
    std::string describe() const;
};

// ---------------------------------------------------------------------------
// integer bases

/// [numerator / b^order, (numerator + 1) / b^order).
struct AdicInterval {
    long base = 2;
    Integer numerator = 0;
    std::size_t order = 0;

    Rational left() const;
    Rational right() const;
    Rational length() const;
    Word digits() const;
};

/// Coarsest, then leftmost, b-adic interval inside [left, right).
AdicInterval inscribed_adic(long base, const Rational& left, const Rational& right);

/// Bounds on the operation count h of one step, as a closed form.
struct HBound {
    Integer h_star, h1, g, h2, h3, h4, h0;
    Integer value;
};
/// h for the step with t active bases and block parameter k; `digits` is the
/// longest current digit string, which sizes g and h0.
HBound bhs_h(long t_prev, long t_next, const Integer& k_next, std::size_t digits);

struct BhsState {
    std::size_t i = 1;
    long t = 2;
    Rational epsilon{1, 2};
    Integer k = 1;
    Rational delta = 0;  // unset before the first step
    std::vector<AdicInterval> sequence;  // bases 2..t
    std::map<long, Word> digits;         // x_{i,b}
    std::uint64_t op_counter = 0;

    const AdicInterval& interval(long b) const { return sequence[static_cast<std::size_t>(b - 2)]; }
};

BhsState bhs_init();

struct TUpdate {
    long t = 2;
    Rational epsilon;
    bool power_of_two = false;
    std::size_t m = 0;        // values of f reachable in i units
    Rational f_m = 0;
    Rational delta = 0;       // delta used by the conditions
    Integer k = 0;            // k(1/(v+1), delta, v+1)
    Integer h = 0;            // h(v+1, 1/(v+1))
    std::size_t cost_k = 0;
    std::size_t cost_h = 0;
    bool computed = false;    // both values fit in i units
    bool cond_h = false;
    bool cond_k = false;
};

/// Declared costs, in mathematical operations, of computing k and h for v+1.
std::size_t bhs_cost_k(long v_next);
std::size_t bhs_cost_h();

TUpdate bhs_update_t(const BhsState& state, const FunctionSpec& f);

struct BhsBaseReport {
    long base = 2;
    Word block;
    Rational discrepancy;
};

struct BhsTrace {
    std::size_t step = 0;
    TUpdate update;
    long t = 2;
    Rational epsilon;
    Integer k;
    Rational delta;
    AdicInterval l;
    std::size_t extension = 0;        // digits of J_2 beyond L
    std::uint64_t candidates = 0;     // complete candidates examined
    Integer accepted_index = 0;       // rank of J_2 among the subintervals of L
    std::vector<AdicInterval> sequence;
    std::vector<BhsBaseReport> bases;
    std::uint64_t op_delta = 0;
    double seconds = 0;
};

struct BhsOptions {
    std::uint64_t candidate_budget = 1'000'000;
};

/// Advances one step; throws Error(NoCandidateAccepted) or
/// Error(CandidateBudgetExceeded).
BhsTrace bhs_step(BhsState& state, const FunctionSpec& f, const BhsOptions& options = {});

// ---------------------------------------------------------------------------
// Pisot bases

enum class LogBase { Natural, Binary };

/// t_i: 1 for i = 1, otherwise ceil(log i) (at least 1).
long pisot_t(std::size_t i, LogBase log_base = LogBase::Natural);

/// One certified base with its beta-system and zero-run constant.
struct BaseInfo {
    std::shared_ptr<const BetaSystem> system;
    std::size_t m = 0;  // M_beta used by the constants
    RealInterval log_beta;

    BaseInfo(std::shared_ptr<const BetaSystem> system, ZeroRunSource source);
    const PisotNumber& beta() const { return *system->base(); }
};

struct ScheduleConditions {
    bool max_base = true;  // max beta_j <= beta_1 i
    bool max_m = true;     // max M_j <= (M_1 + 1)(1 + log i)
    bool weight = true;    // sum (M_j + 4) log beta_j <= (M_1 + 4) log beta_1 (1 + log i)
    bool all() const { return max_base && max_m && weight; }
};

/// Checks the three repetition conditions for the prefix `effective` (raw
/// indices) at step i.
ScheduleConditions check_schedule(const std::vector<BaseInfo>& raw, const std::vector<std::size_t>& effective,
                                  std::size_t i);

/// Raw indices of positions 1..t_i. Position j is fixed at the first step
/// needing it: the next raw base if the conditions then hold, otherwise a
/// repetition of the admitted base of least weight.
std::vector<std::size_t> pisot_schedule(const std::vector<BaseInfo>& raw, std::size_t i,
                                        LogBase log_base = LogBase::Natural);
/// Extends `effective` to `length` positions, deciding new positions at step i.
std::vector<std::size_t> extend_schedule(const std::vector<BaseInfo>& raw, std::vector<std::size_t> effective,
                                         std::size_t length, std::size_t i);

/// A positive real q * prod beta_r^{e_r} over raw bases r, kept symbolic so
/// single-field values stay exact.
struct SymbolicProduct {
    Rational factor = 1;
    std::map<std::size_t, long> exponents;

    SymbolicProduct& operator*=(const SymbolicProduct& other);
    RealInterval log(const std::vector<BaseInfo>& raw, mpfr_prec_t prec) const;
    /// Exact value when every base involved lives in one field.
    std::optional<FieldElement> exact(const std::vector<BaseInfo>& raw) const;
    std::string to_string(const std::vector<BaseInfo>& raw) const;
};

/// delta_{i+1} for positions of the current and next step.
SymbolicProduct pisot_delta(const std::vector<BaseInfo>& raw, const std::vector<std::size_t>& effective_next,
                            long t_i, long t_next);

/// log of 4 (beta/(beta-1))^2 beta^k beta^{-n eta} with eta at its lower bound.
RealInterval pisot_tail_log(const BaseInfo& base, const Rational& epsilon, std::size_t k, std::size_t n,
                            mpfr_prec_t prec);

/// Least n >= max_j (M_j + k) with the tail bound below delta for every
/// position j < t_next.
std::size_t pisot_choose_n(const std::vector<BaseInfo>& raw, const std::vector<std::size_t>& effective_next,
                           long t_next, const Rational& epsilon, std::size_t k, const SymbolicProduct& delta);

/// ceil(max_j log beta_j / log beta_1) over the first t_i positions.
std::size_t pisot_v(const std::vector<BaseInfo>& raw, const std::vector<std::size_t>& effective, long t_i);

/// Per-step overrides for scaled runs. Entry s applies to step s + 2; the last
/// entry repeats. Empty lists fall back to the exact rules.
struct Profile {
    std::vector<long> t;
    std::vector<Rational> epsilon;
    std::vector<std::size_t> k;
    std::vector<std::size_t> n;
};

enum class PisotMode { Faithful, Scaled };

struct PisotOptions {
    PisotMode mode = PisotMode::Faithful;
    Profile profile;
    LogBase log_base = LogBase::Natural;
    ZeroRunSource zero_run = ZeroRunSource::Exact;
    std::uint64_t candidate_budget = 1'000'000;
    std::size_t census_budget = 2'000'000;
};

struct PisotState {
    std::size_t i = 1;
    long t = 1;
    Rational epsilon = 1;
    std::size_t k = 1;
    std::size_t n = 0;
    std::size_t v = 0;
    std::optional<SymbolicProduct> delta;
    std::vector<std::size_t> effective;  // raw index per position
    std::vector<Cylinder> sequence;      // I_{i,j}
    std::uint64_t op_counter = 0;
};

PisotState pisot_init(const std::vector<BaseInfo>& raw);

struct FeasibilityLedger {
    SymbolicProduct s_factor;          // lambda(S) >= s_factor * lambda(I_{i,1})
    RealInterval n_factor{64};         // lambda(N) <= n_factor * lambda(I_{i,1})
    std::string n_source;              // "analytic", "census" or "mixed"
    std::optional<FieldElement> lambda_i1;  // lambda(I_{i,1})
    bool feasible = false;             // n_factor < s_factor, certified
};

FeasibilityLedger verify_feasibility(const std::vector<BaseInfo>& raw, const PisotState& state,
                                     const std::vector<std::size_t>& effective_next, long t_next,
                                     const Rational& epsilon, std::size_t k, std::size_t n,
                                     const SymbolicProduct& delta, const PisotOptions& options);

struct PisotBlockReport {
    std::size_t position = 0;  // 1-based
    std::size_t raw_index = 0;
    Word block;
    NormalityReport normality;
    bool checked = false;  // positions beyond t_i carry no requirement
};

struct PisotTrace {
    std::size_t step = 0;
    long t = 1;
    Rational epsilon;
    std::size_t k = 1;
    SymbolicProduct delta;
    std::size_t n = 0;
    std::size_t n_exact = 0;  // faithful choice, also reported when scaled
    std::size_t v = 0;
    std::vector<std::size_t> effective;
    std::optional<Cylinder> l;
    std::size_t extension = 0;
    std::uint64_t candidates = 0;
    std::uint64_t pruned = 0;
    Integer accepted_index = 0;
    std::vector<Cylinder> sequence;
    std::vector<PisotBlockReport> blocks;
    FeasibilityLedger ledger;
    bool scaled = false;
    std::uint64_t op_delta = 0;
    double seconds = 0;
};

/// Advances one step. Throws Error(NoCandidateAccepted),
/// Error(CandidateBudgetExceeded) or, in faithful mode,
/// Error(FeasibilityViolated).
PisotTrace pisot_step(const std::vector<BaseInfo>& raw, PisotState& state, const PisotOptions& options);

// ---------------------------------------------------------------------------
// driver

enum class GeneratorKind { Bhs, Pisot };

struct GeneratorConfig {
    GeneratorKind kind = GeneratorKind::Pisot;
    std::vector<std::string> bases;
    bool assume_irreducible = false;
    PisotOptions pisot;
    BhsOptions bhs;
    FunctionSpec f;
    std::size_t target_digits = 100;
    std::size_t max_steps = 1000;
    bool timing = false;  // wall time in the trace breaks byte-identical reruns
    bool seeded = false;

    static GeneratorConfig parse(const std::string& json_text);
};

struct GenerateResult {
    std::vector<std::string> labels;  // one per stream
    std::vector<Word> streams;
    std::vector<long> alphabet_max;
    std::vector<std::string> trace;  // JSON lines
    std::size_t steps = 0;
    bool complete = false;  // target reached
    std::uint64_t op_counter = 0;
    std::string stop_reason;
};

inline constexpr const char* kTraceSchema = "normgen-trace/1";

GenerateResult generate(const GeneratorConfig& config);

std::string trace_json(const BhsTrace& trace, bool timing);
std::string trace_json(const std::vector<BaseInfo>& raw, const PisotTrace& trace, bool timing);

}  // namespace pisotnorm
