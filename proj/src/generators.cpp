#include "pisotnorm/generators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace pisotnorm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_prefix(const Word& prefix, const Word& w) {
    return prefix.size() <= w.size() && std::equal(prefix.begin(), prefix.end(), w.begin());
}

Word suffix_after(const Word& w, std::size_t from) {
    return Word(w.begin() + static_cast<long>(from), w.end());
}

}  // namespace

// ---------------------------------------------------------------------------
// FunctionSpec

FunctionSpec FunctionSpec::polynomial(std::vector<Rational> coefficients) {
    FunctionSpec f;
    f.kind = Kind::Polynomial;
    f.coefficients = std::move(coefficients);
    return f;
}

FunctionSpec FunctionSpec::constant(const Rational& value) { return polynomial({value}); }

Rational FunctionSpec::operator()(std::size_t m) const {
    if (kind == Kind::Table) {
        if (m == 0 || m > table.size()) throw Error(ErrorCode::InvalidArgument, "f table has no entry " + std::to_string(m));
        return table[m - 1];
    }
    Rational x(static_cast<unsigned long>(m));
    return poly::evaluate(coefficients, x);
}

std::size_t FunctionSpec::unit_cost() const {
    if (cost_per_eval > 0) return cost_per_eval;
    if (kind == Kind::Table) return 1;
    int d = poly::degree(coefficients);
    return static_cast<std::size_t>(std::max(1, 2 * d));
}

std::size_t FunctionSpec::reachable(std::size_t i) const {
    std::size_t m = std::min(i, i / unit_cost());
    if (kind == Kind::Table) m = std::min(m, table.size());
    return m;
}

std::string FunctionSpec::describe() const {
    if (kind == Kind::Table) return "table[" + std::to_string(table.size()) + "]";
    return poly::to_string(coefficients, "m");
}

// ---------------------------------------------------------------------------
// b-adic intervals

Rational AdicInterval::left() const {
    Rational r(numerator, pow(Integer(base), order));
    r.canonicalize();
    return r;
}

Rational AdicInterval::right() const {
    Rational r(numerator + 1, pow(Integer(base), order));
    r.canonicalize();
    return r;
}

Rational AdicInterval::length() const {
    Rational r(1, pow(Integer(base), order));
    r.canonicalize();
    return r;
}

Word AdicInterval::digits() const {
    Word w(order, 0);
    if (order == 0) return w;
    std::string s = numerator.get_str(static_cast<int>(base));
    if (s.size() > order) throw Error(ErrorCode::InvalidArgument, "adic numerator out of range");
    std::size_t offset = order - s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        w[offset + i] = std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : 10 + (c - 'a');
    }
    return w;
}

AdicInterval inscribed_adic(long base, const Rational& left, const Rational& right) {
    if (left < 0 || right > 1 || right <= left) {
        throw Error(ErrorCode::EmptyInterval, "[" + to_string(left) + ", " + to_string(right) + ")");
    }
    Rational length = right - left;
    // Orders with b^-n > length cannot fit; skip them using bit sizes.
    double log2_len = static_cast<double>(mpz_sizeinbase(length.get_num_mpz_t(), 2)) -
                      static_cast<double>(mpz_sizeinbase(length.get_den_mpz_t(), 2));
    double estimate = -log2_len / std::log2(static_cast<double>(base)) - 3;
    std::size_t n = estimate > 0 ? static_cast<std::size_t>(estimate) : 0;
    Integer scale = pow(Integer(base), n);
    while (Rational(1, scale) > length) {
        ++n;
        scale *= base;
    }
    for (;; ++n, scale *= base) {
        Rational lo = left * scale;
        Integer a = ceil(lo);
        if (Rational(a + 1) <= right * scale) return {base, a, n};
    }
}

// ---------------------------------------------------------------------------
// BHS

HBound bhs_h(long t_prev, long t_next, const Integer& k_next, std::size_t digits) {
    HBound h;
    h.h2 = Integer(static_cast<unsigned long>(ceil_log2(Integer(t_prev)))) * k_next;
    h.h_star = pow(Integer(2), h.h2.get_ui());
    h.h1 = t_next;
    h.h3 = t_prev;
    h.h4 = Integer(t_prev) * h.h2 * h.h2;
    // Bits of every endpoint handled in the step: current digits, the dyadic L,
    // the J_2 extension and one inscription per further base.
    Integer bits = Integer(static_cast<unsigned long>(digits)) + 2 + h.h2;
    for (long b = 3; b <= t_next; ++b) bits += static_cast<unsigned long>(ceil_log2(Integer(2 * b)));
    h.g = bits * bits;
    h.h0 = bits;
    h.value = h.h_star * (h.h1 * h.g + h.h2 + h.h3 + h.h4) * h.h0;
    return h;
}

std::size_t bhs_cost_k(long v_next) {
    // two factorials, a power of two, the products, one logarithm, the
    // divisions, ceilings and the final max.
    return static_cast<std::size_t>(2 * v_next + 12);
}

std::size_t bhs_cost_h() { return 10; }

BhsState bhs_init() {
    BhsState s;
    s.sequence.push_back(AdicInterval{2, 0, 0});
    s.digits[2] = {};
    return s;
}

namespace {

Rational bhs_delta(long t_prev, long t_next) {
    Integer den = 8 * Integer(t_prev) * pow(Integer(2), static_cast<unsigned long>(t_prev + t_next)) *
                  factorial(static_cast<unsigned long>(t_prev)) * factorial(static_cast<unsigned long>(t_next));
    return Rational(1, den);
}

}  // namespace

TUpdate bhs_update_t(const BhsState& state, const FunctionSpec& f) {
    TUpdate u;
    long v = state.t;
    u.t = v;
    u.epsilon = state.epsilon;
    std::size_t i = state.i;
    u.power_of_two = ((i + 1) & i) == 0;
    if (!u.power_of_two) return u;

    u.m = f.reachable(i);
    if (u.m > 0) u.f_m = f(u.m);
    u.delta = bhs_delta(v, v + 1);
    u.k = k_bhs(Rational(1, v + 1), u.delta, v + 1);
    std::size_t longest = 0;
    for (const auto& [b, w] : state.digits) longest = std::max(longest, w.size());
    u.h = bhs_h(v + 1, v + 1, u.k, longest).value;
    u.cost_k = bhs_cost_k(v + 1);
    u.cost_h = bhs_cost_h();
    u.computed = u.m > 0 && u.cost_k <= i && u.cost_h <= i;

    u.cond_h = Rational(u.h) < u.f_m;
    Integer numerator = Integer(static_cast<unsigned long>(ceil_log2(Integer(v + 1)))) * u.k +
                        static_cast<unsigned long>(ceil_log2(Integer(u.delta.get_den())));
    u.cond_k = true;
    for (long b = 2; b <= v; ++b) {
        Integer len = static_cast<unsigned long>(state.digits.at(b).size());
        // numerator / len < 1/(v+1)
        if (!(numerator * (v + 1) < len)) u.cond_k = false;
    }
    if (u.computed && u.cond_h && u.cond_k) {
        u.t = v + 1;
        u.epsilon = Rational(1, v + 1);
    }
    return u;
}

namespace {

// Digits shared by every point of a dyadic interval, in one further base.
struct CommonPrefix {
    std::size_t order = 0;
    Integer numerator = 0;
    std::vector<long> counts;  // digit counts beyond x_{i,b}
};

struct BhsSearch {
    const BhsState& state;
    long t_prev;
    long t_next;
    Rational epsilon;
    AdicInterval l;
    std::size_t s;
    std::uint64_t budget;

    Word fixed{};          // digits of L beyond x_{i,2}
    std::size_t total = 0;   // |u_2|
    long lo[2] = {0, 0};
    long hi[2] = {0, 0};
    long counts[2] = {0, 0};
    Word ext{};
    Integer ext_value = 0;
    std::uint64_t leaves = 0;
    std::uint64_t ops = 0;
    std::uint64_t pruned = 0;

    // For bases 3..t_prev: |u_b| range over all leaves and the shared
    // prefix at each depth.
    std::vector<std::pair<std::size_t, std::size_t>> length_range{};
    std::vector<std::vector<CommonPrefix>> prefix{};

    std::optional<std::vector<AdicInterval>> accepted{};
    std::vector<BhsBaseReport> reports{};

    void setup_prefixes() {
        // J_2 has order l.order + s; each later J_b keeps at least 1/(2b) of
        // the previous length, so order_b lies in
        // [ceil(order_2 / log2 b), floor((order_2 + sum log2 2c) / log2 b)].
        double o2 = static_cast<double>(l.order + s);
        double spread = 0;
        for (long b = 3; b <= t_prev; ++b) {
            spread += std::log2(2.0 * static_cast<double>(b));
            double lb = std::log2(static_cast<double>(b));
            auto lo_order = static_cast<long>(std::floor(o2 / lb)) - 1;
            auto hi_order = static_cast<long>(std::ceil((o2 + spread) / lb)) + 1;
            long have = static_cast<long>(state.digits.at(b).size());
            length_range.emplace_back(static_cast<std::size_t>(std::max(0L, lo_order - have)),
                                      static_cast<std::size_t>(std::max(0L, hi_order - have)));
            CommonPrefix c;
            c.counts.assign(static_cast<std::size_t>(b), 0);
            prefix.push_back({c});
            extend_prefix(b, prefix.back().back(), l.numerator, l.order);
        }
    }

    // Extends c while the dyadic interval [num/2^m, (num+1)/2^m) stays in
    // one b-adic interval of the next order.
    void extend_prefix(long b, CommonPrefix& c, const Integer& num, std::size_t m) {
        std::size_t have = state.digits.at(b).size();
        Integer den = pow(Integer(2), m);
        Integer scale = pow(Integer(b), c.order + 1);
        for (;; scale *= b) {
            Integer cell = (num * scale) / den;
            ++ops;
            if ((cell + 1) * den < (num + 1) * scale) return;
            long e = Integer(cell - c.numerator * b).get_si();
            c.numerator = cell;
            ++c.order;
            if (c.order > have) ++c.counts[static_cast<std::size_t>(e)];
        }
    }

    // Some |u_b| in range admits D(u_b, b) <= epsilon given the shared prefix.
    bool prefix_viable(long b, const CommonPrefix& c) const {
        auto [lo_len, hi_len] = length_range[static_cast<std::size_t>(b - 3)];
        std::size_t known = 0;
        for (long x : c.counts) known += static_cast<std::size_t>(x);
        Rational third(1, b);
        for (std::size_t len = std::max(lo_len, std::max<std::size_t>(known, 1)); len <= hi_len; ++len) {
            Rational n(static_cast<unsigned long>(len));
            long need = 0;
            long room = 0;
            bool ok = true;
            for (long x : c.counts) {
                long lo_d = std::max(0L, ceil(n * (third - epsilon)).get_si());
                long hi_d = floor(n * (third + epsilon)).get_si();
                if (x > hi_d) {
                    ok = false;
                    break;
                }
                need += std::max(x, lo_d);
                room += hi_d;
            }
            if (ok && need <= static_cast<long>(len) && room >= static_cast<long>(len)) return true;
        }
        return false;
    }

    bool viable(std::size_t placed) const {
        std::size_t remaining = s - placed;
        long deficit = 0;
        for (int d = 0; d < 2; ++d) {
            if (counts[d] > hi[d]) return false;
            deficit += std::max(0L, lo[d] - counts[d]);
        }
        return static_cast<std::size_t>(deficit) <= remaining;
    }

    bool evaluate() {
        ++leaves;
        if (leaves > budget) {
            throw Error(ErrorCode::CandidateBudgetExceeded,
                        "more than " + std::to_string(budget) + " candidates at step " + std::to_string(state.i + 1));
        }
        std::vector<AdicInterval> seq{AdicInterval{2, l.numerator * pow(Integer(2), s) + ext_value, l.order + s}};
        for (long b = 3; b <= t_next; ++b) {
            seq.push_back(inscribed_adic(b, seq.back().left(), seq.back().right()));
            ops += 6;
        }
        std::vector<BhsBaseReport> out;
        for (long b = 2; b <= t_prev; ++b) {
            Word w = seq[static_cast<std::size_t>(b - 2)].digits();
            const Word& prev = state.digits.at(b);
            if (!is_prefix(prev, w)) throw Error(ErrorCode::FeasibilityViolated, "prefix property broken");
            Word u = suffix_after(w, prev.size());
            ops += u.size() + static_cast<std::size_t>(b);
            if (u.empty()) return false;
            Rational disc = simple_discrepancy(u, static_cast<int>(b));
            if (disc > epsilon) return false;
            out.push_back({b, std::move(u), disc});
        }
        accepted = std::move(seq);
        reports = std::move(out);
        return true;
    }

    // Pushes the shared prefixes for the current node; false if one of them
    // already rules out every leaf below.
    bool descend(std::size_t placed) {
        bool ok = true;
        for (long b = 3; b <= t_prev; ++b) {
            auto& stack = prefix[static_cast<std::size_t>(b - 3)];
            CommonPrefix c = stack.back();
            extend_prefix(b, c, l.numerator * pow(Integer(2), placed) + ext_value, l.order + placed);
            if (ok && !prefix_viable(b, c)) ok = false;
            stack.push_back(std::move(c));
        }
        return ok;
    }

    void ascend() {
        for (auto& stack : prefix) stack.pop_back();
    }

    bool walk(std::size_t placed) {
        if (placed == s) return evaluate();
        for (int d = 0; d < 2; ++d) {
            ext.push_back(d);
            ext_value = 2 * ext_value + d;
            ++counts[d];
            ops += 2;
            bool found = false;
            if (viable(placed + 1)) {
                bool open = descend(placed + 1);
                if (open) found = walk(placed + 1);
                else ++pruned;
                ascend();
            }
            --counts[d];
            ext_value = (ext_value - d) / 2;
            ext.pop_back();
            if (found) return true;
        }
        return false;
    }
};

}  // namespace

BhsTrace bhs_step(BhsState& state, const FunctionSpec& f, const BhsOptions& options) {
    auto start = Clock::now();
    BhsTrace trace;
    trace.step = state.i + 1;
    trace.update = bhs_update_t(state, f);
    long t_prev = state.t;
    long t_next = trace.update.t;
    trace.t = t_next;
    trace.epsilon = trace.update.epsilon;
    trace.delta = bhs_delta(t_prev, t_next);
    trace.k = k_bhs(trace.epsilon, trace.delta, t_prev);

    const AdicInterval& last = state.sequence.back();
    trace.l = inscribed_adic(2, last.left(), last.right());
    trace.extension = ceil_log2(Integer(t_prev)) * trace.k.get_ui();

    BhsSearch search{state, t_prev, t_next, trace.epsilon, trace.l, trace.extension, options.candidate_budget};
    const Word& x2 = state.digits.at(2);
    search.fixed = suffix_after(trace.l.digits(), x2.size());
    search.total = search.fixed.size() + search.s;
    Rational n(static_cast<unsigned long>(search.total));
    for (int d = 0; d < 2; ++d) {
        search.lo[d] = ceil(n * (Rational(1, 2) - trace.epsilon)).get_si();
        search.hi[d] = floor(n * (Rational(1, 2) + trace.epsilon)).get_si();
    }
    for (int d : search.fixed) ++search.counts[d];
    search.ext.reserve(search.s);
    search.setup_prefixes();
    bool open = true;
    for (long b = 3; b <= t_prev; ++b) open = open && search.prefix_viable(b, search.prefix[static_cast<std::size_t>(b - 3)].back());
    bool found = open && search.viable(0) && search.walk(0);
    trace.candidates = search.leaves;
    if (!found) {
        throw Error(ErrorCode::NoCandidateAccepted, "no t-sequence accepted at step " + std::to_string(trace.step));
    }
    for (int d : search.ext) trace.accepted_index = 2 * trace.accepted_index + d;
    trace.sequence = *search.accepted;
    trace.bases = search.reports;

    for (std::size_t j = 1; j < trace.sequence.size(); ++j) {
        const auto& outer = trace.sequence[j - 1];
        const auto& inner = trace.sequence[j];
        if (inner.left() < outer.left() || inner.right() > outer.right() ||
            inner.length() * 2 * inner.base < outer.length()) {
            throw Error(ErrorCode::FeasibilityViolated, "t-sequence invariant broken at base " + std::to_string(inner.base));
        }
    }

    state.i += 1;
    state.t = t_next;
    state.epsilon = trace.epsilon;
    state.k = trace.k;
    state.delta = trace.delta;
    state.sequence = trace.sequence;
    for (const auto& a : state.sequence) state.digits[a.base] = a.digits();
    trace.op_delta = search.ops + 40;
    state.op_counter += trace.op_delta;
    trace.seconds = seconds_since(start);
    return trace;
}

// ---------------------------------------------------------------------------
// Pisot: schedule and constants

long pisot_t(std::size_t i, LogBase log_base) {
    if (i <= 1) return 1;
    if (log_base == LogBase::Binary) return std::max<long>(1, static_cast<long>(ceil_log2(Integer(static_cast<unsigned long>(i)))));
    // log i is irrational for i >= 2, so the enclosure eventually separates.
    for (mpfr_prec_t prec = 64;; prec *= 2) {
        RealInterval l = RealInterval::point(Rational(static_cast<unsigned long>(i)), prec).log();
        Integer a = ceil(l.lower());
        Integer b = ceil(l.upper());
        if (a == b) return std::max<long>(1, a.get_si());
    }
}

namespace {

RealInterval log_beta(const BaseInfo& base, mpfr_prec_t prec) {
    if (prec <= base.log_beta.precision()) return base.log_beta;
    return base.beta().interval(prec).log();
}

RealInterval point(const Rational& q, mpfr_prec_t prec) { return RealInterval::point(q, prec); }

RealInterval log_of(std::size_t i, mpfr_prec_t prec) {
    return point(Rational(static_cast<unsigned long>(i)), prec).log();
}

// Certified a <= b with escalating precision; undecided counts as false.
bool certainly_at_most(const std::function<RealInterval(mpfr_prec_t)>& a,
                       const std::function<RealInterval(mpfr_prec_t)>& b) {
    for (mpfr_prec_t prec = 128; prec <= 4096; prec *= 2) {
        RealInterval x = a(prec);
        RealInterval y = b(prec);
        if (mpfr_lessequal_p(x.hi().get(), y.lo().get())) return true;
        if (mpfr_greater_p(x.lo().get(), y.hi().get())) return false;
    }
    return false;
}

bool certainly_below(const std::function<RealInterval(mpfr_prec_t)>& a,
                     const std::function<RealInterval(mpfr_prec_t)>& b) {
    for (mpfr_prec_t prec = 128; prec <= 4096; prec *= 2) {
        RealInterval x = a(prec);
        RealInterval y = b(prec);
        if (mpfr_less_p(x.hi().get(), y.lo().get())) return true;
        if (mpfr_greaterequal_p(x.lo().get(), y.hi().get())) return false;
    }
    return false;
}

double weight(const BaseInfo& base) {
    return static_cast<double>(base.m + 4) * base.log_beta.midpoint();
}

// Smallest step index i with t_i >= j.
std::size_t first_step_with(long j, LogBase log_base) {
    if (j <= 1) return 1;
    std::size_t guess;
    if (log_base == LogBase::Binary) {
        guess = (std::size_t{1} << (j - 1)) + 1;
    } else {
        RealInterval e = point(Rational(j - 1), 128).exp();
        guess = static_cast<std::size_t>(floor(e.lower()).get_ui()) + 1;
    }
    while (guess > 1 && pisot_t(guess - 1, log_base) >= j) --guess;
    while (pisot_t(guess, log_base) < j) ++guess;
    return guess;
}

}  // namespace

BaseInfo::BaseInfo(std::shared_ptr<const BetaSystem> sys, ZeroRunSource source)
    : system(std::move(sys)), log_beta(system->base()->interval(256).log()) {
    m = source == ZeroRunSource::Exact ? static_cast<std::size_t>(system->zero_run())
                                       : static_cast<std::size_t>(blichfeldt_bound(*system->base()).ceiling.get_ui());
}

ScheduleConditions check_schedule(const std::vector<BaseInfo>& raw, const std::vector<std::size_t>& effective,
                                  std::size_t i) {
    ScheduleConditions c;
    const BaseInfo& first = raw[effective.front()];
    FieldElement bound = first.beta().beta() * Rational(static_cast<unsigned long>(i));
    Rational m1(static_cast<unsigned long>(first.m));
    for (std::size_t r : effective) {
        const BaseInfo& b = raw[r];
        if (compare_cross_field(b.beta().beta(), bound) > 0) c.max_base = false;
        Rational mj(static_cast<unsigned long>(b.m));
        if (i == 1) {
            if (mj > m1 + 1) c.max_m = false;
        } else if (mj > m1 + 1) {
            bool ok = certainly_at_most([&](mpfr_prec_t p) { return point(mj, p); },
                                        [&](mpfr_prec_t p) { return point(m1 + 1, p) * (point(1, p) + log_of(i, p)); });
            if (!ok) c.max_m = false;
        }
    }
    if (effective.size() > 1) {
        auto lhs = [&](mpfr_prec_t p) {
            RealInterval sum = point(0, p);
            for (std::size_t r : effective) {
                sum = sum + point(Rational(static_cast<unsigned long>(raw[r].m + 4)), p) * log_beta(raw[r], p);
            }
            return sum;
        };
        auto rhs = [&](mpfr_prec_t p) {
            return point(Rational(static_cast<unsigned long>(first.m + 4)), p) * log_beta(first, p) *
                   (point(1, p) + log_of(i, p));
        };
        c.weight = certainly_at_most(lhs, rhs);
    }
    return c;
}

std::vector<std::size_t> extend_schedule(const std::vector<BaseInfo>& raw, std::vector<std::size_t> effective,
                                         std::size_t length, std::size_t i) {
    if (effective.empty()) effective.push_back(0);
    std::size_t next = *std::max_element(effective.begin(), effective.end()) + 1;
    while (effective.size() < length) {
        if (next < raw.size()) {
            auto trial = effective;
            trial.push_back(next);
            if (check_schedule(raw, trial, i).all()) {
                effective = std::move(trial);
                ++next;
                continue;
            }
        }
        std::size_t lightest = effective.front();
        for (std::size_t r : effective) {
            if (weight(raw[r]) < weight(raw[lightest])) lightest = r;
        }
        effective.push_back(lightest);
    }
    return effective;
}

std::vector<std::size_t> pisot_schedule(const std::vector<BaseInfo>& raw, std::size_t i, LogBase log_base) {
    long t = pisot_t(i, log_base);
    std::vector<std::size_t> effective{0};
    for (long j = 2; j <= t; ++j) {
        effective = extend_schedule(raw, effective, static_cast<std::size_t>(j), first_step_with(j, log_base));
    }
    return effective;
}

SymbolicProduct& SymbolicProduct::operator*=(const SymbolicProduct& other) {
    factor *= other.factor;
    for (const auto& [r, e] : other.exponents) {
        exponents[r] += e;
        if (exponents[r] == 0) exponents.erase(r);
    }
    return *this;
}

RealInterval SymbolicProduct::log(const std::vector<BaseInfo>& raw, mpfr_prec_t prec) const {
    RealInterval sum = point(factor, prec).log();
    for (const auto& [r, e] : exponents) sum = sum + point(Rational(e), prec) * log_beta(raw[r], prec);
    return sum;
}

std::optional<FieldElement> SymbolicProduct::exact(const std::vector<BaseInfo>& raw) const {
    if (exponents.empty()) return raw.front().beta().constant(factor);
    const PisotNumber& first = raw[exponents.begin()->first].beta();
    bool integers = true;
    bool one_field = true;
    for (const auto& [r, e] : exponents) {
        if (!raw[r].beta().is_integer()) integers = false;
        if (!raw[r].beta().same_field(first)) one_field = false;
    }
    if (integers) {
        Rational value = factor;
        for (const auto& [r, e] : exponents) value *= pow(Rational(raw[r].beta().floor_beta()), e);
        return first.constant(value);
    }
    if (!one_field) return std::nullopt;
    FieldElement value = first.constant(factor);
    for (const auto& [r, e] : exponents) value *= first.beta().pow(e);
    return value;
}

std::string SymbolicProduct::to_string(const std::vector<BaseInfo>& raw) const {
    if (auto e = exact(raw); e && e->is_rational()) return pisotnorm::to_string(e->rational_value());
    std::string out = pisotnorm::to_string(factor);
    for (const auto& [r, e] : exponents) out += "*beta[" + raw[r].beta().label() + "]^" + std::to_string(e);
    return out;
}

SymbolicProduct pisot_delta(const std::vector<BaseInfo>& raw, const std::vector<std::size_t>& effective_next,
                            long t_i, long t_next) {
    SymbolicProduct d;
    d.factor = Rational(1, 4 * Integer(t_i) * pow(Integer(2), static_cast<unsigned long>(t_i + t_next)));
    auto take = [&](std::size_t r) {
        d.exponents[r] -= static_cast<long>(raw[r].m + 4);
    };
    take(effective_next.front());
    for (long j = 0; j < t_i; ++j) take(effective_next[static_cast<std::size_t>(j)]);
    for (long j = 0; j < t_next; ++j) take(effective_next[static_cast<std::size_t>(j)]);
    return d;
}

RealInterval pisot_tail_log(const BaseInfo& base, const Rational& epsilon, std::size_t k, std::size_t n,
                            mpfr_prec_t prec) {
    Rational eta = eta_exponent(base.beta(), epsilon, k, base.m).lower;
    RealInterval b = base.beta().interval(prec);
    RealInterval lb = b.log();
    RealInterval out = point(4, prec).log() + point(2, prec) * (b / (b - point(1, prec))).log();
    out = out + point(Rational(static_cast<unsigned long>(k)), prec) * lb;
    out = out - point(Rational(static_cast<unsigned long>(n)) * eta, prec) * lb;
    return out;
}

std::size_t pisot_choose_n(const std::vector<BaseInfo>& raw, const std::vector<std::size_t>& effective_next,
                           long t_next, const Rational& epsilon, std::size_t k, const SymbolicProduct& delta) {
    std::vector<std::size_t> distinct(effective_next.begin(), effective_next.begin() + t_next);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::size_t n_min = 0;
    for (std::size_t r : distinct) n_min = std::max(n_min, raw[r].m + k);

    std::size_t best = n_min;
    for (std::size_t r : distinct) {
        const BaseInfo& base = raw[r];
        auto ok = [&](std::size_t n) {
            return certainly_below([&](mpfr_prec_t p) { return pisot_tail_log(base, epsilon, k, n, p); },
                                   [&](mpfr_prec_t p) { return delta.log(raw, p); });
        };
        double eta = eta_exponent(base.beta(), epsilon, k, base.m).lower.get_d();
        double lb = base.log_beta.midpoint();
        double gap = pisot_tail_log(base, epsilon, k, 0, 64).midpoint() - delta.log(raw, 64).midpoint();
        double estimate = std::max(0.0, std::ceil(gap / (eta * lb)));
        auto n = std::max(n_min, static_cast<std::size_t>(estimate));
        while (n > n_min && ok(n - 1)) --n;
        while (!ok(n)) ++n;
        best = std::max(best, n);
    }
    return best;
}

std::size_t pisot_v(const std::vector<BaseInfo>& raw, const std::vector<std::size_t>& effective, long t_i) {
    FieldElement b1 = raw[effective.front()].beta().beta();
    std::size_t v = 1;
    for (long j = 0; j < t_i; ++j) {
        FieldElement bj = raw[effective[static_cast<std::size_t>(j)]].beta().beta();
        // ceil(log bj / log b1) is the least c with b1^c >= bj.
        long c = 1;
        while (compare_cross_field(b1.pow(c), bj) < 0) ++c;
        v = std::max(v, static_cast<std::size_t>(c));
    }
    return v;
}

PisotState pisot_init(const std::vector<BaseInfo>& raw) {
    if (raw.empty()) throw Error(ErrorCode::InvalidArgument, "no bases");
    PisotState s;
    s.effective = {0};
    s.sequence.push_back(raw.front().system->cylinder({}));
    return s;
}

FeasibilityLedger verify_feasibility(const std::vector<BaseInfo>& raw, const PisotState& state,
                                     const std::vector<std::size_t>& effective_next, long t_next,
                                     const Rational& epsilon, std::size_t k, std::size_t n,
                                     const SymbolicProduct& delta, const PisotOptions& options) {
    (void)delta;
    FeasibilityLedger ledger;
    long t_i = state.t;
    ledger.s_factor.factor = Rational(1, pow(Integer(2), static_cast<unsigned long>(t_i + t_next + 1)));
    for (long j = 0; j < t_i; ++j) {
        std::size_t r = effective_next[static_cast<std::size_t>(j)];
        ledger.s_factor.exponents[r] -= static_cast<long>(raw[r].m + 4);
    }
    for (long j = 0; j < t_next; ++j) {
        std::size_t r = effective_next[static_cast<std::size_t>(j)];
        ledger.s_factor.exponents[r] -= static_cast<long>(raw[r].m + 4);
    }
    ledger.lambda_i1 = state.sequence.front().lebesgue;

    // Per-base bound on lambda(E^c_n), cached by raw index.
    std::map<std::size_t, std::function<RealInterval(mpfr_prec_t)>> bound;
    bool analytic = false;
    bool census = false;
    for (long j = 0; j < t_i; ++j) {
        std::size_t r = effective_next[static_cast<std::size_t>(j)];
        if (bound.count(r)) continue;
        const BaseInfo& base = raw[r];
        bool enumerable = options.mode == PisotMode::Scaled &&
                          base.system->count_words_exact(n) <= Integer(static_cast<unsigned long>(options.census_budget));
        if (enumerable) {
            census = true;
            CensusResult c = non_normal_census(*base.system, n, epsilon, k, 1, options.census_budget);
            FieldElement b = base.beta().beta();
            FieldElement lambda = b / (b - Rational(1)) * c.mass;
            bound[r] = [lambda](mpfr_prec_t p) { return lambda.enclosure(p); };
        } else {
            analytic = true;
            bound[r] = [&base, epsilon, k, n](mpfr_prec_t p) { return pisot_tail_log(base, epsilon, k, n, p).exp(); };
        }
    }
    ledger.n_source = analytic && census ? "mixed" : census ? "census" : "analytic";
    auto total = [&](mpfr_prec_t p) {
        RealInterval sum = point(0, p);
        for (long j = 0; j < t_i; ++j) sum = sum + bound[effective_next[static_cast<std::size_t>(j)]](p);
        return sum;
    };
    ledger.n_factor = total(128);
    ledger.feasible = certainly_below(total, [&](mpfr_prec_t p) { return ledger.s_factor.log(raw, p).exp(); });
    return ledger;
}

// ---------------------------------------------------------------------------
// Pisot: one step

namespace {

constexpr int kAccept = -1;
constexpr int kContinue = std::numeric_limits<int>::max();

// Valid range of |u_j| over all candidates, used to discard whole subtrees.
struct LengthRange {
    std::size_t lo = 0;
    std::size_t hi = 0;
    bool usable = false;
    std::map<std::size_t, CountBounds> bounds;
};

class PisotSearch {
public:
    PisotSearch(const std::vector<BaseInfo>& raw, const PisotState& state, std::vector<std::size_t> effective,
                long t_next, Rational epsilon, std::size_t k, Cylinder l, std::size_t extension, std::uint64_t budget)
        : raw_(raw), state_(state), effective_(std::move(effective)), t_prev_(state.t), t_next_(t_next),
          epsilon_(std::move(epsilon)), k_(k), l_(std::move(l)), ext_(extension), budget_(budget) {
        for (long j = 0; j < t_next_; ++j) table(pos(j));
        const BlockTable& t1 = table(pos(0));
        u1_ = suffix_after(l_.word, state_.sequence.front().order());
        len1_ = u1_.size() + ext_;
        CountBounds b = count_bounds(t1, epsilon_, len1_);
        for (std::size_t d = 0; d < t1.size(); ++d) {
            lo_.push_back(b.lo[d].get_si());
            hi_.push_back(b.hi[d].get_si());
        }
        counts_.assign(t1.size(), 0);
        for (std::size_t e = k_; e <= u1_.size(); ++e) ++counts_[t1.index_of(&u1_[e - k_])];
        u1_.reserve(len1_);
        build_completion();
        compute_ranges();
    }

    bool run() {
        path_.push_back(l_);
        if (!viable()) return false;
        return walk(0) == kAccept;
    }

    std::uint64_t leaves() const { return leaves_; }
    std::uint64_t pruned() const { return pruned_; }
    std::uint64_t ops() const { return ops_; }
    const std::vector<Cylinder>& accepted() const { return *accepted_; }
    Word extension() const { return Word(u1_.end() - static_cast<long>(ext_), u1_.end()); }
    const BlockTable& table(std::size_t r) {
        auto it = tables_.find(r);
        if (it == tables_.end()) it = tables_.emplace(r, std::make_shared<BlockTable>(*raw_[r].system, k_)).first;
        return *it->second;
    }

private:
    std::size_t pos(long j) const { return effective_[static_cast<std::size_t>(j)]; }

    static std::size_t blocks(std::size_t len, std::size_t k) { return len >= k ? len - k + 1 : 0; }

    bool viable() const {
        std::size_t placed = path_.size() - 1;
        std::size_t r = ext_ - placed;
        int ctx = ctx_.back();
        std::size_t remaining = blocks(len1_, k_) - blocks(u1_.size(), k_);
        long deficit = 0;
        for (std::size_t d = 0; d < counts_.size(); ++d) {
            auto c = static_cast<long>(counts_[d]);
            if (c + min_add(d, r, ctx) > hi_[d] || c + max_add(d, r, ctx) < lo_[d]) return false;
            deficit += std::max(0L, lo_[d] - c);
        }
        return static_cast<std::size_t>(deficit) <= remaining;
    }

    // Contexts are (automaton state, last k-1 digits of u_1); the tables give,
    // per block, the fewest and most occurrences r more admissible digits can add.
    void build_completion() {
        const Automaton& a = raw_[pos(0)].system->automaton();
        const BlockTable& t1 = table(pos(0));
        std::map<std::pair<int, Word>, int> ids;
        std::vector<std::pair<int, Word>> ctxs;
        auto id_of = [&](int q, Word w) {
            if (w.size() + 1 > k_) w.erase(w.begin(), w.begin() + static_cast<long>(w.size() + 1 - k_));
            auto key = std::make_pair(q, w);
            auto it = ids.find(key);
            if (it != ids.end()) return it->second;
            int id = static_cast<int>(ctxs.size());
            ids.emplace(key, id);
            ctxs.push_back(key);
            return id;
        };
        ctx_.push_back(id_of(l_.state, u1_));
        long alphabet = a.alphabet_max();
        for (std::size_t c = 0; c < ctxs.size(); ++c) {
            auto [q, w] = ctxs[c];
            std::vector<int> nx(static_cast<std::size_t>(alphabet + 1), -1);
            std::vector<std::size_t> blk(static_cast<std::size_t>(alphabet + 1), BlockTable::npos);
            for (int d = 0; d <= alphabet; ++d) {
                int q2 = a.step(q, d);
                if (q2 < 0) continue;
                Word w2 = w;
                w2.push_back(d);
                if (w2.size() >= k_) blk[static_cast<std::size_t>(d)] = t1.index_of(&w2[w2.size() - k_]);
                nx[static_cast<std::size_t>(d)] = id_of(q2, w2);
            }
            next_.push_back(std::move(nx));
            block_.push_back(std::move(blk));
        }
        std::size_t nctx = ctxs.size();
        std::size_t nblk = t1.size();
        max_add_.assign(nblk, std::vector<int>((ext_ + 1) * nctx, 0));
        min_add_.assign(nblk, std::vector<int>((ext_ + 1) * nctx, 0));
        for (std::size_t d = 0; d < nblk; ++d) {
            auto& mx = max_add_[d];
            auto& mn = min_add_[d];
            for (std::size_t r = 1; r <= ext_; ++r) {
                for (std::size_t c = 0; c < nctx; ++c) {
                    int best = -1;
                    int least = std::numeric_limits<int>::max();
                    for (std::size_t x = 0; x < next_[c].size(); ++x) {
                        int c2 = next_[c][x];
                        if (c2 < 0) continue;
                        int add = block_[c][x] == d ? 1 : 0;
                        std::size_t at = (r - 1) * nctx + static_cast<std::size_t>(c2);
                        best = std::max(best, add + mx[at]);
                        least = std::min(least, add + mn[at]);
                    }
                    mx[r * nctx + c] = std::max(best, 0);
                    mn[r * nctx + c] = least == std::numeric_limits<int>::max() ? 0 : least;
                }
            }
        }
        nctx_ = nctx;
    }

    long max_add(std::size_t d, std::size_t r, int ctx) const { return max_add_[d][r * nctx_ + static_cast<std::size_t>(ctx)]; }
    long min_add(std::size_t d, std::size_t r, int ctx) const { return min_add_[d][r * nctx_ + static_cast<std::size_t>(ctx)]; }

    void compute_ranges() {
        const BaseInfo& b1 = raw_[pos(0)];
        double l1 = b1.log_beta.midpoint();
        auto o1 = static_cast<double>(l_.order() + ext_);
        double log_max = -o1 * l1;
        double log_min = -(static_cast<double>(b1.m) + 1 + o1) * l1;
        ranges_.resize(static_cast<std::size_t>(t_prev_));
        for (long j = 1; j < t_prev_; ++j) {
            const BaseInfo& bj = raw_[pos(j)];
            double lj = bj.log_beta.midpoint();
            log_min -= std::log(2.0) + static_cast<double>(bj.m + 4) * lj;
            double o_min = std::floor(-log_max / lj - static_cast<double>(bj.m + 1)) - 2;
            double o_max = std::ceil(-log_min / lj) + 2;
            auto base = static_cast<double>(state_.sequence[static_cast<std::size_t>(j)].order());
            LengthRange& r = ranges_[static_cast<std::size_t>(j)];
            if (o_max - base < 0) continue;
            r.lo = static_cast<std::size_t>(std::max(0.0, o_min - base));
            r.hi = static_cast<std::size_t>(o_max - base);
            r.usable = true;
        }
    }

    int walk(std::size_t depth) {
        if (depth == ext_) return evaluate();
        const Cylinder& here = path_.back();
        const BetaSystem& sys = *raw_[pos(0)].system;
        int limit = sys.automaton().limit(here.state);
        const BlockTable& t1 = table(pos(0));
        for (int a = 0; a <= limit; ++a) {
            u1_.push_back(a);
            std::size_t idx = BlockTable::npos;
            if (u1_.size() >= k_) {
                idx = t1.index_of(&u1_[u1_.size() - k_]);
                ++counts_[idx];
            }
            ops_ += 3;
            int r = kContinue;
            path_.push_back(sys.extend(path_.back(), a));
            ctx_.push_back(next_[static_cast<std::size_t>(ctx_.back())][static_cast<std::size_t>(a)]);
            if (viable()) {
                r = walk(depth + 1);
            } else {
                ++pruned_;
            }
            ctx_.pop_back();
            path_.pop_back();
            if (idx != BlockTable::npos) --counts_[idx];
            if (r == kAccept) return kAccept;
            u1_.pop_back();
            if (r <= static_cast<int>(depth)) return r;
        }
        return kContinue;
    }

    int evaluate() {
        if (++leaves_ > budget_) {
            throw Error(ErrorCode::CandidateBudgetExceeded, "more than " + std::to_string(budget_) +
                                                                " candidates at step " + std::to_string(state_.i + 1));
        }
        std::vector<Cylinder> seq{path_.back()};
        for (long j = 1; j < t_next_; ++j) {
            if (pos(j) == pos(j - 1)) {
                seq.push_back(seq.back());
                continue;
            }
            InscribeOptions opts;
            if (j < t_prev_) opts.hint = &state_.sequence[static_cast<std::size_t>(j)];
            const Cylinder& outer = seq.back();
            seq.push_back(inscribed_beta_adic(*raw_[pos(j)].system, Interval{outer.left, outer.right}, opts));
            ops_ += 4 * (seq.back().order() - (opts.hint ? opts.hint->order() : 0)) + 8;
        }
        for (long j = 0; j < t_prev_; ++j) {
            const Cylinder& prev = state_.sequence[static_cast<std::size_t>(j)];
            const Cylinder& now = seq[static_cast<std::size_t>(j)];
            if (!is_prefix(prev.word, now.word)) throw Error(ErrorCode::FeasibilityViolated, "prefix property broken");
            Word u = suffix_after(now.word, prev.order());
            ops_ += u.size();
            NormalityReport rep = is_eps_k_normal(table(pos(j)), u, epsilon_);
            if (!rep.verdict) return j == 0 ? kContinue : doom(j, u);
        }
        accepted_ = std::move(seq);
        return kAccept;
    }

    // Shallowest node whose whole subtree fails for base position j.
    int doom(long j, const Word& u) {
        LengthRange& range = ranges_[static_cast<std::size_t>(j)];
        if (!range.usable || u.size() < range.lo || u.size() > range.hi) return kContinue;
        const BlockTable& tj = table(pos(j));
        std::vector<long> counts(tj.size(), 0);
        for (std::size_t len = 1; len <= u.size(); ++len) {
            if (len >= k_) ++counts[tj.index_of(&u[len - k_])];
            if (!doomed(range, tj, counts, len)) continue;
            const Cylinder& prev = state_.sequence[static_cast<std::size_t>(j)];
            Word w = prev.word;
            w.insert(w.end(), u.begin(), u.begin() + static_cast<long>(len));
            Cylinder c = raw_[pos(j)].system->cylinder(w);
            auto inside = [&](std::size_t depth) {
                const Cylinder& p = path_[depth];
                return compare_cross_field(p.left, c.left) >= 0 && compare_cross_field(p.right, c.right) <= 0;
            };
            if (!inside(ext_)) return kContinue;
            std::size_t lo = 0;
            std::size_t hi = ext_;
            while (lo < hi) {
                std::size_t mid = (lo + hi) / 2;
                if (inside(mid)) hi = mid;
                else lo = mid + 1;
            }
            ops_ += 4 * len;
            return static_cast<int>(lo);
        }
        return kContinue;
    }

    bool doomed(LengthRange& range, const BlockTable& tj, const std::vector<long>& counts, std::size_t len) {
        for (std::size_t total = std::max(len, range.lo); total <= range.hi; ++total) {
            auto it = range.bounds.find(total);
            if (it == range.bounds.end()) it = range.bounds.emplace(total, count_bounds(tj, epsilon_, total)).first;
            const CountBounds& b = it->second;
            long more = static_cast<long>(blocks(total, k_) - blocks(len, k_));
            bool fails = false;
            for (std::size_t d = 0; d < tj.size() && !fails; ++d) {
                if (counts[d] > b.hi[d].get_si() || counts[d] + more < b.lo[d].get_si()) fails = true;
            }
            if (!fails) return false;
        }
        return true;
    }

    const std::vector<BaseInfo>& raw_;
    const PisotState& state_;
    std::vector<std::size_t> effective_;
    long t_prev_;
    long t_next_;
    Rational epsilon_;
    std::size_t k_;
    Cylinder l_;
    std::size_t ext_;
    std::uint64_t budget_;

    std::map<std::size_t, std::shared_ptr<BlockTable>> tables_;
    Word u1_;
    std::size_t len1_ = 0;
    std::vector<long> lo_;
    std::vector<long> hi_;
    std::vector<std::size_t> counts_;
    std::vector<Cylinder> path_;
    std::vector<LengthRange> ranges_;
    std::vector<int> ctx_;
    std::vector<std::vector<int>> next_;
    std::vector<std::vector<std::size_t>> block_;
    std::vector<std::vector<int>> max_add_;
    std::vector<std::vector<int>> min_add_;
    std::size_t nctx_ = 0;
    std::optional<std::vector<Cylinder>> accepted_;
    std::uint64_t leaves_ = 0;
    std::uint64_t pruned_ = 0;
    std::uint64_t ops_ = 0;
};

template <class T>
const T& pick(const std::vector<T>& values, std::size_t index) {
    return values[std::min(index, values.size() - 1)];
}

Integer lex_rank(const BetaSystem& system, int state, const Word& w) {
    WordCounter counter(system.automaton());
    Integer rank = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (int a = 0; a < w[i]; ++a) {
            int next = system.automaton().step(state, a);
            if (next >= 0) rank += counter.from_state(next, w.size() - i - 1);
        }
        state = system.automaton().step(state, w[i]);
    }
    return rank;
}

void check_nested(const Cylinder& outer, const Cylinder& inner, const BaseInfo& inner_base, const std::string& what) {
    if (compare_cross_field(inner.left, outer.left) < 0 || compare_cross_field(inner.right, outer.right) > 0) {
        throw Error(ErrorCode::FeasibilityViolated, what + " is not nested");
    }
    FieldElement scaled = inner.lebesgue * inner_base.beta().beta().pow(static_cast<long>(inner_base.m + 4)) * Rational(2);
    if (compare_cross_field(scaled, outer.lebesgue) < 0) {
        throw Error(ErrorCode::FeasibilityViolated, what + " breaks the shrink ratio bound");
    }
}

}  // namespace

PisotTrace pisot_step(const std::vector<BaseInfo>& raw, PisotState& state, const PisotOptions& options) {
    auto start = Clock::now();
    PisotTrace trace;
    std::size_t i = state.i;
    long t_prev = state.t;
    std::size_t slot = i - 1;  // profile entry for step i + 1
    bool scaled = options.mode == PisotMode::Scaled;
    const Profile& prof = options.profile;
    trace.step = i + 1;
    trace.scaled = scaled;

    long t_next = scaled && !prof.t.empty() ? pick(prof.t, slot) : pisot_t(i + 1, options.log_base);
    if (t_next < 1) throw Error(ErrorCode::InvalidArgument, "profile t must be positive");
    Rational epsilon = scaled && !prof.epsilon.empty() ? pick(prof.epsilon, slot) : Rational(1, t_next);
    std::size_t k = scaled && !prof.k.empty() ? pick(prof.k, slot) : static_cast<std::size_t>(t_next);
    std::vector<std::size_t> effective = extend_schedule(raw, state.effective, static_cast<std::size_t>(t_next), i + 1);

    trace.t = t_next;
    trace.epsilon = epsilon;
    trace.k = k;
    trace.effective = effective;
    trace.delta = pisot_delta(raw, effective, t_prev, t_next);
    trace.n_exact = pisot_choose_n(raw, effective, t_next, epsilon, k, trace.delta);
    trace.n = scaled && !prof.n.empty() ? pick(prof.n, slot) : trace.n_exact;
    trace.v = pisot_v(raw, state.effective, t_prev);
    trace.ledger = verify_feasibility(raw, state, effective, t_next, epsilon, k, trace.n, trace.delta, options);
    if (!scaled && !trace.ledger.feasible) {
        throw Error(ErrorCode::FeasibilityViolated, "lambda(N) < lambda(S) not certified at step " + std::to_string(i + 1));
    }

    const BaseInfo& b1 = raw[effective.front()];
    const Cylinder& last = state.sequence.back();
    InscribeOptions opts;
    opts.hint = &state.sequence.front();
    trace.l = inscribed_beta_adic(*b1.system, Interval{last.left, last.right}, opts);
    check_nested(last, *trace.l, b1, "L");
    trace.extension = trace.v * trace.n;

    PisotSearch search(raw, state, effective, t_next, epsilon, k, *trace.l, trace.extension, options.candidate_budget);
    bool found = search.run();
    trace.candidates = search.leaves();
    trace.pruned = search.pruned();
    if (!found) {
        throw Error(ErrorCode::NoCandidateAccepted, "no t-sequence accepted at step " + std::to_string(i + 1));
    }
    trace.sequence = search.accepted();
    trace.accepted_index = lex_rank(*b1.system, trace.l->state, search.extension());

    for (std::size_t j = 1; j < trace.sequence.size(); ++j) {
        check_nested(trace.sequence[j - 1], trace.sequence[j], raw[effective[j]], "J_" + std::to_string(j + 1));
    }
    for (std::size_t j = 0; j < trace.sequence.size(); ++j) {
        PisotBlockReport rep;
        rep.position = j + 1;
        rep.raw_index = effective[j];
        rep.checked = static_cast<long>(j) < t_prev;
        std::size_t from = rep.checked ? state.sequence[j].order() : 0;
        rep.block = suffix_after(trace.sequence[j].word, from);
        rep.normality = is_eps_k_normal(search.table(effective[j]), rep.block, epsilon);
        if (rep.checked && !rep.normality.verdict) {
            throw Error(ErrorCode::NoCandidateAccepted, "accepted block fails the normality check");
        }
        trace.blocks.push_back(std::move(rep));
    }

    state.i += 1;
    state.t = t_next;
    state.epsilon = epsilon;
    state.k = k;
    state.n = trace.n;
    state.v = trace.v;
    state.delta = trace.delta;
    state.effective = effective;
    state.sequence = trace.sequence;
    trace.op_delta = search.ops() + 64;
    state.op_counter += trace.op_delta;
    trace.seconds = seconds_since(start);
    return trace;
}

}  // namespace pisotnorm
