#include "pisotnorm/beta_system.hpp"

#include "pisotnorm/normality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pisotnorm {

std::string word_to_string(const Word& w, long alphabet_max) {
    std::string out;
    bool compact = alphabet_max <= 9;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!compact && i > 0) out.push_back(',');
        out += std::to_string(w[i]);
    }
    return out;
}

Word parse_word(const std::string& text, long alphabet_max) {
    Word w;
    if (text.find(',') != std::string::npos || alphabet_max > 9) {
        std::stringstream in(text);
        std::string item;
        while (std::getline(in, item, ',')) {
            if (item.empty()) continue;
            w.push_back(std::stoi(item));
        }
    } else {
        for (char c : text) {
            if (c < '0' || c > '9') throw Error(ErrorCode::InvalidArgument, "bad digit in word '" + text + "'");
            w.push_back(c - '0');
        }
    }
    for (int d : w) {
        if (d < 0 || d > alphabet_max) {
            throw Error(ErrorCode::InvalidArgument, "digit " + std::to_string(d) + " outside the alphabet");
        }
    }
    return w;
}

StepResult t_beta_step(const FieldElement& x) {
    if (x.sign() < 0 || compare(x, Rational(1)) >= 0) {
        throw Error(ErrorCode::OutOfUnitInterval, x.to_string());
    }
    FieldElement y = x.base()->beta() * x;
    Integer digit = y.floor();
    return {static_cast<int>(digit.get_si()), y - Rational(digit)};
}

int ExpansionOfOne::dstar_digit(std::size_t i) const {
    std::size_t v = dstar_preperiod.size();
    if (i <= v) return dstar_preperiod[i - 1];
    return dstar_period[(i - v - 1) % dstar_period.size()];
}

ExpansionOfOne expansion_of_one(const PisotPtr& beta, std::optional<std::size_t> budget) {
    std::size_t limit = budget ? *budget : static_cast<std::size_t>(blichfeldt_bound(*beta).ceiling.get_ui());
    ExpansionOfOne e;
    std::map<std::vector<Rational>, std::size_t> seen;
    FieldElement x = beta->one();
    e.orbit.push_back(x);
    seen.emplace(x.coefficients(), 0);
    while (true) {
        FieldElement y = beta->beta() * x;
        Integer digit = y.floor();
        e.d1.push_back(static_cast<int>(digit.get_si()));
        x = y - Rational(digit);
        if (x.is_zero()) {
            e.finite = true;
            e.orbit.push_back(x);
            e.orbit_preperiod = e.orbit.size() - 1;
            e.orbit_period = 1;
            e.dstar_period = e.d1;
            e.dstar_period.back() -= 1;
            break;
        }
        auto [it, inserted] = seen.emplace(x.coefficients(), e.orbit.size());
        if (!inserted) {
            std::size_t j = it->second;
            e.orbit_preperiod = j;
            e.orbit_period = e.orbit.size() - j;
            e.dstar_preperiod.assign(e.d1.begin(), e.d1.begin() + static_cast<long>(j));
            e.dstar_period.assign(e.d1.begin() + static_cast<long>(j), e.d1.end());
            break;
        }
        e.orbit.push_back(x);
        if (e.orbit.size() > limit) {
            throw Error(ErrorCode::OrbitBudgetExceeded,
                        "orbit of 1 exceeds " + std::to_string(limit) + " points for " + beta->label());
        }
    }
    Word window = e.dstar_preperiod;
    window.insert(window.end(), e.dstar_period.begin(), e.dstar_period.end());
    window.insert(window.end(), e.dstar_period.begin(), e.dstar_period.end());
    int run = 0;
    for (int d : window) {
        run = d == 0 ? run + 1 : 0;
        e.zero_run = std::max(e.zero_run, run);
    }
    return e;
}

Automaton::Automaton(const ExpansionOfOne& e) : alphabet_max_(0) {
    std::size_t v = e.dstar_preperiod.size();
    std::size_t total = v + e.dstar_period.size();
    for (std::size_t q = 0; q < total; ++q) {
        limit_.push_back(e.dstar_digit(q + 1));
        tight_.push_back(q + 1 < total ? static_cast<int>(q + 1) : static_cast<int>(v));
        alphabet_max_ = std::max<long>(alphabet_max_, limit_.back());
    }
}

int Automaton::step(int q, int digit) const {
    int lim = limit_[static_cast<std::size_t>(q)];
    if (digit < 0 || digit > lim) return -1;
    return digit < lim ? 0 : tight_[static_cast<std::size_t>(q)];
}

int Automaton::run(const Word& w, int from) const {
    int q = from;
    for (int d : w) {
        q = step(q, d);
        if (q < 0) return -1;
    }
    return q;
}

WordCounter::WordCounter(const Automaton& a) : automaton_(&a) {
    table_.emplace_back(static_cast<std::size_t>(a.states()), Integer(1));
}

const Integer& WordCounter::from_state(int q, std::size_t n) {
    while (table_.size() <= n) {
        const auto& prev = table_.back();
        std::vector<Integer> row(prev.size());
        for (int s = 0; s < automaton_->states(); ++s) {
            int lim = automaton_->limit(s);
            row[static_cast<std::size_t>(s)] =
                prev[0] * lim + prev[static_cast<std::size_t>(automaton_->step(s, lim))];
        }
        table_.push_back(std::move(row));
    }
    return table_[n][static_cast<std::size_t>(q)];
}

namespace {

std::vector<FieldElement> solve_followers(const PisotPtr& beta, const Automaton& a) {
    auto n = static_cast<std::size_t>(a.states());
    FieldElement zero = beta->zero();
    FieldElement inv = beta->inverse();
    // F_q - beta^{-1} (limit_q F_0 + F_tight(q)) = 0, with row 0 replaced by F_0 = 1.
    std::vector<std::vector<FieldElement>> m(n, std::vector<FieldElement>(n + 1, zero));
    m[0][0] = beta->one();
    m[0][n] = beta->one();
    for (std::size_t q = 1; q < n; ++q) {
        int lim = a.limit(static_cast<int>(q));
        auto tight = static_cast<std::size_t>(a.step(static_cast<int>(q), lim));
        m[q][q] += beta->one();
        m[q][0] -= inv * Rational(lim);
        m[q][tight] -= inv;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col].is_zero()) ++pivot;
        if (pivot == n) throw Error(ErrorCode::InvalidArgument, "singular follower system");
        std::swap(m[pivot], m[col]);
        FieldElement p = m[col][col].inverse();
        for (auto& x : m[col]) x *= p;
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || m[row][col].is_zero()) continue;
            FieldElement f = m[row][col];
            for (std::size_t j = col; j <= n; ++j) m[row][j] -= f * m[col][j];
        }
    }
    std::vector<FieldElement> out;
    for (std::size_t q = 0; q < n; ++q) out.push_back(m[q][n]);
    return out;
}

}  // namespace

BetaSystem::BetaSystem(PisotPtr beta, std::optional<std::size_t> orbit_budget)
    : beta_(std::move(beta)),
      expansion_(expansion_of_one(beta_, orbit_budget)),
      automaton_(expansion_),
      follower_(solve_followers(beta_, automaton_)),
      parry_(std::make_shared<const ParryMeasure>(beta_, expansion_)),
      counter_(std::make_unique<WordCounter>(automaton_)) {
    inverse_powers_.push_back(beta_->one());
}

FieldElement BetaSystem::inverse_power(std::size_t n) const {
    std::lock_guard<std::mutex> lock(power_mutex_);
    while (inverse_powers_.size() <= n) {
        inverse_powers_.push_back(inverse_powers_.back() * beta_->inverse());
    }
    return inverse_powers_[n];
}

Integer BetaSystem::count_words_exact(std::size_t n) const {
    std::lock_guard<std::mutex> lock(counter_mutex_);
    return counter_->total(n);
}

std::size_t BetaSystem::count_words(std::size_t n) const {
    Integer c = count_words_exact(n);
    if (!c.fits_ulong_p()) throw Error(ErrorCode::EnumerationBudgetExceeded, "|L_n| does not fit in 64 bits");
    return c.get_ui();
}

Cylinder BetaSystem::cylinder(const Word& w) const {
    int state = automaton_.run(w);
    if (state < 0) {
        throw Error(ErrorCode::Inadmissible, word_to_string(w, alphabet_max()));
    }
    FieldElement inv = beta_->inverse();
    FieldElement left = beta_->zero();
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        left = (left + Rational(*it)) * inv;
    }
    FieldElement length = inverse_power(w.size()) * follower_[static_cast<std::size_t>(state)];
    FieldElement right = left + length;
    return {w, state, std::move(left), std::move(right), std::move(length)};
}

Cylinder BetaSystem::extend(const Cylinder& c, int digit) const {
    int state = automaton_.step(c.state, digit);
    if (state < 0) {
        Word w = c.word;
        w.push_back(digit);
        throw Error(ErrorCode::Inadmissible, word_to_string(w, alphabet_max()));
    }
    FieldElement scale = inverse_power(c.order() + 1);
    Cylinder out{c.word, state, c.left + scale * Rational(digit), beta_->zero(), scale * follower_[static_cast<std::size_t>(state)]};
    out.word.push_back(digit);
    out.right = out.left + out.lebesgue;
    return out;
}

std::optional<Word> BetaSystem::successor(const Word& w) const {
    std::vector<int> states{0};
    for (int d : w) {
        states.push_back(automaton_.step(states.back(), d));
        if (states.back() < 0) throw Error(ErrorCode::Inadmissible, word_to_string(w, alphabet_max()));
    }
    for (std::size_t i = w.size(); i-- > 0;) {
        if (w[i] < automaton_.limit(states[i])) {
            Word next(w.begin(), w.begin() + static_cast<long>(i));
            next.push_back(w[i] + 1);
            next.resize(w.size(), 0);
            return next;
        }
    }
    return std::nullopt;
}

Cylinder BetaSystem::locate_next(const Cylinder& c, const FieldElement& x) const {
    if (x.base()->same_field(*beta_)) {
        FieldElement here(beta_, x.coefficients());
        FieldElement y = (here - c.left) * beta_->beta().pow(static_cast<long>(c.order() + 1));
        Integer digit = y.floor();
        long d = std::min<long>(digit.get_si(), automaton_.limit(c.state));
        return extend(c, static_cast<int>(std::max<long>(d, 0)));
    }
    FieldElement scale = inverse_power(c.order() + 1);
    for (int d = automaton_.limit(c.state); d > 0; --d) {
        if (compare_cross_field(c.left + scale * Rational(d), x) <= 0) return extend(c, d);
    }
    return extend(c, 0);
}

Cylinder BetaSystem::locate(const FieldElement& x, std::size_t n) const {
    if (compare(x, Rational(0)) < 0 || compare(x, Rational(1)) >= 0) {
        throw Error(ErrorCode::OutOfUnitInterval, x.to_string());
    }
    if (x.base()->same_field(*beta_)) {
        Word w;
        FieldElement y(beta_, x.coefficients());
        for (std::size_t i = 0; i < n; ++i) {
            auto s = t_beta_step(y);
            w.push_back(s.digit);
            y = s.next;
        }
        return cylinder(w);
    }
    Cylinder c = cylinder({});
    for (std::size_t i = 0; i < n; ++i) c = locate_next(c, x);
    return c;
}

void BetaSystem::enumerate(std::size_t n, const std::function<bool(const Cylinder&)>& visit, std::size_t budget) const {
    std::size_t visited = 0;
    bool stop = false;
    std::function<void(const Cylinder&)> walk = [&](const Cylinder& c) {
        if (stop) return;
        if (c.order() == n) {
            if (++visited > budget) {
                throw Error(ErrorCode::EnumerationBudgetExceeded, "more than " + std::to_string(budget) + " cylinders");
            }
            if (!visit(c)) stop = true;
            return;
        }
        for (int d = 0; d <= automaton_.limit(c.state) && !stop; ++d) walk(extend(c, d));
    };
    walk(cylinder({}));
}

FieldElement BetaSystem::parry_measure(const FieldElement& left, const FieldElement& right) const {
    return parry_->measure(left, right);
}

ParryMeasure::ParryMeasure(const PisotPtr& beta, const ExpansionOfOne& e)
    : points_(e.orbit), normalizer_(beta->zero()) {
    FieldElement inv = beta->inverse();
    FieldElement cycle = (beta->one() - inv.pow(static_cast<long>(e.orbit_period))).inverse();
    FieldElement w = beta->one();
    for (std::size_t j = 0; j < points_.size(); ++j) {
        weights_.push_back(j < e.orbit_preperiod ? w : w * cycle);
        w *= inv;
        normalizer_ += weights_.back() * points_[j];
    }
    std::vector<FieldElement> bp = points_;
    bp.push_back(beta->zero());
    bp.push_back(beta->one());
    std::sort(bp.begin(), bp.end(), [](const FieldElement& a, const FieldElement& b) { return compare(a, b) < 0; });
    for (auto& p : bp) {
        if (breakpoints_.empty() || compare(breakpoints_.back(), p) != 0) breakpoints_.push_back(p);
    }
    FieldElement scale = normalizer_.inverse();
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
        FieldElement h = beta->zero();
        for (std::size_t j = 0; j < points_.size(); ++j) {
            if (compare(points_[j], breakpoints_[i + 1]) >= 0) h += weights_[j];
        }
        densities_.push_back(h * scale);
    }
}

FieldElement ParryMeasure::measure(const FieldElement& left, const FieldElement& right) const {
    FieldElement total = normalizer_ - normalizer_;
    for (std::size_t j = 0; j < points_.size(); ++j) {
        const FieldElement& x = points_[j];
        if (compare(x, left) <= 0) continue;
        const FieldElement& top = compare(right, x) < 0 ? right : x;
        total += weights_[j] * (top - left);
    }
    return total / normalizer_;
}

std::size_t smallest_order_below(const BetaSystem& system, const FieldElement& length) {
    if (length.sign() <= 0) {
        throw Error(ErrorCode::EmptyInterval, "non-positive length");
    }
    const auto& beta = system.base();
    double estimate = -length.approx_log2() / std::log2(beta->approx());
    auto m = static_cast<std::size_t>(std::max(0.0, std::ceil(estimate)));
    auto below = [&](std::size_t k) { return compare_cross_field(system.inverse_power(k), length) < 0; };
    while (m > 0 && below(m - 1)) --m;
    while (!below(m)) ++m;
    return m;
}

Cylinder inscribed_beta_adic(const BetaSystem& system, const Interval& interval, const InscribeOptions& options) {
    const FieldElement& a = interval.left;
    const FieldElement& b = interval.right;
    if (compare(a, Rational(0)) < 0 || compare(b, Rational(1)) > 0) {
        throw Error(ErrorCode::EmptyInterval, "interval not inside [0,1]");
    }
    FieldElement length = b - a;
    if (length.sign() <= 0) {
        throw Error(ErrorCode::EmptyInterval, "[" + a.to_string() + ", " + b.to_string() + ")");
    }
    std::size_t m = smallest_order_below(system, length);
    auto zeros = static_cast<std::size_t>(system.zero_run());
    // No cylinder of order below m - M - 2 is short enough to fit.
    std::size_t order = m > zeros + 2 ? m - zeros - 2 : 0;

    Cylinder c = system.cylinder({});
    if (options.hint != nullptr) {
        std::size_t keep = std::min(order, options.hint->order());
        if (keep == options.hint->order()) {
            c = *options.hint;
        } else {
            c = system.cylinder(Word(options.hint->word.begin(), options.hint->word.begin() + static_cast<long>(keep)));
        }
    }
    while (c.order() < order) c = system.locate_next(c, a);

    // A fit always exists by order m + 3; the margin only guards against misuse.
    for (std::size_t limit = m + 3 + 64; order <= limit; ++order) {
        std::optional<Cylinder> candidate;
        if (compare_cross_field(c.left, a) == 0) {
            candidate = c;
        } else if (auto next = system.successor(c.word)) {
            candidate = system.cylinder(*next);
        }
        if (candidate && compare_cross_field(candidate->right, b) <= 0) {
            return *candidate;
        }
        c = system.locate_next(c, a);
    }
    throw Error(ErrorCode::EmptyInterval, "no cylinder found inside the interval");
}

}  // namespace pisotnorm
