#include "pisotnorm/normality.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace pisotnorm {

std::size_t count_occurrences(const Word& w, const Word& d, std::size_t n) {
    n = std::min(n, w.size());
    if (d.empty() || d.size() > n) return 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + d.size() <= n; ++i) {
        if (std::equal(d.begin(), d.end(), w.begin() + static_cast<long>(i))) ++count;
    }
    return count;
}

Rational simple_discrepancy(const Word& u, int b) {
    if (u.empty()) {
        throw Error(ErrorCode::EmptyWord, "simple discrepancy of an empty word");
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(b));
    for (int d : u) {
        if (d < 0 || d >= b) throw Error(ErrorCode::InvalidArgument, "digit outside base");
        ++counts[static_cast<std::size_t>(d)];
    }
    Rational worst = 0;
    Rational n(static_cast<unsigned long>(u.size()));
    for (auto c : counts) {
        Rational dev = abs(Rational(static_cast<unsigned long>(c)) / n - Rational(1, b));
        worst = std::max(worst, dev);
    }
    return worst;
}

BlockTable::BlockTable(const BetaSystem& system, std::size_t k)
    : k_(k), radix_(static_cast<std::size_t>(system.alphabet_max()) + 1) {
    system.enumerate(k, [&](const Cylinder& c) {
        blocks_.push_back(c.word);
        measures_.push_back(system.parry_measure(c));
        return true;
    });
    double space = std::pow(static_cast<double>(radix_), static_cast<double>(k));
    if (space <= static_cast<double>(1u << 22)) {
        dense_.assign(static_cast<std::size_t>(space), npos);
        for (std::size_t i = 0; i < blocks_.size(); ++i) dense_[encode(blocks_[i].data())] = i;
    } else {
        for (std::size_t i = 0; i < blocks_.size(); ++i) sparse_.emplace(encode(blocks_[i].data()), i);
    }
}

std::size_t BlockTable::encode(const int* digits) const {
    std::size_t code = 0;
    for (std::size_t i = 0; i < k_; ++i) code = code * radix_ + static_cast<std::size_t>(digits[i]);
    return code;
}

std::size_t BlockTable::index_of(const int* digits) const {
    std::size_t code = encode(digits);
    if (!dense_.empty()) return dense_[code];
    auto it = sparse_.find(code);
    return it == sparse_.end() ? npos : it->second;
}

void BlockTable::add_counts(const int* digits, std::size_t n, std::vector<std::size_t>& out) const {
    for (std::size_t i = 0; i + k_ <= n; ++i) {
        std::size_t idx = index_of(digits + i);
        if (idx == npos) throw Error(ErrorCode::Inadmissible, "word contains an inadmissible block");
        ++out[idx];
    }
}

std::vector<std::size_t> BlockTable::counts(const Word& w, std::size_t n) const {
    std::vector<std::size_t> out(blocks_.size());
    add_counts(w.data(), std::min(n, w.size()), out);
    return out;
}

CountBounds count_bounds(const BlockTable& table, const Rational& epsilon, std::size_t n) {
    CountBounds b;
    Rational len(static_cast<unsigned long>(n));
    for (std::size_t i = 0; i < table.size(); ++i) {
        const FieldElement& mu = table.measure(i);
        b.lo.push_back((mu * ((1 - epsilon) * len)).floor() + 1);
        b.hi.push_back(-(mu * (-(1 + epsilon) * len)).floor() - 1);
    }
    return b;
}

NormalityReport is_eps_k_normal(const BlockTable& table, const Word& w, const Rational& epsilon) {
    NormalityReport report;
    std::size_t n = w.size();
    report.length = n;
    auto counts = table.counts(w, n);
    auto bounds = count_bounds(table, epsilon, n);
    std::size_t worst = 0;
    bool worst_violates = false;
    double worst_dev = -1;
    for (std::size_t i = 0; i < table.size(); ++i) {
        Integer c = static_cast<unsigned long>(counts[i]);
        bool ok = bounds.lo[i] <= c && c <= bounds.hi[i];
        double expected = table.measure(i).approx() * static_cast<double>(n);
        double dev = expected > 0 ? std::abs(static_cast<double>(counts[i]) / expected - 1.0) : 0.0;
        bool better = (!ok && !worst_violates) || (ok == !worst_violates && dev > worst_dev);
        if (better) {
            worst = i;
            worst_dev = dev;
            worst_violates = !ok;
        }
        if (!ok) report.verdict = false;
    }
    if (table.size() > 0) {
        report.worst_block = table.block(worst);
        report.worst_ratio = n > 0 ? Rational(static_cast<unsigned long>(counts[worst]), static_cast<unsigned long>(n))
                                   : Rational(0);
        report.worst_ratio.canonicalize();
        report.worst_deviation = worst_dev;
    }
    return report;
}

NormalityReport is_eps_k_normal(const BetaSystem& system, const Word& w, const Rational& epsilon, std::size_t k) {
    return is_eps_k_normal(BlockTable(system, k), w, epsilon);
}

FieldElement block_frequency_deviation(const BlockTable& table, const Word& w) {
    if (w.empty()) throw Error(ErrorCode::EmptyWord, "deviation of an empty word");
    auto counts = table.counts(w, w.size());
    std::optional<FieldElement> worst;
    for (std::size_t i = 0; i < table.size(); ++i) {
        Rational freq(static_cast<unsigned long>(counts[i]), static_cast<unsigned long>(w.size()));
        freq.canonicalize();
        FieldElement dev = table.measure(i) - freq;
        if (dev.sign() < 0) dev = -dev;
        if (!worst || compare(dev, *worst) > 0) worst = dev;
    }
    return *worst;
}

BlichfeldtBound blichfeldt_bound(const PisotNumber& beta) {
    const mpfr_prec_t prec = 256;
    int d = beta.degree();
    int r = beta.real_embeddings();
    int s = beta.complex_pairs();
    Rational c = 1 + Rational(beta.floor_beta()) / (1 - beta.conjugate_modulus_bound());
    RealInterval disc = RealInterval::point(Rational(abs(beta.discriminant())), prec).sqrt();
    RealInterval value = RealInterval::point(Rational(factorial(static_cast<unsigned long>(d))), prec) / disc;
    value = value * RealInterval::point(pow(Rational(2), r + s - 1), prec);
    RealInterval pi = RealInterval::pi(prec);
    for (int i = 0; i < s; ++i) value = value * pi;
    value = value * RealInterval::point(pow(c, r + 2 * s - 1), prec);
    value = value + RealInterval::point(Rational(d), prec);
    BlichfeldtBound out;
    out.value = value.upper();
    out.ceiling = ceil(out.value);
    return out;
}

EtaBounds eta_exponent(const PisotNumber& beta, const Rational& epsilon, std::size_t k, std::size_t m) {
    const mpfr_prec_t prec = 192;
    RealInterval b = beta.interval(prec);
    RealInterval one = RealInterval::point(1, prec);
    RealInterval bk = one;
    for (std::size_t i = 0; i < k; ++i) bk = bk * b;
    RealInterval eps = RealInterval::point(epsilon, prec);
    RealInterval first = eps * bk / RealInterval::point(16, prec);
    RealInterval numerator = eps * first.min(RealInterval::point(Rational(3, 4), prec));
    RealInterval denominator = (b / (b - one)).log() +
                               RealInterval::point(Rational(static_cast<unsigned long>(m + 1)), prec) * b.log();
    RealInterval eta = numerator / denominator;
    return {eta.lower(), eta.upper()};
}

ConstantsBundle constants(const BetaSystem& system, const Rational& epsilon, std::size_t k, ZeroRunSource source) {
    const auto& beta = *system.base();
    ConstantsBundle out{0, blichfeldt_bound(beta), 0, 0, {}, beta.zero(), 0};
    out.m_exact = system.zero_run();
    out.c_big = 1 + Rational(beta.floor_beta()) / (1 - beta.conjugate_modulus_bound());
    out.m_used = source == ZeroRunSource::Exact ? static_cast<std::size_t>(out.m_exact)
                                                : static_cast<std::size_t>(out.blichfeldt.ceiling.get_ui());
    out.eta = eta_exponent(beta, epsilon, k, out.m_used);
    FieldElement b = beta.beta();
    out.c_corollary = b.pow(static_cast<long>(out.m_used + 1)) * b / (b - Rational(1)) *
                      Rational(4 * system.count_words_exact(k));
    out.n0 = out.m_used + k;
    return out;
}

namespace {

struct CensusPartial {
    Integer count = 0;
    std::vector<Word> non_normal;
};

class CensusWalker {
public:
    CensusWalker(const BetaSystem& system, const BlockTable& table, const CountBounds& bounds, std::size_t n)
        : automaton_(system.automaton()), table_(table), bounds_(bounds), n_(n), counts_(table.size()) {
        word_.reserve(n);
    }

    void run(const Word& prefix, CensusPartial& out) {
        word_.clear();
        std::fill(counts_.begin(), counts_.end(), 0);
        int q = 0;
        for (int d : prefix) {
            q = automaton_.step(q, d);
            push(d);
        }
        walk(q, out);
    }

private:
    void push(int d) {
        word_.push_back(d);
        if (word_.size() >= table_.k()) ++counts_[table_.index_of(word_.data() + word_.size() - table_.k())];
    }

    void pop() {
        if (word_.size() >= table_.k()) --counts_[table_.index_of(word_.data() + word_.size() - table_.k())];
        word_.pop_back();
    }

    bool normal() const {
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            if (bounds_.lo[i] > static_cast<unsigned long>(counts_[i]) ||
                bounds_.hi[i] < static_cast<unsigned long>(counts_[i])) {
                return false;
            }
        }
        return true;
    }

    void walk(int q, CensusPartial& out) {
        if (word_.size() == n_) {
            if (!normal()) {
                ++out.count;
                out.non_normal.push_back(word_);
            }
            return;
        }
        for (int d = 0; d <= automaton_.limit(q); ++d) {
            push(d);
            walk(automaton_.step(q, d), out);
            pop();
        }
    }

    const Automaton& automaton_;
    const BlockTable& table_;
    const CountBounds& bounds_;
    std::size_t n_;
    Word word_;
    std::vector<std::size_t> counts_;
};

}  // namespace

CensusResult non_normal_census(const BetaSystem& system, std::size_t n, const Rational& epsilon, std::size_t k,
                               unsigned jobs, std::size_t budget) {
    CensusResult result{system.count_words_exact(n), 0, system.base()->zero()};
    if (result.total > static_cast<unsigned long>(budget)) {
        throw Error(ErrorCode::EnumerationBudgetExceeded,
                    "|L_" + std::to_string(n) + "| = " + result.total.get_str() + " exceeds " + std::to_string(budget));
    }
    BlockTable table(system, k);
    CountBounds bounds = count_bounds(table, epsilon, n);

    // Work units: admissible prefixes of a fixed length, assigned round-robin.
    jobs = std::max(1u, jobs);
    std::size_t depth = 0;
    while (depth < n && system.count_words(depth) < 8 * static_cast<std::size_t>(jobs)) ++depth;
    if (jobs == 1) depth = 0;
    std::vector<Word> prefixes;
    system.enumerate(depth, [&](const Cylinder& c) {
        prefixes.push_back(c.word);
        return true;
    });
    std::vector<CensusPartial> partials(jobs);
    auto work = [&](unsigned id) {
        CensusWalker walker(system, table, bounds, n);
        for (std::size_t i = id; i < prefixes.size(); i += jobs) walker.run(prefixes[i], partials[id]);
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned id = 0; id < jobs; ++id) threads.emplace_back(work, id);
        for (auto& t : threads) t.join();
    }
    const auto& beta = system.base();
    for (const auto& p : partials) {
        result.count += p.count;
        if (beta->is_integer()) continue;
        for (const auto& w : p.non_normal) result.mass += system.parry_measure(system.cylinder(w));
    }
    if (beta->is_integer()) {
        result.mass = beta->constant(Rational(result.count) / Rational(pow(beta->floor_beta(), n)));
    }
    return result;
}

CensusCheck check_census(const BetaSystem& system, const CensusResult& census, std::size_t n, const Rational& epsilon,
                         std::size_t k, ZeroRunSource source) {
    const mpfr_prec_t prec = 192;
    ConstantsBundle c = constants(system, epsilon, k, source);
    CensusCheck out;
    out.applicable = n >= c.n0;
    RealInterval log_ln = RealInterval::point(Rational(census.total), prec).log();
    RealInterval eta = RealInterval::point(c.eta.upper, prec);
    RealInterval lk = RealInterval::point(Rational(4 * system.count_words_exact(k)), prec);
    out.mass_bound = (lk * (-(eta * log_ln)).exp()).lower();
    RealInterval one = RealInterval::point(1, prec);
    out.count_bound = (c.c_corollary.enclosure(prec) * ((one - eta) * log_ln).exp()).lower();
    out.mass_ok = compare(census.mass, out.mass_bound) <= 0;
    out.count_ok = Rational(census.count) <= out.count_bound;
    return out;
}

Integer k_bhs(const Rational& epsilon, const Rational& delta, const Integer& t) {
    if (epsilon <= 0 || epsilon > 1 || delta <= 0 || delta >= 1 || t < 2) {
        throw Error(ErrorCode::InvalidArgument, "k_bhs requires 0<eps<=1, 0<delta<1, t>=2");
    }
    Integer first = ceil(6 / epsilon);
    Rational ratio = delta / (2 * Rational(t));
    Rational factor = 6 / (epsilon * epsilon);
    for (mpfr_prec_t prec = 128;; prec *= 2) {
        RealInterval v = -RealInterval::point(ratio, prec).log() * RealInterval::point(factor, prec);
        Integer lo = ceil(v.lower());
        Integer hi = ceil(v.upper());
        if (lo == hi) return std::max(first, lo) + 1;
    }
}

Rational extreme_discrepancy(std::vector<Rational> points) {
    if (points.empty()) throw Error(ErrorCode::EmptyWord, "discrepancy of an empty point set");
    std::sort(points.begin(), points.end());
    Rational n(static_cast<unsigned long>(points.size()));
    Rational hi, lo;
    for (std::size_t i = 0; i < points.size(); ++i) {
        Rational v = Rational(static_cast<unsigned long>(i + 1)) / n - points[i];
        if (i == 0 || v > hi) hi = v;
        if (i == 0 || v < lo) lo = v;
    }
    return 1 / n + hi - lo;
}

std::size_t default_guard(long b, std::size_t n) {
    // ceil(2 log_b n) + 32
    Integer target = Integer(static_cast<unsigned long>(n)) * static_cast<unsigned long>(n);
    std::size_t g = 0;
    Integer power = 1;
    while (power < target) {
        power *= b;
        ++g;
    }
    return g + 32;
}

OrbitPoints orbit_points(const Word& digits, long b, std::size_t n, std::optional<std::size_t> guard) {
    std::size_t g = guard ? *guard : default_guard(b, n);
    if (digits.size() < n + g) {
        throw Error(ErrorCode::InsufficientDigits, "need " + std::to_string(n + g) + " digits, have " +
                                                       std::to_string(digits.size()));
    }
    std::size_t len = digits.size();
    // Suffix values S_i = 0.d_{i+1} d_{i+2} ... d_len as integers over b^{len-i}.
    std::vector<Rational> suffix(n + 1);
    Integer num = 0;
    Integer den = 1;
    for (std::size_t i = len; i-- > 0;) {
        num += Integer(digits[i]) * den;
        den *= b;
        if (i <= n) {
            // num / den = 0.d_{i+1}... with 0-based digits[i] = d_{i+1}
            Rational q(num, den);
            q.canonicalize();
            suffix[i] = q;
        }
    }
    OrbitPoints out;
    for (std::size_t i = 1; i <= n; ++i) out.points.push_back(suffix[i]);
    out.error_bound = Rational(1, pow(Integer(b), static_cast<unsigned long>(len - n)));
    return out;
}

}  // namespace pisotnorm
