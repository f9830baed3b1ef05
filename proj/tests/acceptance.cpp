// Acceptance harness: one PASS/FAIL line per criterion. Exits 0 when the set
// of failing criteria equals the --expect-fail list (empty by default).

#include "naive.hpp"
#include "oracle.hpp"

#include "pisotnorm/generators.hpp"

#include <chrono>
#include <cstring>
#include <functional>
#include <iomanip>
#include <map>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace pisotnorm;

namespace {

struct Outcome {
    std::string id;
    std::string name;
    bool pass = true;
    std::string detail;
    double seconds = 0;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Base {
    const char* name;
    const char* poly;
    std::string dstar;  // quasi-greedy expansion of 1, one period; empty for integers
};

const std::vector<Base> kSix = {
    {"phi", "x^2-x-1", "10"},  {"plastic", "x^3-x-1", "10000"}, {"tribonacci", "x^3-x^2-x-1", "110"},
    {"2", "x-2", ""},          {"3", "x-3", ""},                {"10", "x-10", ""},
};

std::shared_ptr<const BetaSystem> sys(const char* poly) { return std::make_shared<const BetaSystem>(make_pisot(poly)); }

// Parry criterion with the periodic d*(1) written out by hand: every suffix
// of w is lexicographically at most the matching prefix of d*(1).
bool parry_admissible(const std::string& period, const std::vector<int>& w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = i; j < w.size(); ++j) {
            int d = period[(j - i) % period.size()] - '0';
            if (w[j] < d) break;
            if (w[j] > d) return false;
        }
    }
    return true;
}

Outcome c1() {
    Outcome o{"1", "cylinder measure bounds, n <= 10, six bases"};
    auto t0 = Clock::now();
    long violations = 0, checked = 0, closed_form = 0;
    for (const auto& b : kSix) {
        auto s = sys(b.poly);
        FieldElement beta = s->base()->beta();
        for (std::size_t n = 1; n <= 10; ++n) {
            FieldElement hi = s->inverse_power(n);
            FieldElement lo = hi * s->inverse_power(static_cast<std::size_t>(s->zero_run()) + 1);
            if (s->count_words_exact(n) <= 100000) {
                FieldElement sum = s->base()->zero();
                s->enumerate(n, [&](const Cylinder& c) {
                    ++checked;
                    if (!(lo <= c.lebesgue && c.lebesgue <= hi)) ++violations;
                    sum += c.lebesgue;
                    return true;
                });
                if (compare(sum, Rational(1)) != 0) ++violations;
            } else {
                // integer base: [w/b^n, (w+1)/b^n) for every w; spot-check the library
                Rational m = 1 / Rational(pow(Integer(10), n));
                if (!(lo <= s->base()->constant(m) && s->base()->constant(m) <= hi)) ++violations;
                std::mt19937_64 rng(n);
                for (int i = 0; i < 200; ++i) {
                    Word w(n);
                    for (auto& d : w) d = static_cast<int>(rng() % 10);
                    if (compare(s->cylinder(w).lebesgue, m) != 0) ++violations;
                }
                closed_form += 1;
            }
        }
    }
    o.seconds = since(t0);
    o.pass = violations == 0 && o.seconds < 60;
    o.detail = std::to_string(checked) + " cylinders exact, " + std::to_string(closed_form) +
               " base-10 orders by closed form, " + std::to_string(violations) + " violations";
    return o;
}

Outcome c2() {
    Outcome o{"2", "word counts vs brute force and bounds, n <= 12"};
    auto t0 = Clock::now();
    long bad = 0, cells = 0;
    for (const auto& b : kSix) {
        auto s = sys(b.poly);
        FieldElement beta = s->base()->beta();
        FieldElement ratio = beta / (beta - Rational(1));
        long a = s->alphabet_max();
        for (std::size_t n = 1; n <= 12; ++n) {
            Integer lib = s->count_words_exact(n);
            Integer brute = 0;
            if (b.dstar.empty()) {
                // every word over {0..b-1} is admissible
                brute = pow(Integer(a), static_cast<unsigned long>(n));
            } else {
                std::vector<int> w(n, 0);
                for (;;) {
                    if (parry_admissible(b.dstar, w)) ++brute;
                    std::size_t i = n;
                    while (i > 0 && w[i - 1] == a) w[--i] = 0;
                    if (i == 0) break;
                    ++w[i - 1];
                }
            }
            FieldElement lower = beta.pow(static_cast<long>(n));
            bool ok = lib == brute && compare(lower, Rational(lib)) <= 0 && compare(ratio * lower, Rational(lib)) >= 0;
            ++cells;
            if (!ok) ++bad;
        }
    }
    o.seconds = since(t0);
    o.pass = bad == 0 && o.seconds < 60;
    o.detail = std::to_string(cells) + " (base, n) cells, " + std::to_string(bad) + " mismatches or bound violations";
    return o;
}

Outcome c3() {
    Outcome o{"3", "census vs mass and count bounds"};
    auto t0 = Clock::now();
    long cells = 0, bad = 0;
    std::ostringstream failing;
    for (const char* poly : {"x^2-x-1", "x^3-x-1", "x-2", "x-3"}) {
        auto s = sys(poly);
        for (Rational eps : {Rational(1, 4), Rational(1, 2), Rational(1)}) {
            for (std::size_t k : {1, 2}) {
                for (std::size_t n = static_cast<std::size_t>(s->zero_run()) + k; n <= 12; ++n) {
                    CensusResult r = non_normal_census(*s, n, eps, k);
                    CensusCheck c = check_census(*s, r, n, eps, k);
                    ++cells;
                    if (!(c.applicable && c.mass_ok && c.count_ok)) {
                        ++bad;
                        failing << " " << poly << "/eps=" << eps.get_str() << "/k=" << k << "/n=" << n
                                << (c.mass_ok ? "" : "(mass " + to_decimal(Rational(r.mass.approx()), 4) + " > " +
                                                         to_decimal(c.mass_bound, 4) + ")")
                                << (c.count_ok ? "" : "(count)");
                    }
                }
            }
        }
    }
    o.seconds = since(t0);
    o.pass = bad == 0 && cells > 0 && o.seconds < 600;
    o.detail = std::to_string(cells - bad) + "/" + std::to_string(cells) + " grid cells within both bounds";
    if (bad) o.detail += "; failing:" + failing.str();
    // informational only: the same grid with M taken from the Blichfeldt bound
    long bcells = 0, bbad = 0;
    for (const char* poly : {"x^2-x-1", "x^3-x-1", "x-2", "x-3"}) {
        auto s = sys(poly);
        std::size_t m = blichfeldt_bound(*s->base()).ceiling.get_ui();
        for (Rational eps : {Rational(1, 4), Rational(1, 2), Rational(1)}) {
            for (std::size_t k : {1, 2}) {
                for (std::size_t n = m + k; n <= 12; ++n) {
                    CensusResult r = non_normal_census(*s, n, eps, k);
                    CensusCheck c = check_census(*s, r, n, eps, k, ZeroRunSource::Blichfeldt);
                    ++bcells;
                    if (!(c.applicable && c.mass_ok && c.count_ok)) ++bbad;
                }
            }
        }
    }
    o.detail += "; info, Blichfeldt M: " + std::to_string(bcells - bbad) + "/" + std::to_string(bcells) + " cells";
    return o;
}

Outcome c4() {
    Outcome o{"4", "orbit of 1 within the Blichfeldt bound, 10 bases"};
    auto t0 = Clock::now();
    long bad = 0;
    std::ostringstream d;
    for (const char* poly : {"x^2-x-1", "x^3-x-1", "x^3-x^2-x-1", "x^4-x^3-1", "x-2", "x-3", "x-4", "x-5",
                             "x^2-2x-1", "x^3-x^2-1"}) {
        auto s = sys(poly);
        BlichfeldtBound bb = blichfeldt_bound(*s->base());
        std::size_t size = s->expansion().orbit.size();
        if (Rational(static_cast<unsigned long>(size)) > bb.value) ++bad;
        d << poly << ":" << size << "<=" << bb.ceiling.get_str() << " ";
    }
    o.seconds = since(t0);
    o.pass = bad == 0;
    o.detail = d.str() + "| " + std::to_string(bad) + " violations";
    return o;
}

Outcome c5() {
    Outcome o{"5", "inscribed cylinder ratio, 1000 random intervals per base"};
    auto t0 = Clock::now();
    long bad = 0, total = 0;
    std::mt19937_64 rng(2024);
    for (const auto& b : kSix) {
        auto s = sys(b.poly);
        const PisotPtr& beta = s->base();
        FieldElement scale = beta->is_integer()
                                 ? beta->constant(1 / Rational(2 * beta->floor_beta()))
                                 : (beta->beta().pow(s->zero_run() + 4) * Rational(2)).inverse();
        for (int i = 0; i < 1000; ++i) {
            long q = 2 + static_cast<long>(rng() % 999);
            long p1 = static_cast<long>(rng() % static_cast<unsigned long>(q + 1));
            long p2 = static_cast<long>(rng() % static_cast<unsigned long>(q + 1));
            if (p1 == p2) p2 = p1 == q ? p1 - 1 : p1 + 1;
            Rational l(std::min(p1, p2), q), r(std::max(p1, p2), q);
            l.canonicalize();
            r.canonicalize();
            Cylinder c = inscribed_beta_adic(*s, Interval{beta->constant(l), beta->constant(r)});
            bool inside = compare(c.left, l) >= 0 && compare(c.right, r) <= 0;
            bool ratio = scale * (r - l) <= c.lebesgue;
            ++total;
            if (!inside || !ratio) ++bad;
        }
    }
    o.seconds = since(t0);
    o.pass = bad == 0;
    o.detail = std::to_string(total) + " intervals, " + std::to_string(bad) + " failures";
    return o;
}

std::string digits_of(const Word& w) {
    std::string s;
    for (int d : w) s.push_back(static_cast<char>('0' + d));
    return s;
}

// Same line format as naive::Bhs::step().
std::string line_of(const BhsTrace& tr, const Word& before) {
    const AdicInterval& j = tr.sequence.front();
    Word all = j.digits();
    std::ostringstream out;
    out << "step=" << tr.step << " t=" << tr.t << " eps=" << tr.epsilon.get_str() << " k=" << tr.k.get_str()
        << " delta=" << tr.delta.get_str() << " L=" << tr.l.numerator.get_str() << "/2^" << tr.l.order
        << " s=" << tr.extension << " index=" << tr.accepted_index.get_str() << " J=" << j.numerator.get_str()
        << "/2^" << j.order << " u=" << digits_of(Word(all.begin() + static_cast<long>(before.size()), all.end()));
    return out.str();
}

Rational naive_discrepancy(const Word& u, long b) {
    std::vector<long> count(static_cast<std::size_t>(b), 0);
    for (int d : u) ++count[static_cast<std::size_t>(d)];
    Rational worst = 0;
    for (long c : count) {
        Rational f(c, static_cast<long>(u.size()));
        f.canonicalize();
        worst = std::max(worst, Rational(abs(f - Rational(1, b))));
    }
    return worst;
}

std::vector<Outcome> c6() {
    Outcome a{"6a", "BHS: every accepted block within eps"};
    Outcome b{"6b", "BHS: simple discrepancy of the base-2 prefix at N = 2000 <= 0.05"};
    Outcome c{"6c", "BHS: first 3 steps equal the naive reference"};
    auto t0 = Clock::now();
    BhsState s = bhs_init();
    FunctionSpec f = FunctionSpec::polynomial({0, 0, 1});
    naive::Bhs ref;
    long blocks = 0, bad = 0, mismatched = 0;
    std::size_t steps = 0;
    while (s.digits.at(2).size() < 2000 && steps < 100) {
        Word before = s.digits.at(2);
        BhsTrace tr = bhs_step(s, f);
        ++steps;
        if (steps <= 3 && line_of(tr, before) != ref.step()) ++mismatched;
        for (const auto& rep : tr.bases) {
            ++blocks;
            Rational d = naive_discrepancy(rep.block, rep.base);
            if (d != rep.discrepancy || d > tr.epsilon) ++bad;
        }
    }
    double secs = since(t0);
    const Word& w = s.digits.at(2);
    a.pass = bad == 0 && w.size() >= 2000;
    a.detail = std::to_string(steps) + " steps, " + std::to_string(w.size()) + " binary digits, " +
               std::to_string(blocks) + " blocks, " + std::to_string(bad) + " over eps";
    if (w.size() >= 2000) {
        Rational d = naive_discrepancy(Word(w.begin(), w.begin() + 2000), 2);
        b.pass = d <= Rational(1, 20);
        b.detail = "D = " + to_string(d) + " (t stays 2, eps = 1/2, every block is all zeros)";
    } else {
        b.pass = false;
        b.detail = "fewer than 2000 digits";
    }
    c.pass = mismatched == 0 && steps >= 3;
    c.detail = std::to_string(mismatched) + " of 3 step lines differ";
    a.seconds = b.seconds = c.seconds = secs;
    return {a, b, c};
}

Outcome c7() {
    Outcome o{"7", "Pisot faithful base 2: steps 2-3 equal the naive reference, ledger strict"};
    auto t0 = Clock::now();
    std::vector<BaseInfo> raw;
    raw.emplace_back(sys("x-2"), ZeroRunSource::Exact);
    PisotState s = pisot_init(raw);
    PisotOptions opts;
    long bad = 0;
    std::ostringstream d;
    for (const auto& r : naive::pisot_base2()) {
        PisotTrace tr = pisot_step(raw, s, opts);
        auto delta = tr.delta.exact(raw);
        auto sf = tr.ledger.s_factor.exact(raw);
        bool same = tr.step == static_cast<std::size_t>(r.step) && tr.n == static_cast<std::size_t>(r.n) && delta &&
                    delta->rational_value() == 1 / Rational(pow(Integer(2), static_cast<unsigned long>(r.delta_exp))) &&
                    tr.accepted_index == Integer(r.index) && digits_of(tr.blocks.front().block) == r.block;
        bool strict = tr.ledger.feasible && sf && tr.ledger.n_factor.upper() < sf->rational_value();
        if (!same || !strict) ++bad;
        d << "step " << tr.step << ": n=" << tr.n << " index=" << tr.accepted_index.get_str() << " " << (same ? "match" : "DIFF")
          << (strict ? " strict" : " NOT-STRICT") << "; ";
    }
    o.seconds = since(t0);
    o.pass = bad == 0;
    o.detail = d.str();
    return o;
}

Outcome c8() {
    Outcome o{"8", "Pisot scaled (phi, plastic): 2000 digits, per-step normality, deviation <= 0.05"};
    auto t0 = Clock::now();
    std::vector<BaseInfo> raw;
    raw.emplace_back(sys("x^2-x-1"), ZeroRunSource::Exact);
    raw.emplace_back(sys("x^3-x-1"), ZeroRunSource::Exact);
    PisotOptions opts;
    opts.mode = PisotMode::Scaled;
    opts.profile.epsilon = {Rational(1, 6)};
    opts.profile.k = {1};
    opts.profile.n = {150};
    PisotState s = pisot_init(raw);
    // mu(c(1)) = 1/(1 + phi^2) for the golden mean shift
    const long double phi = (1 + std::sqrt(5.0L)) / 2, mu1 = 1 / (1 + phi * phi);
    long checked = 0, failed = 0, disagree = 0;
    std::size_t steps = 0;
    while (s.sequence.front().order() < 2000 && steps < 60) {
        PisotTrace tr = pisot_step(raw, s, opts);
        ++steps;
        long double eps = tr.epsilon.get_d();
        for (const auto& b : tr.blocks) {
            if (!b.checked) continue;
            ++checked;
            if (!b.normality.verdict) ++failed;
            if (b.raw_index == 0 && tr.k == 1) {
                long double n = static_cast<long double>(b.block.size());
                long double ones = static_cast<long double>(std::count(b.block.begin(), b.block.end(), 1));
                auto inside = [&](long double c, long double mu) { return mu * (1 - eps) * n < c && c < mu * (1 + eps) * n; };
                bool ok = inside(ones, mu1) && inside(n - ones, 1 - mu1);
                if (ok != b.normality.verdict) ++disagree;
            }
        }
    }
    const Word& w = s.sequence.front().word;
    BlockTable table(*raw[0].system, 1);
    FieldElement dev = block_frequency_deviation(table, w);
    long double ones = static_cast<long double>(std::count(w.begin(), w.end(), 1));
    long double dev_ref = std::fabs(ones / static_cast<long double>(w.size()) - mu1);
    bool dev_agrees = std::fabs(static_cast<long double>(dev.approx()) - dev_ref) < 1e-12L;
    o.seconds = since(t0);
    o.pass = w.size() >= 2000 && failed == 0 && disagree == 0 && dev_agrees && compare(dev, Rational(1, 20)) <= 0;
    std::ostringstream d;
    d << steps << " steps, " << w.size() << " phi digits, " << checked << " blocks checked, " << failed
      << " failed, deviation " << to_decimal(Rational(dev.approx()), 6);
    o.detail = d.str();
    return o;
}

Outcome c9() {
    Outcome o{"9", "Parry measure sums to 1 (k <= 8) and is invariant (k <= 6)"};
    auto t0 = Clock::now();
    long bad = 0, tables = 0, closed = 0;
    for (const auto& b : kSix) {
        auto s = sys(b.poly);
        std::vector<std::unique_ptr<BlockTable>> t(9);
        for (std::size_t k = 1; k <= 8; ++k) {
            if (s->count_words_exact(k) > 100000) {
                // integer base: b^k blocks of measure b^-k each
                ++closed;
                Integer n = s->count_words_exact(k);
                if (Rational(n) * s->inverse_power(k).rational_value() != 1) ++bad;
                continue;
            }
            t[k] = std::make_unique<BlockTable>(*s, k);
            ++tables;
            FieldElement sum = s->base()->zero();
            for (std::size_t i = 0; i < t[k]->size(); ++i) sum += t[k]->measure(i);
            if (compare(sum, Rational(1)) != 0) ++bad;
        }
        for (std::size_t k = 1; k <= 6; ++k) {
            if (!t[k] || !t[k + 1]) {
                // integer base: b blocks au, each b^-(k+1)
                ++closed;
                continue;
            }
            for (std::size_t i = 0; i < t[k]->size(); ++i) {
                FieldElement sum = s->base()->zero();
                for (int a = 0; a <= s->alphabet_max(); ++a) {
                    Word au{a};
                    const Word& u = t[k]->block(i);
                    au.insert(au.end(), u.begin(), u.end());
                    std::size_t j = t[k + 1]->index_of(au.data());
                    if (j != BlockTable::npos) sum += t[k + 1]->measure(j);
                }
                if (!(sum == t[k]->measure(i))) ++bad;
            }
        }
    }
    o.seconds = since(t0);
    o.pass = bad == 0;
    o.detail = std::to_string(tables) + " block tables exact, " + std::to_string(closed) +
               " base-10 cases by closed form, " + std::to_string(bad) + " failures";
    return o;
}

// O(N^2) over pairs of distinct endpoints with prefix counts.
Rational brute_discrepancy(const std::vector<Rational>& pts) {
    std::map<Rational, long> mult;
    for (const auto& p : pts) ++mult[p];
    mult.emplace(Rational(0), 0);
    mult.emplace(Rational(1), 0);
    std::vector<Rational> e;
    std::vector<long> cum{0};
    for (const auto& [x, m] : mult) {
        e.push_back(x);
        cum.push_back(cum.back() + m);
    }
    Rational n(static_cast<long>(pts.size())), best = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = i; j < e.size(); ++j) {
            Rational len = e[j] - e[i];
            long closed = cum[j + 1] - cum[i];
            long open = j > i ? cum[j] - cum[i + 1] : 0;
            best = std::max(best, Rational(Rational(closed) / n - len));
            best = std::max(best, Rational(len - Rational(open) / n));
        }
    }
    return best;
}

Outcome c10() {
    Outcome o{"10", "discrepancy formula vs O(N^2) brute force, 200 sets, N <= 200"};
    auto t0 = Clock::now();
    std::mt19937_64 rng(10);
    long bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng() % 200;
        std::vector<Rational> pts;
        for (std::size_t i = 0; i < n; ++i) {
            long q = 1 + static_cast<long>(rng() % 1000);
            pts.emplace_back(static_cast<long>(rng() % static_cast<unsigned long>(q)), q);
            pts.back().canonicalize();
        }
        if (extreme_discrepancy(pts) != brute_discrepancy(pts)) ++bad;
        if (trial < 20 && brute_discrepancy(pts) != oracle::extreme_discrepancy_brute(pts)) ++bad;
    }
    for (long n = 1; n <= 200; ++n) {
        std::vector<Rational> pts;
        for (long i = 0; i < n; ++i) {
            pts.emplace_back(i, n);
            pts.back().canonicalize();
        }
        if (extreme_discrepancy(pts) != Rational(1, n)) ++bad;
    }
    o.seconds = since(t0);
    o.pass = bad == 0;
    o.detail = "200 random sets + equispaced N = 1..200, " + std::to_string(bad) + " mismatches";
    return o;
}

std::set<std::string> split(const std::string& s) {
    std::set<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) out.insert(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<std::string> expect, only;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--expect-fail") && i + 1 < argc) expect = split(argv[++i]);
        else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = split(argv[++i]);
        else {
            std::cerr << "usage: acceptance [--only 1,2,...] [--expect-fail 6b,...]\n";
            return 2;
        }
    }
    std::vector<std::pair<std::string, std::function<std::vector<Outcome>()>>> all = {
        {"1", [] { return std::vector<Outcome>{c1()}; }},  {"2", [] { return std::vector<Outcome>{c2()}; }},
        {"3", [] { return std::vector<Outcome>{c3()}; }},  {"4", [] { return std::vector<Outcome>{c4()}; }},
        {"5", [] { return std::vector<Outcome>{c5()}; }},  {"6", c6},
        {"7", [] { return std::vector<Outcome>{c7()}; }},  {"8", [] { return std::vector<Outcome>{c8()}; }},
        {"9", [] { return std::vector<Outcome>{c9()}; }},  {"10", [] { return std::vector<Outcome>{c10()}; }},
    };
    std::set<std::string> failed;
    for (const auto& [id, run] : all) {
        if (!only.empty() && !only.count(id)) continue;
        std::vector<Outcome> results;
        try {
            results = run();
        } catch (const std::exception& e) {
            results = {Outcome{id, "criterion " + id, false, std::string("exception: ") + e.what()}};
        }
        for (const auto& r : results) {
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << "  " << r.name << "  [" << r.detail << "]  ("
                      << std::fixed << std::setprecision(2) << r.seconds << " s)" << std::endl;
            if (!r.pass) failed.insert(r.id);
        }
    }
    std::cout << "failed:";
    for (const auto& f : failed) std::cout << ' ' << f;
    std::cout << (failed.empty() ? " none" : "") << '\n';
    // only the ids actually run can be compared
    std::set<std::string> expected_here;
    for (const auto& e : expect) {
        std::string head = e.substr(0, e.find_first_not_of("0123456789"));
        if (only.empty() || only.count(head)) expected_here.insert(e);
    }
    if (failed != expected_here) {
        std::cout << "unexpected outcome set\n";
        return 1;
    }
    if (!failed.empty()) std::cout << "known failures match --expect-fail\n";
    return 0;
}
