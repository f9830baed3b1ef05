#include "commands.hpp"

#include <iomanip>
#include <sstream>
#include <variant>

namespace pisotnorm::cli {

namespace {

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

std::string dstar_text(const ExpansionOfOne& e, long alphabet_max) {
    std::string s = word_to_string(e.dstar_preperiod, alphabet_max);
    return s + "(" + word_to_string(e.dstar_period, alphabet_max) + ")^omega";
}

FieldElement from_rational(const PisotPtr& beta, const std::string& text) {
    return beta->constant(parse_rational(text));
}

}  // namespace

Report cmd_certify(const BaseArgs& a, const Context& ctx) {
    Report r;
    std::string text = canonical_base(a.base);
    r.fields["input"] = a.base;
    CertifyOptions opts;
    opts.assume_irreducible = a.assume_irreducible;
    CertifyResult res = certify_pisot(MinimalPolynomial::parse_coefficients(text), opts);
    if (const auto* bad = std::get_if<NotPisot>(&res)) {
        r.fields["minpoly"] = text;
        r.fields["pisot"] = false;
        r.fields["reason"] = to_string(bad->reason);
        r.fields["witness"] = bad->witness;
        r.exit_code = kCertification;
        return r;
    }
    const PisotPtr& p = std::get<PisotPtr>(res);
    r.fields["minpoly"] = p->label();
    r.fields["pisot"] = true;
    r.fields["degree"] = p->degree();
    r.fields["real_embeddings"] = p->real_embeddings();
    r.fields["complex_pairs"] = p->complex_pairs();
    DyadicEnclosure enc = p->enclosure(static_cast<std::size_t>(ctx.decimal_digits) * 4 + 16);
    r.fields["root"] = {{"lower", number(enc.lower(), ctx)}, {"upper", number(enc.upper(), ctx)}};
    r.fields["floor"] = p->floor_beta().get_str();
    r.fields["conjugate_modulus_bound"] = number(p->conjugate_modulus_bound(), ctx);
    r.fields["discriminant"] = p->discriminant().get_str();
    r.fields["irreducibility"] = p->irreducibility_certificate();
    r.table_name = "conjugates";
    for (const auto& z : p->conjugates()) {
        r.rows.push_back({{"re", fixed(z.real(), ctx.decimal_digits)},
                          {"im", fixed(z.imag(), ctx.decimal_digits)},
                          {"modulus", fixed(std::abs(z), ctx.decimal_digits)}});
    }
    return r;
}

Report cmd_expansion(const ExpansionArgs& a, const Context& ctx) {
    auto sys = make_system(a.base, a.assume_irreducible);
    const ExpansionOfOne& e = sys->expansion();
    long am = sys->alphabet_max();
    Report r;
    r.fields["base"] = sys->base()->label();
    r.fields["d1"] = word_to_string(e.d1, am);
    r.fields["d1_finite"] = e.finite;
    r.fields["dstar"] = dstar_text(e, am);
    r.fields["dstar_preperiod"] = word_to_string(e.dstar_preperiod, am);
    r.fields["dstar_period"] = word_to_string(e.dstar_period, am);
    r.fields["orbit_size"] = e.orbit.size();
    r.fields["orbit_preperiod"] = e.orbit_preperiod;
    r.fields["orbit_period"] = e.orbit_period;
    r.fields["m_zero"] = e.zero_run;
    BlichfeldtBound bb = blichfeldt_bound(*sys->base());
    r.fields["blichfeldt"] = {{"bound", number(bb.value, ctx)}, {"ceiling", bb.ceiling.get_str()}};
    if (a.orbit) {
        r.table_name = "orbit";
        for (std::size_t i = 0; i < e.orbit.size(); ++i) r.rows.push_back({{"k", i}, {"point", number(e.orbit[i], ctx)}});
    }
    return r;
}

Report cmd_words(const WordsArgs& a, const Context& ctx) {
    auto sys = make_system(a.base, a.assume_irreducible);
    Integer count = sys->count_words_exact(a.n);
    FieldElement b = sys->base()->beta();
    FieldElement lower = b.pow(static_cast<long>(a.n));
    FieldElement upper = b / (b - Rational(1)) * lower;
    bool ok = compare(lower, Rational(count)) <= 0 && compare(upper, Rational(count)) >= 0;
    Report r;
    r.fields["base"] = sys->base()->label();
    r.fields["n"] = a.n;
    r.fields["count"] = count.get_str();
    r.fields["lower_bound"] = number(lower, ctx);
    r.fields["upper_bound"] = number(upper, ctx);
    r.fields["bounds_ok"] = ok;
    if (a.list) {
        r.table_name = "words";
        std::size_t seen = 0;
        sys->enumerate(a.n, [&](const Cylinder& c) {
            r.rows.push_back({{"word", word_to_string(c.word, sys->alphabet_max())}, {"lebesgue", number(c.lebesgue, ctx)}});
            return ++seen < a.limit;
        });
        r.fields["listed"] = seen;
    }
    if (!ok) r.exit_code = kBoundViolation;
    return r;
}

Report cmd_cylinder(const CylinderArgs& a, const Context& ctx) {
    auto sys = make_system(a.base, a.assume_irreducible);
    Word w = parse_word(a.word, sys->alphabet_max());
    Report r;
    r.fields["base"] = sys->base()->label();
    r.fields["word"] = word_to_string(w, sys->alphabet_max());
    r.fields["admissible"] = sys->is_admissible(w);
    if (!sys->is_admissible(w)) {
        r.exit_code = kUsage;
        return r;
    }
    Cylinder c = sys->cylinder(w);
    long n = static_cast<long>(c.order());
    FieldElement b = sys->base()->beta();
    FieldElement hi = b.pow(-n);
    FieldElement lo = b.pow(-(n + sys->zero_run() + 1));
    bool ok = lo <= c.lebesgue && c.lebesgue <= hi;
    r.fields["order"] = c.order();
    r.fields["state"] = c.state;
    r.fields["left"] = number(c.left, ctx);
    r.fields["right"] = number(c.right, ctx);
    r.fields["lebesgue"] = number(c.lebesgue, ctx);
    r.fields["parry"] = number(sys->parry_measure(c), ctx);
    r.fields["bound_lower"] = number(lo, ctx);
    r.fields["bound_upper"] = number(hi, ctx);
    r.fields["bounds_ok"] = ok;
    if (!ok) r.exit_code = kBoundViolation;
    return r;
}

Report cmd_measure(const MeasureArgs& a, const Context& ctx) {
    auto sys = make_system(a.base, a.assume_irreducible);
    Report r;
    r.fields["base"] = sys->base()->label();
    if (!a.left.empty() || !a.right.empty()) {
        FieldElement l = from_rational(sys->base(), a.left.empty() ? "0" : a.left);
        FieldElement h = from_rational(sys->base(), a.right.empty() ? "1" : a.right);
        r.fields["left"] = number(l, ctx);
        r.fields["right"] = number(h, ctx);
        r.fields["lebesgue"] = number(h - l, ctx);
        r.fields["parry"] = number(sys->parry_measure(l, h), ctx);
        return r;
    }
    BlockTable table(*sys, a.k);
    FieldElement sum = sys->base()->zero();
    r.table_name = "blocks";
    for (std::size_t i = 0; i < table.size(); ++i) {
        sum += table.measure(i);
        r.rows.push_back({{"block", word_to_string(table.block(i), sys->alphabet_max())}, {"mu", number(table.measure(i), ctx)}});
    }
    bool one = compare(sum, Rational(1)) == 0;
    r.fields["k"] = a.k;
    r.fields["blocks"] = table.size();
    r.fields["sum"] = number(sum, ctx);
    r.fields["sum_is_one"] = one;
    if (!one) r.exit_code = kBoundViolation;
    return r;
}

Report cmd_inscribe(const InscribeArgs& a, const Context& ctx) {
    auto sys = make_system(a.base, a.assume_irreducible);
    const PisotPtr& beta = sys->base();
    FieldElement l = from_rational(beta, a.left);
    FieldElement h = from_rational(beta, a.right);
    Cylinder c = inscribed_beta_adic(*sys, Interval{l, h});
    FieldElement len = h - l;
    FieldElement b = beta->beta();
    FieldElement bound = beta->is_integer() ? len * (Rational(1) / Rational(2 * beta->floor_beta()))
                                            : len / (b.pow(sys->zero_run() + 4) * Rational(2));
    bool inside = l <= c.left && c.right <= h;
    bool ok = inside && bound <= c.lebesgue;
    Report r;
    r.fields["base"] = beta->label();
    r.fields["interval"] = {{"left", number(l, ctx)}, {"right", number(h, ctx)}, {"length", number(len, ctx)}};
    r.fields["word"] = word_to_string(c.word, sys->alphabet_max());
    r.fields["order"] = c.order();
    r.fields["left"] = number(c.left, ctx);
    r.fields["right"] = number(c.right, ctx);
    r.fields["lebesgue"] = number(c.lebesgue, ctx);
    r.fields["required"] = number(bound, ctx);
    r.fields["inside"] = inside;
    r.fields["bound_ok"] = ok;
    if (!ok) r.exit_code = kBoundViolation;
    return r;
}

}  // namespace pisotnorm::cli
