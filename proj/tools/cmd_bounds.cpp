#include "commands.hpp"

namespace pisotnorm::cli {

namespace {

ZeroRunSource zero_run_source(const std::string& s) {
    if (s == "exact") return ZeroRunSource::Exact;
    if (s == "blichfeldt") return ZeroRunSource::Blichfeldt;
    throw Error(ErrorCode::InvalidArgument, "zero-run must be exact or blichfeldt, got " + s);
}

}  // namespace

Report cmd_constants(const ConstantsArgs& a, const Context& ctx) {
    auto sys = make_system(a.base, a.assume_irreducible);
    Rational eps = parse_rational(a.epsilon);
    ConstantsBundle cb = constants(*sys, eps, a.k, zero_run_source(a.zero_run));
    Report r;
    r.fields["base"] = sys->base()->label();
    r.fields["epsilon"] = to_string(eps);
    r.fields["k"] = a.k;
    r.fields["m_exact"] = cb.m_exact;
    r.fields["blichfeldt"] = {{"bound", number(cb.blichfeldt.value, ctx)}, {"ceiling", cb.blichfeldt.ceiling.get_str()}};
    r.fields["m_used"] = cb.m_used;
    r.fields["c_big"] = number(cb.c_big, ctx);
    r.fields["eta"] = {{"lower", number(cb.eta.lower, ctx)}, {"upper", number(cb.eta.upper, ctx)}};
    r.fields["blocks"] = sys->count_words_exact(a.k).get_str();
    r.fields["c_corollary"] = number(cb.c_corollary, ctx);
    r.fields["n0"] = cb.n0;
    if (!a.delta.empty()) {
        Rational delta = parse_rational(a.delta);
        r.fields["bhs"] = {{"delta", to_string(delta)}, {"t", a.t}, {"k", k_bhs(eps, delta, Integer(a.t)).get_str()}};
    }
    return r;
}

Report cmd_census(const CensusArgs& a, const Context& ctx) {
    auto sys = make_system(a.base, a.assume_irreducible);
    ZeroRunSource src = zero_run_source(a.zero_run);
    Report r;
    r.fields["base"] = sys->base()->label();
    r.fields["zero_run"] = a.zero_run;
    r.table_name = "census";
    bool ok = true;
    for (std::size_t k : a.k) {
        for (const auto& e : a.epsilon) {
            Rational eps = parse_rational(e);
            for (std::size_t n : a.n) {
                CensusResult res = non_normal_census(*sys, n, eps, k, ctx.jobs, a.budget);
                CensusCheck chk = check_census(*sys, res, n, eps, k, src);
                Rational frac(res.count, res.total);
                frac.canonicalize();
                r.rows.push_back({{"n", n},
                                  {"epsilon", to_string(eps)},
                                  {"k", k},
                                  {"words", res.total.get_str()},
                                  {"non_normal", res.count.get_str()},
                                  {"fraction", number(frac, ctx)},
                                  {"mass", number(res.mass, ctx)},
                                  {"mass_bound", number(chk.mass_bound, ctx)},
                                  {"count_bound", number(chk.count_bound, ctx)},
                                  {"applicable", chk.applicable},
                                  {"mass_ok", chk.mass_ok},
                                  {"count_ok", chk.count_ok}});
                if (chk.applicable && !(chk.mass_ok && chk.count_ok)) ok = false;
            }
        }
    }
    r.fields["all_within_bounds"] = ok;
    if (!ok) r.exit_code = kBoundViolation;
    return r;
}

}  // namespace pisotnorm::cli
