// Generator configuration, the run driver and the JSON Lines trace.

#include "pisotnorm/generators.hpp"

#include <json.hpp>

namespace pisotnorm {

using nlohmann::json;

namespace {

Rational rational_from(const json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number()) throw Error(ErrorCode::InvalidArgument, "give fractional values as strings like \"1/6\"");
    throw Error(ErrorCode::InvalidArgument, "expected a rational, got " + v.dump());
}

template <class T, class F>
std::vector<T> list_from(const json& v, F convert) {
    std::vector<T> out;
    if (v.is_array()) {
        for (const auto& e : v) out.push_back(convert(e));
    } else {
        out.push_back(convert(v));
    }
    return out;
}

FunctionSpec function_from(const json& v) {
    std::string kind = v.value("kind", "polynomial");
    FunctionSpec f;
    if (kind == "polynomial") {
        if (v.contains("coefficients")) {
            f.coefficients = list_from<Rational>(v.at("coefficients"), rational_from);
        } else {
            // {"degree": d} is m^d
            auto d = v.value("degree", 2);
            f.coefficients.assign(static_cast<std::size_t>(d) + 1, Rational(0));
            f.coefficients.back() = 1;
        }
    } else if (kind == "table") {
        f.kind = FunctionSpec::Kind::Table;
        f.table = list_from<Rational>(v.at("values"), rational_from);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unsupported f_spec kind: " + kind);
    }
    f.cost_per_eval = v.value("cost", std::size_t{0});
    return f;
}

}  // namespace

GeneratorConfig GeneratorConfig::parse(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
    }
    GeneratorConfig c;
    try {
        std::string kind = j.value("kind", "pisot");
        if (kind == "bhs") c.kind = GeneratorKind::Bhs;
        else if (kind == "pisot") c.kind = GeneratorKind::Pisot;
        else throw Error(ErrorCode::InvalidArgument, "unknown kind: " + kind);

        if (j.contains("bases")) {
            for (const auto& b : j.at("bases")) {
                c.bases.push_back(b.is_string() ? b.get<std::string>() : "x-" + std::to_string(b.get<long>()));
            }
        }
        if (c.kind == GeneratorKind::Pisot && c.bases.empty()) throw Error(ErrorCode::InvalidArgument, "no bases given");
        c.assume_irreducible = j.value("assume_irreducible", false);
        c.target_digits = j.value("target_digits", c.target_digits);
        c.max_steps = j.value("max_steps", c.max_steps);
        c.timing = j.value("timing", false);
        c.seeded = j.value("seeded", false);

        std::string mode = j.value("mode", "faithful");
        if (mode == "faithful") c.pisot.mode = PisotMode::Faithful;
        else if (mode == "scaled") c.pisot.mode = PisotMode::Scaled;
        else throw Error(ErrorCode::InvalidArgument, "unknown mode: " + mode);

        std::string log_base = j.value("log_base", "natural");
        if (log_base == "natural") c.pisot.log_base = LogBase::Natural;
        else if (log_base == "binary") c.pisot.log_base = LogBase::Binary;
        else throw Error(ErrorCode::InvalidArgument, "unknown log_base: " + log_base);

        std::string zero_run = j.value("zero_run", "exact");
        if (zero_run == "exact") c.pisot.zero_run = ZeroRunSource::Exact;
        else if (zero_run == "blichfeldt") c.pisot.zero_run = ZeroRunSource::Blichfeldt;
        else throw Error(ErrorCode::InvalidArgument, "unknown zero_run: " + zero_run);

        c.pisot.candidate_budget = j.value("candidate_budget", c.pisot.candidate_budget);
        c.bhs.candidate_budget = c.pisot.candidate_budget;
        c.pisot.census_budget = j.value("census_budget", c.pisot.census_budget);

        if (j.contains("profile")) {
            const json& p = j.at("profile");
            if (p.contains("t")) c.pisot.profile.t = list_from<long>(p.at("t"), [](const json& e) { return e.get<long>(); });
            if (p.contains("epsilon")) c.pisot.profile.epsilon = list_from<Rational>(p.at("epsilon"), rational_from);
            if (p.contains("k")) {
                c.pisot.profile.k = list_from<std::size_t>(p.at("k"), [](const json& e) { return e.get<std::size_t>(); });
            }
            if (p.contains("n")) {
                c.pisot.profile.n = list_from<std::size_t>(p.at("n"), [](const json& e) { return e.get<std::size_t>(); });
            }
        }
        if (j.contains("f_spec")) c.f = function_from(j.at("f_spec"));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
    }
    for (const auto& e : c.pisot.profile.epsilon) {
        if (e <= 0 || e > 1) throw Error(ErrorCode::InvalidArgument, "profile epsilon must lie in (0, 1]");
    }
    for (auto k : c.pisot.profile.k) {
        if (k == 0) throw Error(ErrorCode::InvalidArgument, "profile k must be positive");
    }
    return c;
}

namespace {

json exact(const Rational& q) { return {{"exact", to_string(q)}, {"decimal", to_decimal(q, 12)}}; }

json exact(const Integer& z) { return z.get_str(); }

json interval(const RealInterval& r) {
    return {{"lower", to_decimal(r.lower(), 12)}, {"upper", to_decimal(r.upper(), 12)}};
}

json adic(const AdicInterval& a) {
    return {{"base", a.base}, {"order", a.order}, {"numerator", a.numerator.get_str()}};
}

json cylinder(const Cylinder& c, long alphabet_max) {
    return {{"order", c.order()},
            {"word", word_to_string(c.word, alphabet_max)},
            {"lebesgue", c.lebesgue.to_string()},
            {"lebesgue_decimal", to_decimal(Rational(c.lebesgue.approx()), 6)}};
}

}  // namespace

std::string trace_json(const BhsTrace& t, bool timing) {
    json j;
    j["schema"] = kTraceSchema;
    j["kind"] = "bhs";
    j["step"] = t.step;
    j["t"] = t.t;
    j["epsilon"] = exact(t.epsilon);
    j["k"] = exact(t.k);
    j["delta"] = exact(t.delta);
    json u;
    u["power_of_two"] = t.update.power_of_two;
    if (t.update.power_of_two) {
        u["m"] = t.update.m;
        u["f_m"] = exact(t.update.f_m);
        u["delta"] = exact(t.update.delta);
        u["k"] = exact(t.update.k);
        u["h_bits"] = mpz_sizeinbase(t.update.h.get_mpz_t(), 2);
        u["cost_k"] = t.update.cost_k;
        u["cost_h"] = t.update.cost_h;
        u["computed"] = t.update.computed;
        u["cond_h"] = t.update.cond_h;
        u["cond_k"] = t.update.cond_k;
    }
    j["update"] = u;
    j["L"] = adic(t.l);
    j["extension"] = t.extension;
    j["candidates"] = t.candidates;
    j["accepted_index"] = exact(t.accepted_index);
    j["sequence"] = json::array();
    for (const auto& a : t.sequence) j["sequence"].push_back(adic(a));
    j["blocks"] = json::array();
    for (const auto& b : t.bases) {
        j["blocks"].push_back({{"base", b.base},
                               {"length", b.block.size()},
                               {"digits", word_to_string(b.block, b.base - 1)},
                               {"discrepancy", exact(b.discrepancy)},
                               {"accepted", b.discrepancy <= t.epsilon}});
    }
    j["op_delta"] = t.op_delta;
    if (timing) j["seconds"] = t.seconds;
    return j.dump();
}

std::string trace_json(const std::vector<BaseInfo>& raw, const PisotTrace& t, bool timing) {
    json j;
    j["schema"] = kTraceSchema;
    j["kind"] = "pisot";
    j["mode"] = t.scaled ? "scaled" : "faithful";
    j["step"] = t.step;
    j["t"] = t.t;
    j["epsilon"] = exact(t.epsilon);
    j["k"] = t.k;
    j["delta"] = {{"exact", t.delta.to_string(raw)}, {"log", interval(t.delta.log(raw, 128))}};
    j["n"] = t.n;
    j["n_exact"] = t.n_exact;
    j["v"] = t.v;
    j["effective"] = json::array();
    for (auto r : t.effective) j["effective"].push_back(raw[r].beta().label());
    long a1 = raw[t.effective.front()].beta().alphabet_max();
    if (t.l) j["L"] = cylinder(*t.l, a1);
    j["extension"] = t.extension;
    j["candidates"] = t.candidates;
    j["pruned"] = t.pruned;
    j["accepted_index"] = exact(t.accepted_index);
    j["sequence"] = json::array();
    for (std::size_t p = 0; p < t.sequence.size(); ++p) {
        j["sequence"].push_back(cylinder(t.sequence[p], raw[t.effective[p]].beta().alphabet_max()));
    }
    j["blocks"] = json::array();
    for (const auto& b : t.blocks) {
        long a = raw[b.raw_index].beta().alphabet_max();
        j["blocks"].push_back({{"position", b.position},
                               {"base", raw[b.raw_index].beta().label()},
                               {"length", b.block.size()},
                               {"digits", word_to_string(b.block, a)},
                               {"checked", b.checked},
                               {"normal", b.normality.verdict},
                               {"worst_block", word_to_string(b.normality.worst_block, a)},
                               {"worst_ratio", exact(b.normality.worst_ratio)}});
    }
    const auto& l = t.ledger;
    j["feasibility"] = {{"lambda_S_factor", l.s_factor.to_string(raw)},
                        {"lambda_S_factor_log", interval(l.s_factor.log(raw, 128))},
                        {"lambda_N_factor", interval(l.n_factor)},
                        {"lambda_N_source", l.n_source},
                        {"lambda_I1", l.lambda_i1 ? l.lambda_i1->to_string() : ""},
                        {"feasible", l.feasible}};
    j["op_delta"] = t.op_delta;
    if (timing) j["seconds"] = t.seconds;
    return j.dump();
}

GenerateResult generate(const GeneratorConfig& config) {
    GenerateResult out;
    if (config.kind == GeneratorKind::Bhs) {
        BhsState state = bhs_init();
        out.stop_reason = "target reached";
        try {
            while (state.digits.at(2).size() < config.target_digits) {
                if (out.steps >= config.max_steps) {
                    out.stop_reason = "max_steps reached";
                    break;
                }
                out.trace.push_back(trace_json(bhs_step(state, config.f, config.bhs), config.timing));
                ++out.steps;
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::CandidateBudgetExceeded) throw;
            out.stop_reason = e.what();
        }
        for (const auto& [b, w] : state.digits) {
            out.labels.push_back(std::to_string(b));
            out.streams.push_back(w);
            out.alphabet_max.push_back(b - 1);
        }
        out.complete = state.digits.at(2).size() >= config.target_digits;
        out.op_counter = state.op_counter;
        return out;
    }

    std::vector<BaseInfo> raw;
    for (const auto& text : config.bases) {
        CertifyOptions opts;
        opts.assume_irreducible = config.assume_irreducible;
        raw.emplace_back(std::make_shared<const BetaSystem>(make_pisot(text, opts)), config.pisot.zero_run);
    }
    PisotState state = pisot_init(raw);
    out.stop_reason = "target reached";
    try {
        while (state.sequence.front().order() < config.target_digits) {
            if (out.steps >= config.max_steps) {
                out.stop_reason = "max_steps reached";
                break;
            }
            out.trace.push_back(trace_json(raw, pisot_step(raw, state, config.pisot), config.timing));
            ++out.steps;
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::CandidateBudgetExceeded) throw;
        out.stop_reason = e.what();
    }
    for (std::size_t r = 0; r < raw.size(); ++r) {
        out.labels.push_back(raw[r].beta().label());
        out.alphabet_max.push_back(raw[r].beta().alphabet_max());
        Word w;
        for (std::size_t p = 0; p < state.effective.size(); ++p) {
            if (state.effective[p] == r) {
                w = state.sequence[p].word;
                break;
            }
        }
        out.streams.push_back(std::move(w));
    }
    out.complete = state.sequence.front().order() >= config.target_digits;
    out.op_counter = state.op_counter;
    return out;
}

}  // namespace pisotnorm
