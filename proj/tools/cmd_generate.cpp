#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace pisotnorm::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string file_label(const std::string& label) {
    std::string s;
    for (char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c))) s += c;
        else if (c == '^') s += 'p';
        else if (c == '+') s += 'P';
        else if (c == '-') s += 'm';
        else s += '_';
    }
    return s;
}

// Every checked block of every step passed its normality test.
bool steps_normal(const std::vector<std::string>& trace) {
    for (const auto& line : trace) {
        ojson j = ojson::parse(line);
        for (const auto& b : j["blocks"]) {
            if (b.contains("normal") && b["checked"].get<bool>() && !b["normal"].get<bool>()) return false;
            if (b.contains("accepted") && !b["accepted"].get<bool>()) return false;
        }
    }
    return true;
}

std::vector<std::size_t> default_lengths(std::size_t available) {
    std::vector<std::size_t> out;
    for (std::size_t n = 10; n <= available; n *= 10) out.push_back(n);
    if (out.empty() || out.back() != available) out.push_back(available);
    return out;
}

}  // namespace

Report cmd_generate(const GenerateArgs& a, const Context& ctx) {
    ojson merged = ctx.seed;
    if (!a.config.empty()) {
        ojson file;
        try {
            file = ojson::parse(read_file(a.config));
        } catch (const ojson::exception& e) {
            throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
        }
        merged.merge_patch(file);
    }
    if (merged.contains("bases") && merged["bases"].is_array()) {
        for (auto& b : merged["bases"]) {
            if (b.is_string()) b = canonical_base(b.get<std::string>());
        }
    }
    if (a.target) merged["target_digits"] = *a.target;
    if (a.timing) merged["timing"] = true;
    GeneratorConfig config = GeneratorConfig::parse(merged.dump());
    GenerateResult res = generate(config);

    std::filesystem::path dir(a.out_dir);
    std::filesystem::create_directories(dir);
    Report r;
    r.fields["kind"] = config.kind == GeneratorKind::Bhs ? "bhs" : "pisot";
    r.fields["steps"] = res.steps;
    r.fields["complete"] = res.complete;
    r.fields["stop_reason"] = res.stop_reason;
    r.fields["op_counter"] = res.op_counter;
    r.fields["steps_normal"] = steps_normal(res.trace);
    {
        std::ofstream trace(dir / "trace.jsonl", std::ios::binary);
        for (const auto& line : res.trace) trace << line << '\n';
    }
    r.fields["trace"] = (dir / "trace.jsonl").string();
    r.table_name = "streams";
    for (std::size_t s = 0; s < res.streams.size(); ++s) {
        auto path = dir / ("digits_" + file_label(res.labels[s]) + ".txt");
        std::string digits = word_to_string(res.streams[s], res.alphabet_max[s]);
        std::ofstream(path, std::ios::binary) << digits << '\n';
        r.rows.push_back({{"base", res.labels[s]},
                          {"digits", res.streams[s].size()},
                          {"file", path.string()},
                          {"prefix", digits.substr(0, 40)}});
    }
    if (!res.complete) r.exit_code = kBudget;
    return r;
}

Report cmd_analyze(const AnalyzeArgs& a, const Context& ctx) {
    auto sys = make_system(a.base, a.assume_irreducible);
    const PisotPtr& beta = sys->base();
    std::string text = read_file(a.digits_path);
    std::string clean;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) clean += c;
    }
    Word digits = parse_word(clean, sys->alphabet_max());
    if (digits.empty()) throw Error(ErrorCode::EmptyWord, "no digits in " + a.digits_path);
    Report r;
    r.fields["base"] = beta->label();
    r.fields["digits"] = digits.size();
    r.fields["admissible"] = sys->is_admissible(digits);
    r.table_name = "prefixes";
    if (beta->is_integer()) {
        long b = beta->floor_beta().get_si();
        std::vector<std::size_t> lengths = a.n;
        if (lengths.empty()) {
            std::size_t avail = digits.size();
            while (avail && avail + default_guard(b, avail) > digits.size()) --avail;
            lengths = default_lengths(avail);
        }
        for (std::size_t n : lengths) {
            if (n == 0) continue;
            ojson row = {{"n", n}};
            Word prefix(digits.begin(), digits.begin() + static_cast<long>(std::min(n, digits.size())));
            row["simple_discrepancy"] = number(simple_discrepancy(prefix, static_cast<int>(b)), ctx);
            if (n + default_guard(b, n) <= digits.size()) {
                OrbitPoints pts = orbit_points(digits, b, n);
                // sorted points move by at most the error, so D_N moves by at most twice it
                row["extreme_discrepancy"] = number(extreme_discrepancy(pts.points), ctx);
                row["error_band"] = number(Rational(2) * pts.error_bound, ctx);
            }
            r.rows.push_back(row);
        }
        return r;
    }
    BlockTable table(*sys, a.k);
    r.fields["k"] = a.k;
    std::vector<std::size_t> lengths = a.n.empty() ? default_lengths(digits.size()) : a.n;
    for (std::size_t n : lengths) {
        if (n < a.k || n > digits.size()) throw Error(ErrorCode::InvalidArgument, "prefix length out of range");
        Word prefix(digits.begin(), digits.begin() + static_cast<long>(n));
        r.rows.push_back({{"n", n}, {"block_deviation", number(block_frequency_deviation(table, prefix), ctx)}});
    }
    return r;
}

}  // namespace pisotnorm::cli
