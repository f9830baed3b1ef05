#include "output.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <ostream>

namespace pisotnorm::cli {

namespace {

bool is_number(const ojson& v) { return v.is_object() && v.size() == 2 && v.contains("exact") && v.contains("decimal"); }

std::string scalar(const ojson& v) {
    if (v.is_string()) return v.get<std::string>();
    if (is_number(v)) return v["exact"].get<std::string>();
    return v.dump();
}

// Flattens nested objects into dotted keys; numbers stay whole.
void flatten(const ojson& v, const std::string& prefix, std::vector<std::pair<std::string, ojson>>& out) {
    if (v.is_object() && !is_number(v)) {
        for (auto it = v.begin(); it != v.end(); ++it) {
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        }
        return;
    }
    out.emplace_back(prefix, v);
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::vector<std::string> columns(const std::vector<ojson>& rows) {
    std::vector<std::string> cols;
    for (const auto& row : rows) {
        std::vector<std::pair<std::string, ojson>> flat;
        flatten(row, "", flat);
        for (const auto& [k, v] : flat) {
            if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
        }
    }
    return cols;
}

std::map<std::string, ojson> cells(const ojson& row) {
    std::vector<std::pair<std::string, ojson>> flat;
    flatten(row, "", flat);
    return {flat.begin(), flat.end()};
}

void render_csv(const Report& r, std::ostream& os) {
    if (r.rows.empty()) {
        std::vector<std::pair<std::string, ojson>> flat;
        flatten(r.fields, "", flat);
        os << "key,value,decimal\n";
        for (const auto& [k, v] : flat) {
            os << csv_cell(k) << ',' << csv_cell(scalar(v)) << ',';
            if (is_number(v)) os << csv_cell(v["decimal"].get<std::string>());
            os << '\n';
        }
        return;
    }
    auto cols = columns(r.rows);
    // numbers get an extra decimal column
    std::vector<bool> numeric(cols.size(), false);
    for (const auto& row : r.rows) {
        auto c = cells(row);
        for (std::size_t i = 0; i < cols.size(); ++i) {
            auto it = c.find(cols[i]);
            if (it != c.end() && is_number(it->second)) numeric[i] = true;
        }
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
        os << (i ? "," : "") << csv_cell(cols[i]);
        if (numeric[i]) os << ',' << csv_cell(cols[i] + "_decimal");
    }
    os << '\n';
    for (const auto& row : r.rows) {
        auto c = cells(row);
        for (std::size_t i = 0; i < cols.size(); ++i) {
            auto it = c.find(cols[i]);
            os << (i ? "," : "");
            if (it != c.end()) os << csv_cell(scalar(it->second));
            if (numeric[i]) {
                os << ',';
                if (it != c.end() && is_number(it->second)) os << csv_cell(it->second["decimal"].get<std::string>());
            }
        }
        os << '\n';
    }
}

std::string text_value(const ojson& v) {
    if (is_number(v)) {
        std::string e = v["exact"].get<std::string>();
        std::string d = v["decimal"].get<std::string>();
        return e == d ? e : e + "  (~" + d + ")";
    }
    return scalar(v);
}

void render_text(const Report& r, std::ostream& os) {
    std::vector<std::pair<std::string, ojson>> flat;
    flatten(r.fields, "", flat);
    std::size_t width = 0;
    for (const auto& [k, v] : flat) width = std::max(width, k.size());
    for (const auto& [k, v] : flat) os << k << std::string(width - k.size(), ' ') << "  " << text_value(v) << '\n';
    if (r.rows.empty()) return;
    if (!flat.empty()) os << '\n';
    auto cols = columns(r.rows);
    std::vector<std::vector<std::string>> grid;
    std::vector<std::size_t> w(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) w[i] = cols[i].size();
    for (const auto& row : r.rows) {
        auto c = cells(row);
        std::vector<std::string> line;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            auto it = c.find(cols[i]);
            std::string s;
            if (it != c.end()) s = is_number(it->second) ? it->second["decimal"].get<std::string>() : scalar(it->second);
            w[i] = std::max(w[i], s.size());
            line.push_back(std::move(s));
        }
        grid.push_back(std::move(line));
    }
    auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            os << line[i];
            if (i + 1 < line.size()) os << std::string(w[i] - line[i].size() + 2, ' ');
        }
        os << '\n';
    };
    emit(cols);
    for (const auto& line : grid) emit(line);
}

}  // namespace

void render(const Report& report, const Context& ctx) {
    std::ostream& os = *ctx.out;
    switch (ctx.format) {
        case Format::Json: {
            ojson doc = report.fields;
            if (!report.rows.empty()) doc[report.table_name] = report.rows;
            os << doc.dump(2) << '\n';
            break;
        }
        case Format::Csv:
            render_csv(report, os);
            break;
        case Format::Text:
            render_text(report, os);
            break;
    }
}

ojson number(const Rational& q, const Context& ctx) {
    return {{"exact", to_string(q)}, {"decimal", to_decimal(q, ctx.decimal_digits)}};
}

ojson number(const FieldElement& x, const Context& ctx) {
    if (x.is_rational()) return number(x.rational_value(), ctx);
    // enough bits for the requested digits plus slack
    auto prec = static_cast<mpfr_prec_t>(ctx.decimal_digits * 4 + 64);
    RealInterval r = x.enclosure(prec);
    Rational mid = (r.lower() + r.upper()) / 2;
    return {{"exact", x.to_string()}, {"decimal", to_decimal(mid, ctx.decimal_digits)}};
}

ojson number(const RealInterval& r, const Context& ctx) {
    return {{"lower", to_decimal(r.lower(), ctx.decimal_digits)}, {"upper", to_decimal(r.upper(), ctx.decimal_digits)}};
}

std::string canonical_base(const std::string& text) {
    std::string t;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (t == "phi" || t == "golden") return "x^2-x-1";
    if (t == "plastic") return "x^3-x-1";
    if (t == "tribonacci") return "x^3-x^2-x-1";
    if (!t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        if (t.size() > 18 || std::stol(t) < 2) throw Error(ErrorCode::InvalidArgument, "integer base must lie in [2, 10^18)");
        return "x-" + t;
    }
    return t;
}

PisotPtr parse_base(const std::string& text, bool assume_irreducible) {
    CertifyOptions opts;
    opts.assume_irreducible = assume_irreducible;
    return make_pisot(canonical_base(text), opts);
}

std::shared_ptr<const BetaSystem> make_system(const std::string& text, bool assume_irreducible) {
    return std::make_shared<const BetaSystem>(parse_base(text, assume_irreducible));
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotMonic:
        case ErrorCode::Reducible:
        case ErrorCode::NotPisot:
        case ErrorCode::NoRealRootAboveOne:
            return kCertification;
        case ErrorCode::FeasibilityViolated:
        case ErrorCode::NoCandidateAccepted:
            return kBoundViolation;
        case ErrorCode::EnumerationBudgetExceeded:
        case ErrorCode::CandidateBudgetExceeded:
        case ErrorCode::BudgetExhausted:
        case ErrorCode::OrbitBudgetExceeded:
            return kBudget;
        default:
            return kUsage;
    }
}

}  // namespace pisotnorm::cli
