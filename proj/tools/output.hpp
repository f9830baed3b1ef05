#pragma once

// Shared plumbing for the command-line tool: the rendering of one command's
// result as JSON, CSV or plain text, and small conversions used by every
// subcommand.

#include "pisotnorm/generators.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pisotnorm::cli {

using ojson = nlohmann::ordered_json;

enum class Format { Json, Csv, Text };

struct Context {
    Format format = Format::Text;
    unsigned jobs = 1;
    int decimal_digits = 12;
    ojson seed = ojson::object();  // defaults from --seed-config
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
};

/// One command's result: scalar fields plus an optional table.
struct Report {
    ojson fields = ojson::object();
    std::string table_name = "rows";
    std::vector<ojson> rows;
    int exit_code = 0;
};

enum Exit { kOk = 0, kUsage = 1, kCertification = 2, kBoundViolation = 3, kBudget = 4 };

void render(const Report& report, const Context& ctx);

/// {"exact": "p/q", "decimal": "..."}.
ojson number(const Rational& q, const Context& ctx);
ojson number(const FieldElement& x, const Context& ctx);
ojson number(const RealInterval& r, const Context& ctx);

/// Accepts "x^3-x-1", an integer "10", or the names phi, plastic, tribonacci,
/// and returns the polynomial text.
std::string canonical_base(const std::string& text);
PisotPtr parse_base(const std::string& text, bool assume_irreducible);
std::shared_ptr<const BetaSystem> make_system(const std::string& text, bool assume_irreducible);

int exit_code_for(ErrorCode code);

}  // namespace pisotnorm::cli
