#pragma once

#include "output.hpp"

#include <optional>

namespace pisotnorm::cli {

struct BaseArgs {
    std::string base;
    bool assume_irreducible = false;
};

struct ExpansionArgs : BaseArgs {
    bool orbit = false;
};

struct WordsArgs : BaseArgs {
    std::size_t n = 1;
    bool list = false;
    std::size_t limit = 1000;
};

struct CylinderArgs : BaseArgs {
    std::string word;
};

struct MeasureArgs : BaseArgs {
    std::size_t k = 1;
    std::string left, right;  // optional interval
};

struct ConstantsArgs : BaseArgs {
    std::string epsilon = "1/2";
    std::size_t k = 1;
    std::string zero_run = "exact";
    std::string delta;  // optional, adds the BHS k-function
    long t = 2;
};

struct CensusArgs : BaseArgs {
    std::vector<std::size_t> n;
    std::vector<std::string> epsilon{"1/2"};
    std::vector<std::size_t> k{1};
    std::string zero_run = "exact";
    std::size_t budget = 10'000'000;
};

struct InscribeArgs : BaseArgs {
    std::string left, right;
};

struct GenerateArgs {
    std::string config;  // path; empty means the seed config alone
    std::string out_dir = ".";
    std::optional<std::size_t> target;
    bool timing = false;
};

struct AnalyzeArgs {
    std::string digits_path;
    std::string base;
    std::vector<std::size_t> n;
    std::size_t k = 1;
    bool assume_irreducible = false;
};

Report cmd_certify(const BaseArgs& a, const Context& ctx);
Report cmd_expansion(const ExpansionArgs& a, const Context& ctx);
Report cmd_words(const WordsArgs& a, const Context& ctx);
Report cmd_cylinder(const CylinderArgs& a, const Context& ctx);
Report cmd_measure(const MeasureArgs& a, const Context& ctx);
Report cmd_constants(const ConstantsArgs& a, const Context& ctx);
Report cmd_census(const CensusArgs& a, const Context& ctx);
Report cmd_inscribe(const InscribeArgs& a, const Context& ctx);
Report cmd_generate(const GenerateArgs& a, const Context& ctx);
Report cmd_analyze(const AnalyzeArgs& a, const Context& ctx);

}  // namespace pisotnorm::cli
