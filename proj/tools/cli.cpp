#include "cli.hpp"

#include "commands.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace pisotnorm::cli {

namespace {

void add_base(CLI::App* sub, BaseArgs& a) {
    sub->add_option("base", a.base, "minimal polynomial (x^3-x-1), integer base, or phi/plastic/tribonacci")->required();
    sub->add_flag("--assume-irreducible", a.assume_irreducible, "skip the irreducibility proof for degree > 4");
}

ojson load_seed(const std::string& path) {
    if (path.empty()) return ojson::object();
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
    try {
        return ojson::parse(in);
    } catch (const ojson::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("seed config: ") + e.what());
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact beta-expansions, normality bounds and normal-number generators"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "text";
    std::string seed_path;
    Context ctx;
    app.add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--jobs", ctx.jobs, "worker threads for enumerations")->check(CLI::PositiveNumber);
    app.add_option("--seed-config", seed_path, "JSON file with default generator settings");
    app.add_option("--decimal-digits", ctx.decimal_digits, "digits in decimal renderings")->check(CLI::Range(1, 1000));

    std::function<Report()> action;

    BaseArgs certify;
    auto* s = app.add_subcommand("certify", "certify a Pisot number");
    add_base(s, certify);
    s->callback([&] { action = [&] { return cmd_certify(certify, ctx); }; });

    ExpansionArgs expansion;
    s = app.add_subcommand("expansion", "greedy and quasi-greedy expansions of 1");
    add_base(s, expansion);
    s->add_flag("--orbit", expansion.orbit, "list the orbit of 1");
    s->callback([&] { action = [&] { return cmd_expansion(expansion, ctx); }; });

    WordsArgs words;
    s = app.add_subcommand("words", "count admissible words of length n");
    add_base(s, words);
    s->add_option("-n,--length", words.n, "word length")->required();
    s->add_flag("--list", words.list, "list the words");
    s->add_option("--limit", words.limit, "maximum words listed");
    s->callback([&] { action = [&] { return cmd_words(words, ctx); }; });

    CylinderArgs cylinder;
    s = app.add_subcommand("cylinder", "endpoints and measures of a cylinder");
    add_base(s, cylinder);
    s->add_option("word", cylinder.word, "digits, comma separated when a digit exceeds 9")->required();
    s->callback([&] { action = [&] { return cmd_cylinder(cylinder, ctx); }; });

    MeasureArgs measure;
    s = app.add_subcommand("measure", "Parry measure of blocks or of an interval");
    add_base(s, measure);
    s->add_option("-k", measure.k, "block length");
    s->add_option("--left", measure.left, "rational left endpoint");
    s->add_option("--right", measure.right, "rational right endpoint");
    s->callback([&] { action = [&] { return cmd_measure(measure, ctx); }; });

    ConstantsArgs consts;
    s = app.add_subcommand("constants", "explicit constants of the construction");
    add_base(s, consts);
    s->add_option("--epsilon", consts.epsilon, "rational epsilon");
    s->add_option("-k", consts.k, "block length");
    s->add_option("--zero-run", consts.zero_run, "exact or blichfeldt")->check(CLI::IsMember({"exact", "blichfeldt"}));
    s->add_option("--delta", consts.delta, "also report the integer-base k for this delta");
    s->add_option("-t", consts.t, "number of integer bases for --delta");
    s->callback([&] { action = [&] { return cmd_constants(consts, ctx); }; });

    CensusArgs census;
    s = app.add_subcommand("census", "count non-normal words and check the bounds");
    add_base(s, census);
    s->add_option("-n,--length", census.n, "word lengths")->required();
    s->add_option("--epsilon", census.epsilon, "rational epsilons");
    s->add_option("-k", census.k, "block lengths");
    s->add_option("--zero-run", census.zero_run, "exact or blichfeldt")->check(CLI::IsMember({"exact", "blichfeldt"}));
    s->add_option("--budget", census.budget, "maximum words enumerated");
    s->callback([&] { action = [&] { return cmd_census(census, ctx); }; });

    InscribeArgs inscribe;
    s = app.add_subcommand("inscribe", "coarsest cylinder inside an interval");
    add_base(s, inscribe);
    s->add_option("left", inscribe.left, "rational left endpoint")->required();
    s->add_option("right", inscribe.right, "rational right endpoint")->required();
    s->callback([&] { action = [&] { return cmd_inscribe(inscribe, ctx); }; });

    GenerateArgs gen;
    s = app.add_subcommand("generate", "run a generator and write digits and trace");
    s->add_option("config", gen.config, "JSON config file");
    s->add_option("-o,--out-dir", gen.out_dir, "output directory");
    s->add_option("--target", gen.target, "override target_digits");
    s->add_flag("--timing", gen.timing, "record wall time in the trace");
    s->callback([&] { action = [&] { return cmd_generate(gen, ctx); }; });

    AnalyzeArgs analyze;
    s = app.add_subcommand("analyze", "discrepancy and block statistics of a digit file");
    s->add_option("digits", analyze.digits_path, "digit file")->required();
    s->add_option("base", analyze.base, "base of the digits")->required();
    s->add_option("-n,--length", analyze.n, "prefix lengths");
    s->add_option("-k", analyze.k, "block length for non-integer bases");
    s->add_flag("--assume-irreducible", analyze.assume_irreducible, "skip the irreducibility proof");
    s->callback([&] { action = [&] { return cmd_analyze(analyze, ctx); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    ctx.format = format == "json" ? Format::Json : format == "csv" ? Format::Csv : Format::Text;
    ctx.out = &out;
    ctx.err = &err;
    try {
        ctx.seed = load_seed(seed_path);
        Report r = action();
        render(r, ctx);
        return r.exit_code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace pisotnorm::cli
