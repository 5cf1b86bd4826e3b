#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "d2c/compile.hpp"
#include "d2c/ir.hpp"
#include "d2c/ir_eval.hpp"
#include "d2c/ml_ast.hpp"
#include "d2c/ml_eval.hpp"
#include "d2c/sexp.hpp"
#include "d2c/simcheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFinding = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string input;
    std::string output;
    std::int64_t clock = 10000;
    std::int64_t fuel_cap = 1 << 20;
    std::uint64_t seed = 0;
    int count = 1000;
    std::string features = "loops,labels,calls,outs,strings";
    bool verbose = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// parse + decode + validate; throws on any rejection (mapped to exit 2)
d2c::IrProgram load_program(const Options& opt) {
    d2c::SExp sx = d2c::parse_text(read_file(opt.input));
    d2c::IrProgram p = d2c::from_sexp(sx);
    d2c::ValidityReport report = d2c::validate(p);
    if (!report.ok())
        throw std::runtime_error("invalid program:\n" + report.to_string());
    return p;
}

d2c::GenFeatures parse_features(const std::string& csv) {
    d2c::GenFeatures f = d2c::GenFeatures::none();
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "loops") f.loops = true;
        else if (item == "labels") f.labels = true;
        else if (item == "calls") f.calls = true;
        else if (item == "outs") f.outs = true;
        else if (item == "strings") f.strings = true;
        else throw CLI::ValidationError("--features", "unknown feature: " + item);
    }
    return f;
}

void dump_src_cells(const d2c::SrcResult& r) {
    for (const auto& c : r.cells)
        std::cerr << "  " << c.name << " = " << d2c::stringify(c.final) << "\n";
}

int cmd_compile(const Options& opt) {
    d2c::IrProgram p = load_program(opt);
    std::string text = d2c::pretty(d2c::compile_program(p));
    if (opt.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.output, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + opt.output);
        out << text;
    }
    return kExitOk;
}

int cmd_run_ir(const Options& opt) {
    d2c::IrProgram p = load_program(opt);
    d2c::SrcResult r = d2c::run_program(p, opt.clock);
    std::cout << r.output << std::flush;
    std::cerr << "result: " << r.describe() << "\n";
    if (opt.verbose) dump_src_cells(r);
    return r.status == d2c::RunStatus::Done ? kExitOk : kExitFinding;
}

int cmd_run_target(const Options& opt) {
    d2c::IrProgram p = load_program(opt);
    d2c::MlProgramT t = d2c::compile_program(p);
    d2c::TgtRun run = d2c::run_ml_program(t, opt.fuel_cap);
    std::cout << run.state.output << std::flush;
    std::cerr << "result: " << run.result.describe() << "\n";
    if (opt.verbose)
        for (const auto& c : run.state.store)
            std::cerr << "  " << c.label << " = "
                      << d2c::ml_value_describe(c.value) << "\n";
    return run.result.is_unit() ? kExitOk : kExitFinding;
}

int cmd_diff(const Options& opt) {
    d2c::IrProgram p = load_program(opt);
    d2c::CheckConfig cfg;
    cfg.src_clock = opt.clock;
    cfg.fuel_cap = opt.fuel_cap;
    d2c::DiffOutcome out = d2c::check_simulation(p, cfg);
    std::cout << out.describe() << "\n";
    return out.ok() ? kExitOk : kExitFinding;
}

int cmd_fuzz(const Options& opt) {
    d2c::FuzzConfig cfg;
    cfg.count = opt.count;
    cfg.seed = opt.seed;
    cfg.features = parse_features(opt.features);
    cfg.check.src_clock = opt.clock;
    cfg.check.fuel_cap = opt.fuel_cap;
    cfg.witness_dir = opt.output;
    d2c::FuzzSummary sum = d2c::fuzz(cfg);
    std::cout << sum.describe();
    if (opt.verbose)
        for (const auto& f : sum.failures)
            std::cerr << "case " << f.case_index << " (seed " << f.case_seed
                      << "): " << f.outcome.describe() << "\n";
    if (!cfg.witness_dir.empty() && !sum.failures.empty())
        std::cerr << "witnesses written under " << cfg.witness_dir << "\n";
    return sum.mismatches() == 0 ? kExitOk : kExitFinding;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dafny-IR to CakeML-style backend with differential checking"};
    app.require_subcommand(1);

    Options opt;

    auto add_input = [&](CLI::App* sub) {
        sub->add_option("input", opt.input, ".dfy.sexp program")->required();
    };
    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--clock", opt.clock, "source interpreter clock");
        sub->add_option("--fuel-cap", opt.fuel_cap, "target fuel bound");
        sub->add_flag("-v,--verbose", opt.verbose, "dump final cells/store");
    };

    CLI::App* c = app.add_subcommand("compile", "lower a program to target syntax");
    add_input(c);
    c->add_option("-o,--output", opt.output, "output file (default stdout)");

    CLI::App* ri = app.add_subcommand("run-ir", "evaluate with the source interpreter");
    add_input(ri);
    add_run_flags(ri);

    CLI::App* rt = app.add_subcommand("run-target", "compile, then evaluate the target");
    add_input(rt);
    add_run_flags(rt);

    CLI::App* df = app.add_subcommand("diff", "differential check on one program");
    add_input(df);
    add_run_flags(df);

    CLI::App* fz = app.add_subcommand("fuzz", "generate programs and check each");
    fz->add_option("--count", opt.count, "number of cases");
    fz->add_option("--seed", opt.seed, "base seed");
    fz->add_option("--features", opt.features, "CSV of loops,labels,calls,outs,strings");
    fz->add_option("--clock", opt.clock, "source interpreter clock");
    fz->add_option("--fuel-cap", opt.fuel_cap, "target fuel bound");
    fz->add_option("-o,--output", opt.output, "witness directory for failures");
    fz->add_flag("-v,--verbose", opt.verbose, "list failing cases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(c)) return cmd_compile(opt);
        if (app.got_subcommand(ri)) return cmd_run_ir(opt);
        if (app.got_subcommand(rt)) return cmd_run_target(opt);
        if (app.got_subcommand(df)) return cmd_diff(opt);
        return cmd_fuzz(opt);
    } catch (const d2c::CodecError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
    } catch (const d2c::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kExitUsage;
}
