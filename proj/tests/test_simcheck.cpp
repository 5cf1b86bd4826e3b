#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "d2c/gen.hpp"
#include "d2c/ir_eval.hpp"
#include "d2c/ml_eval.hpp"
#include "d2c/sexp.hpp"
#include "d2c/simcheck.hpp"

using namespace d2c;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open " << path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

IrProgram load_corpus(const std::string& name) {
    std::string root = D2C_SOURCE_DIR;
    return from_sexp(parse_text(slurp(root + "/corpus/" + name)));
}

IrProgram parse_program(const std::string& text) {
    return from_sexp(parse_text(text));
}

MlValue mv_int(long v) { return MlValue{BigInt(v)}; }
MlValue mv_chars(std::string s) { return MlValue{MlValue::VChars{std::move(s)}}; }

}  // namespace

TEST_CASE("value_rel pairs ground values by kind") {
    CHECK(value_rel(SrcValue{BigInt(42)}, mv_int(42)));
    CHECK_FALSE(value_rel(SrcValue{BigInt(42)}, mv_int(41)));
    CHECK(value_rel(SrcValue{true}, MlValue{true}));
    CHECK_FALSE(value_rel(SrcValue{true}, MlValue{false}));
    CHECK(value_rel(SrcValue{'k'}, MlValue{'k'}));
    CHECK(value_rel(SrcValue{std::string("ab")}, mv_chars("ab")));
    CHECK_FALSE(value_rel(SrcValue{std::string("ab")}, mv_chars("ba")));
    // strings relate to char lists, not to packed strings or other kinds
    CHECK_FALSE(value_rel(SrcValue{std::string("ab")},
                          MlValue{MlValue::VStr{"ab"}}));
    CHECK_FALSE(value_rel(SrcValue{BigInt(1)}, MlValue{true}));
    CHECK_FALSE(value_rel(SrcValue{BigInt(97)}, MlValue{'a'}));
}

TEST_CASE("state_rel wants byte-equal output and paired cells") {
    SrcResult s;
    s.output = "x";
    s.cells = {{"a", SrcValue{BigInt(3)}}, {"b", SrcValue{std::string("hi")}}};
    TgtState t;
    t.output = "x";
    t.store = {{mv_int(3), "a"}, {mv_chars("hi"), "b"}};
    CHECK(state_rel(s, t));

    TgtState wrong_out = t;
    wrong_out.output = "y";
    CHECK_FALSE(state_rel(s, wrong_out));

    TgtState wrong_label = t;
    wrong_label.store[0].label = "z";
    CHECK_FALSE(state_rel(s, wrong_label));

    TgtState wrong_value = t;
    wrong_value.store[0].value = mv_int(4);
    CHECK_FALSE(state_rel(s, wrong_value));

    TgtState short_store = t;
    short_store.store.pop_back();
    CHECK_FALSE(state_rel(s, short_store));

    TgtState swapped = t;
    std::swap(swapped.store[0], swapped.store[1]);
    CHECK_FALSE(state_rel(s, swapped));
}

TEST_CASE("res_rel pairs Done with unit and Timeout with Timeout") {
    SrcResult done;
    done.status = RunStatus::Done;
    SrcResult timeout;
    timeout.status = RunStatus::Timeout;

    TgtResult unit_res;
    unit_res.value = MlValue{MlValue::VUnit{}};
    TgtResult int_res;
    int_res.value = mv_int(0);
    TgtResult timeout_res;
    timeout_res.kind = TgtResult::Kind::Timeout;
    TgtResult raise_res;
    raise_res.kind = TgtResult::Kind::Raise;
    raise_res.value = MlValue{MlValue::VExn{"Dafny.Break", std::nullopt}};

    CHECK(res_rel(done, unit_res));
    CHECK_FALSE(res_rel(done, int_res));
    CHECK_FALSE(res_rel(done, timeout_res));
    CHECK_FALSE(res_rel(done, raise_res));
    CHECK(res_rel(timeout, timeout_res));
    CHECK_FALSE(res_rel(timeout, unit_res));
}

TEST_CASE("corpus programs check Related") {
    for (const char* name :
         {"hello.dfy.sexp", "factorial.dfy.sexp", "break_continue.dfy.sexp",
          "labeled_nested.dfy.sexp", "cross_module.dfy.sexp"}) {
        CAPTURE(name);
        DiffOutcome o = check_simulation(load_corpus(name), CheckConfig{});
        CHECK(o.kind == DiffKind::Related);
        CHECK(o.fuel_used > 0);
    }
    CheckConfig big;
    big.src_clock = 400000;
    DiffOutcome o = check_simulation(load_corpus("loop_100k.dfy.sexp"), big);
    CHECK(o.kind == DiffKind::Related);
}

TEST_CASE("source timeout and source error both skip") {
    DiffOutcome spin = check_simulation(
        parse_program("(program (module _module (method Main () () "
                      "((while (bool true) ())))))"),
        CheckConfig{});
    CHECK(spin.kind == DiffKind::SourceSkip);
    CHECK(spin.skip_status == RunStatus::Timeout);
    CHECK(spin.ok());

    DiffOutcome div0 = check_simulation(
        parse_program("(program (module _module (method Main () () "
                      "((print (div 1 0))))))"),
        CheckConfig{});
    CHECK(div0.kind == DiffKind::SourceSkip);
    CHECK(div0.skip_status == RunStatus::Err);
}

TEST_CASE("mutations produce classified mismatches on witness programs") {
    CheckConfig cfg;

    // dropped break absorb: the loop's Break escapes as an uncaught raise
    cfg.compile.mutations = {CompilerMutation::DropBreakHandler};
    DiffOutcome o = check_simulation(load_corpus("break_continue.dfy.sexp"), cfg);
    CHECK(o.kind == DiffKind::ResultMismatch);

    // swapped <= normalization runs factorial's loop one iteration short
    cfg.compile.mutations = {CompilerMutation::SwapLeNormalization};
    o = check_simulation(load_corpus("factorial.dfy.sexp"), cfg);
    CHECK_FALSE(o.ok());

    // skipping implode makes print a dynamic type error
    cfg.compile.mutations = {CompilerMutation::SkipImplode};
    o = check_simulation(load_corpus("hello.dfy.sexp"), cfg);
    CHECK(o.kind == DiffKind::ResultMismatch);

    // int refs starting at 1 leave an unassigned out-param observable
    cfg.compile.mutations = {CompilerMutation::IntRefsStartAtOne};
    o = check_simulation(
        parse_program("(program (module _module "
                      "(method Leave ((a int)) ((r int)) ())"
                      "(method Main () () "
                      "((decl x int 5) (call (x) _module.Leave (2))"
                      " (print (var x))))))"),
        cfg);
    CHECK_FALSE(o.ok());

    // per-loop return absorb stops return from leaving the loop
    cfg.compile.mutations = {CompilerMutation::ReturnHandlerInsideLoops};
    o = check_simulation(
        parse_program("(program (module _module (method Main () () "
                      "((decl i int 0)"
                      " (while (lt (var i) 3)"
                      "  ((assign i (add (var i) 1)) (return)))"
                      " (print (var i))))))"),
        cfg);
    CHECK_FALSE(o.ok());
}

TEST_CASE("fuel search retries until the target finishes") {
    // needs far more target fuel than the source clock it starts from
    IrProgram p = load_corpus("loop_100k.dfy.sexp");
    CheckConfig cfg;
    cfg.src_clock = 400000;
    DiffOutcome o = check_simulation(p, cfg);
    CHECK(o.kind == DiffKind::Related);
    CHECK(o.fuel_used <= cfg.fuel_cap);

    // with a cap below what the program needs, the check reports exhaustion
    CheckConfig capped = cfg;
    capped.fuel_cap = 1 << 10;
    o = check_simulation(p, capped);
    CHECK(o.kind == DiffKind::TargetFuelExhausted);
    CHECK(o.cap_reached == capped.fuel_cap);
}

TEST_CASE("generator yields valid, deterministic programs") {
    GenConfig cfg;
    cfg.features = GenFeatures::all();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        cfg.seed = seed;
        IrProgram a = generate(cfg);
        IrProgram b = generate(cfg);
        CAPTURE(seed);
        CHECK(validate(a).ok());
        CHECK(print(to_schema(a)) == print(to_schema(b)));
    }
}

TEST_CASE("feature toggles prune constructs") {
    GenConfig cfg;
    cfg.features = GenFeatures::none();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        cfg.seed = seed;
        std::string s = print(to_schema(generate(cfg)));
        CAPTURE(seed);
        CHECK(s.find("(while ") == std::string::npos);
        CHECK(s.find("(labeled ") == std::string::npos);
        CHECK(s.find("(call ") == std::string::npos);
        // Main's trailing newline print still uses a string literal, but no
        // string-typed bindings or concatenation appear
        CHECK(s.find(" string ") == std::string::npos);
        CHECK(s.find("(concat ") == std::string::npos);
        CHECK(validate(generate(cfg)).ok());
    }
}

TEST_CASE("to_schema inverts from_sexp on corpus and generated programs") {
    for (const char* name :
         {"hello.dfy.sexp", "factorial.dfy.sexp", "labeled_nested.dfy.sexp",
          "cross_module.dfy.sexp"}) {
        CAPTURE(name);
        IrProgram p = load_corpus(name);
        CHECK(print(to_schema(from_sexp(to_schema(p)))) ==
              print(to_schema(p)));
    }
    GenConfig cfg;
    cfg.features = GenFeatures::all();
    for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
        cfg.seed = seed;
        IrProgram p = generate(cfg);
        SExp enc = to_schema(p);
        CAPTURE(seed);
        CHECK(print(to_schema(from_sexp(enc))) == print(enc));
    }
}

TEST_CASE("fuzz run stays Related and counts cases") {
    FuzzConfig cfg;
    cfg.count = 120;
    cfg.seed = 99;
    cfg.features = GenFeatures::all();
    FuzzSummary sum = fuzz(cfg);
    CHECK(sum.total == 120);
    CHECK(sum.mismatches() == 0);
    CHECK(sum.related + sum.skips() == sum.total);
    // skip budget: harness stays useful only if most cases actually compare
    CHECK(sum.skips() * 10 <= sum.total);
    CHECK(sum.failures.empty());
}

TEST_CASE("fuzz is deterministic for a fixed seed") {
    FuzzConfig cfg;
    cfg.count = 60;
    cfg.seed = 5;
    cfg.features = GenFeatures::all();
    FuzzSummary a = fuzz(cfg);
    cfg.parallel = false;
    FuzzSummary b = fuzz(cfg);
    CHECK(a.total == b.total);
    CHECK(a.related == b.related);
    CHECK(a.skip_err == b.skip_err);
    CHECK(a.skip_timeout == b.skip_timeout);
}

TEST_CASE("case seeds differ across indexes and bases") {
    CHECK(fuzz_case_seed(0, 0) != fuzz_case_seed(0, 1));
    CHECK(fuzz_case_seed(0, 0) != fuzz_case_seed(1, 0));
    CHECK(fuzz_case_seed(7, 3) == fuzz_case_seed(7, 3));
}

TEST_CASE("mutated fuzz writes witness directories") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "d2c_witness_test";
    fs::remove_all(dir);

    FuzzConfig cfg;
    cfg.count = 40;
    cfg.seed = 0;
    cfg.features = GenFeatures::all();
    cfg.check.compile.mutations = {CompilerMutation::SkipImplode};
    cfg.witness_dir = dir.string();
    FuzzSummary sum = fuzz(cfg);
    REQUIRE(sum.mismatches() > 0);
    REQUIRE_FALSE(sum.failures.empty());

    fs::path one;
    int found = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        ++found;
        one = entry.path();
    }
    CHECK(found == static_cast<int>(sum.failures.size()));
    for (const char* f :
         {"program.dfy.sexp", "source_output.txt", "source_result.txt",
          "target.cml.sml", "target_output.txt", "target_result.txt",
          "outcome.txt"})
        CHECK(fs::exists(one / f));

    // the recorded program re-parses and still shows the divergence
    IrProgram p = parse_program(slurp((one / "program.dfy.sexp").string()));
    DiffOutcome again = check_simulation(p, cfg.check);
    CHECK_FALSE(again.ok());
    fs::remove_all(dir);
}

TEST_CASE("summary text names every counter") {
    FuzzConfig cfg;
    cfg.count = 30;
    cfg.seed = 11;
    cfg.features = GenFeatures::all();
    std::string s = fuzz(cfg).describe();
    for (const char* key : {"cases", "related", "skip"})
        CHECK(s.find(key) != std::string::npos);
}
