#include <doctest.h>

#include "d2c/compile.hpp"
#include "d2c/ir.hpp"
#include "d2c/ml_ast.hpp"
#include "d2c/ml_eval.hpp"
#include "d2c/sexp.hpp"

using namespace d2c;
using namespace d2c::ml;

namespace {

// shadow the IR literal builders of the same name
using d2c::ml::lit_bool;
using d2c::ml::lit_char;
using d2c::ml::lit_int;

TgtResult eval_exp(const MlExpPtr& e, long long fuel = 1000,
                   TgtState* out_state = nullptr) {
    TgtState st;
    st.fuel = fuel;
    TgtResult r = eval_ml(st, nullptr, e);
    if (out_state) *out_state = st;
    return r;
}

MlProgramT compile_text(const std::string& text) {
    return compile_program(from_sexp(parse_text(text)));
}

TEST_CASE("ref, assign, deref") {
    // let val x = ref 0 in (x := 1; ! x) end
    auto e = let_("x", ref_(lit_int(0), "x"),
                  seq(assign(var("x"), lit_int(1)), deref(var("x"))));
    TgtState st;
    TgtResult r = eval_exp(e, 1000, &st);
    REQUIRE(r.is_val());
    CHECK(std::get<BigInt>(r.value.node) == 1);
    REQUIRE(st.store.size() == 1);
    CHECK(st.store[0].label == "x");
    CHECK(std::get<BigInt>(st.store[0].value.node) == 1);
}

TEST_CASE("immediate handle catches") {
    auto e = handle_(raise_(con("Dafny.Break")), "CML_e", unit());
    TgtResult r = eval_exp(e);
    CHECK(r.is_unit());
}

TEST_CASE("handler binds the exception value") {
    auto e = handle_(raise_(con("Dafny.LabeledBreak", {char_list("out")})),
                     "CML_e", var("CML_e"));
    TgtResult r = eval_exp(e);
    REQUIRE(r.is_val());
    auto* exn = std::get_if<MlValue::VExn>(&r.value.node);
    REQUIRE(exn != nullptr);
    CHECK(exn->constructor == "Dafny.LabeledBreak");
}

TEST_CASE("re-raise chain: inner re-raises, outer absorbs") {
    // raise (LabeledBreak "a"), handled first by a "b" check, then an "a" one
    auto reraise_unless = [](const char* want, MlExpPtr body) {
        return handle_(std::move(body), "CML_e",
                       if_(prim(MlPrim::PolyEq, var("CML_e"),
                                con("Dafny.LabeledBreak", {char_list(want)})),
                           unit(), raise_(var("CML_e"))));
    };
    auto inner = reraise_unless(
        "b", raise_(con("Dafny.LabeledBreak", {char_list("a")})));
    TgtResult escaped = eval_exp(inner);
    CHECK(escaped.kind == TgtResult::Kind::Raise);

    auto outer = reraise_unless(
        "a", reraise_unless(
                 "b", raise_(con("Dafny.LabeledBreak", {char_list("a")}))));
    CHECK(eval_exp(outer).is_unit());
}

TEST_CASE("application costs one fuel per closure entry") {
    auto id = fn("x", var("x"));
    auto e = app(id, lit_int(7));
    TgtState st;
    TgtResult r = eval_exp(e, 5, &st);
    REQUIRE(r.is_val());
    CHECK(st.fuel == 4);
    CHECK(eval_exp(app(fn("x", var("x")), lit_int(7)), 0).kind ==
          TgtResult::Kind::Timeout);
}

TEST_CASE("letrec iterates tail self-applications without C++ depth") {
    // fun down n = if n < 1 then 0 else down (n - 1)
    auto body = if_(prim(MlPrim::IntLt, var("n"), lit_int(1)), lit_int(0),
                    app(var("down"), prim(MlPrim::IntSub, var("n"), lit_int(1))));
    auto e = letrec({{"down", "n", body}}, app(var("down"), lit_int(100000)));
    TgtResult r = eval_exp(e, 200000);
    REQUIRE(r.is_val());
    CHECK(std::get<BigInt>(r.value.node) == 0);
}

TEST_CASE("poly equality") {
    auto eq = [](MlExpPtr a, MlExpPtr b) {
        return prim(MlPrim::PolyEq, std::move(a), std::move(b));
    };
    CHECK(std::get<bool>(eval_exp(eq(lit_int(3), lit_int(3))).value.node));
    CHECK_FALSE(
        std::get<bool>(eval_exp(eq(char_list("ab"), char_list("ba"))).value.node));
    CHECK(std::get<bool>(
        eval_exp(eq(con("Dafny.Break"), con("Dafny.Break"))).value.node));
    CHECK_FALSE(std::get<bool>(
        eval_exp(eq(con("Dafny.Break"), con("Dafny.Return"))).value.node));
    // mixed ground kinds compare unequal rather than erroring
    CHECK_FALSE(
        std::get<bool>(eval_exp(eq(lit_int(0), lit_bool(false))).value.node));
    // comparing closures is a dynamic type error
    CHECK(eval_exp(eq(fn("x", var("x")), fn("y", var("y")))).kind ==
          TgtResult::Kind::TypeErr);
}

TEST_CASE("list primitives and implode") {
    auto chars = prim(MlPrim::ListCons, lit_char('a'),
                      prim(MlPrim::ListAppend, char_list("bc"), char_list("d")));
    TgtResult r = eval_exp(implode(chars));
    REQUIRE(r.is_val());
    auto* s = std::get_if<MlValue::VStr>(&r.value.node);
    REQUIRE(s != nullptr);
    CHECK(s->text == "abcd");
}

TEST_CASE("print requires a packed string") {
    TgtState st;
    TgtResult ok = eval_exp(print_prim(implode(char_list("hi"))), 1000, &st);
    CHECK(ok.is_unit());
    CHECK(st.output == "hi");
    TgtResult bad = eval_exp(print_prim(char_list("hi")));
    CHECK(bad.kind == TgtResult::Kind::TypeErr);
}

TEST_CASE("int to chars handles signs") {
    auto show = [](long v) {
        TgtResult r = eval_exp(implode(int_to_chars(lit_int(BigInt(v)))));
        return std::get<MlValue::VStr>(r.value.node).text;
    };
    CHECK(show(0) == "0");
    CHECK(show(120) == "120");
    CHECK(show(-45) == "-45");
}

TEST_CASE("compiled hello runs") {
    TgtRun run = run_ml_program(
        compile_text("(program (module _module (method Main () () "
                     "((print (str \"Hello, Cake\\n\"))))))"),
        1000);
    CHECK(run.result.is_unit());
    CHECK(run.state.output == "Hello, Cake\n");
}

TEST_CASE("compiled infinite loop exhausts fuel") {
    TgtRun run = run_ml_program(
        compile_text("(program (module _module (method Main () () "
                     "((while (bool true) ())))))"),
        50);
    CHECK(run.result.kind == TgtResult::Kind::Timeout);
    CHECK(run.state.fuel == 0);
}

TEST_CASE("unhandled exception surfaces as Raise, not a crash") {
    MlProgramT p;
    p.decs.push_back(runtime_structure());
    std::vector<MlFunBind> funs;
    funs.push_back(
        {"Main", "CML_unit",
         raise_(con("Dafny.LabeledBreak", {char_list("nowhere")}))});
    p.decs.push_back({MlDec::StructureDec{
        "_module", {MlDec{MlDec::FunGroup{std::move(funs)}}}}});
    TgtRun run = run_ml_program(p, 100);
    REQUIRE(run.result.kind == TgtResult::Kind::Raise);
    auto* exn = std::get_if<MlValue::VExn>(&run.result.value.node);
    REQUIRE(exn != nullptr);
    CHECK(exn->constructor == "Dafny.LabeledBreak");
}

TEST_CASE("missing Main is a type error result") {
    MlProgramT p;
    p.decs.push_back(runtime_structure());
    TgtRun run = run_ml_program(p, 100);
    CHECK(run.result.kind == TgtResult::Kind::TypeErr);
}

TEST_CASE("fuel determinism and timeout stability on compiled code") {
    MlProgramT p = compile_text(
        "(program (module _module (method Main () () "
        "((decl i int 0)"
        " (while (lt (var i) 6)"
        "  ((assign i (add (var i) 1)) (print (var i))))))))");
    TgtRun base = run_ml_program(p, 1 << 16);
    REQUIRE(base.result.is_unit());
    long long used = (1 << 16) - base.state.fuel;
    for (long long extra : {0, 1, 9, 1000}) {
        TgtRun again = run_ml_program(p, used + extra);
        CHECK(again.result.is_unit());
        CHECK(again.state.output == base.state.output);
        CHECK(again.state.fuel == extra);
    }
    for (long long fuel = 0; fuel < used; ++fuel)
        CHECK(run_ml_program(p, fuel).result.kind == TgtResult::Kind::Timeout);
}

TEST_CASE("curried application and recursive group environment") {
    // fun add a b = a + b  and  call via the group
    auto addbody = fn("b", prim(MlPrim::IntAdd, var("a"), var("b")));
    auto e = letrec({{"add", "a", addbody}},
                    app(app(var("add"), lit_int(4)), lit_int(38)));
    TgtResult r = eval_exp(e);
    REQUIRE(r.is_val());
    CHECK(std::get<BigInt>(r.value.node) == 42);
}

}  // namespace
