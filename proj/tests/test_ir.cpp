#include <doctest.h>

#include "d2c/ir.hpp"
#include "d2c/sexp.hpp"
#include "d2c/simcheck.hpp"

using namespace d2c;

namespace {

IrProgram decode(const char* text) { return from_sexp(parse_text(text)); }

const char* kHello =
    "(program (module _module (method Main () () "
    "((print (str \"Hello, Cake\\n\"))))))";

std::string wrap_main(const std::string& body) {
    return "(program (module _module (method Main () () (" + body + "))))";
}

}  // namespace

TEST_CASE("hello-world decodes") {
    IrProgram p = decode(kHello);
    REQUIRE(p.modules.size() == 1);
    CHECK(p.modules[0].name == "_module");
    REQUIRE(p.modules[0].methods.size() == 1);
    const IrMethod& m = p.modules[0].methods[0];
    CHECK(m.name == "Main");
    CHECK(m.ins.empty());
    CHECK(m.outs.empty());
    REQUIRE(m.body.size() == 1);
    auto* pr = std::get_if<IrStmt::Print>(&m.body[0]->node);
    REQUIRE(pr != nullptr);
    auto* s = std::get_if<IrExpr::LitString>(&pr->arg->node);
    REQUIRE(s != nullptr);
    CHECK(s->text == "Hello, Cake\n");
}

TEST_CASE("empty program decodes, fails validation") {
    IrProgram p = decode("(program)");
    CHECK(p.modules.empty());
    CHECK_FALSE(validate(p).ok());
}

TEST_CASE("schema error pinpoints the subtree") {
    try {
        decode("(program 5)");
        FAIL("unreachable");
    } catch (const SchemaError& e) {
        CHECK(e.path == "program[0]");
        CHECK(e.expected == "(module ...)");
    }
    CHECK_THROWS_AS(decode("(modul x)"), SchemaError);
    CHECK_THROWS_AS(decode(wrap_main("(decl x int)").c_str()), SchemaError);
    CHECK_THROWS_AS(decode(wrap_main("(char \"ab\")").c_str()), SchemaError);
}

TEST_CASE("all statement and expression forms decode") {
    const char* text =
        "(program (module _module"
        " (method Helper ((a int) (b char)) ((r int) (s string))"
        "  ((assign r (add (var a) 1))"
        "   (assign s (concat (str \"x\") (str \"y\")))))"
        " (method Main () ()"
        "  ((decl n int -3)"
        "   (decl f bool (bool false))"
        "   (decl c char (char \"q\"))"
        "   (decl t string (str \"\"))"
        "   (if (and (not (var f)) (or (lt 1 2) (ge 2 1)))"
        "       ((labeled \"out\""
        "         (while (le (var n) 9)"
        "          ((assign n (add (var n) 1))"
        "           (if (eq (var n) 5) ((break-label \"out\")) ())"
        "           (if (neq (var n) 4) ((continue)) ((continue-label \"out\")))"
        "           (break)))))"
        "       ((return)))"
        "   (decl q int 0)"
        "   (call (q t) _module.Helper ((div 7 2) (var c)))"
        "   (print (mul (var q) (mod 9 4)))"
        "   (print (gt (var n) (sub 0 1))))))"
        ")";
    IrProgram p = decode(text);
    CHECK(validate(p).ok());
    // encoder inverts the decoder on this corpus
    CHECK(print(to_schema(p)) == print(to_schema(decode(print(to_schema(p)).c_str()))));
    CHECK(p.find_method("_module.Helper") != nullptr);
    CHECK(p.find_method("_module.Missing") == nullptr);
    CHECK(p.find_method("Aux.Helper") == nullptr);
}

TEST_CASE("validate rejects misplaced control") {
    CHECK_FALSE(validate(decode(wrap_main("(break)").c_str())).ok());
    CHECK_FALSE(validate(decode(wrap_main("(continue)").c_str())).ok());
    CHECK_FALSE(
        validate(decode(wrap_main("(break-label \"x\")").c_str())).ok());
    auto rep = validate(decode(wrap_main("(break)").c_str()));
    CHECK(rep.to_string().find("loop") != std::string::npos);
}

TEST_CASE("validate rejects type mismatches") {
    CHECK_FALSE(validate(decode(wrap_main(
        "(decl x int 0) (assign x (bool true))").c_str())).ok());
    CHECK_FALSE(validate(decode(wrap_main(
        "(if 1 () ())").c_str())).ok());
    CHECK_FALSE(validate(decode(wrap_main(
        "(print (add 1 (bool true)))").c_str())).ok());
    CHECK_FALSE(validate(decode(wrap_main(
        "(print (lt (char \"a\") 1))").c_str())).ok());
    CHECK_FALSE(validate(decode(wrap_main(
        "(print (eq (str \"a\") (char \"a\")))").c_str())).ok());
    CHECK(validate(decode(wrap_main(
        "(print (lt (char \"a\") (char \"b\")))").c_str())).ok());
}

TEST_CASE("validate rejects unresolved names") {
    CHECK_FALSE(validate(decode(wrap_main("(print (var nope))").c_str())).ok());
    CHECK_FALSE(validate(decode(wrap_main("(assign nope 1)").c_str())).ok());
    CHECK_FALSE(validate(decode(wrap_main(
        "(call () _module.Nope ())").c_str())).ok());
    // scope ends with the block that declared the name
    CHECK_FALSE(validate(decode(wrap_main(
        "(if (bool true) ((decl y int 1)) ()) (print (var y))").c_str())).ok());
    CHECK(validate(decode(wrap_main(
        "(if (bool true) ((decl y int 1) (print (var y))) ())").c_str())).ok());
}

TEST_CASE("validate enforces call shapes") {
    const char* good =
        "(program (module _module"
        " (method P ((a int)) ((r int)) ((assign r (var a))))"
        " (method Main () () ((decl x int 0) (call (x) _module.P (3))))))";
    CHECK(validate(decode(good)).ok());

    auto bad = [&](const char* call) {
        std::string text =
            "(program (module _module"
            " (method P ((a int)) ((r int)) ((assign r (var a))))"
            " (method Q () ((u int) (v int)) ())"
            " (method Main () () ((decl x int 0) (decl y bool (bool false)) " +
            std::string(call) + "))))";
        return validate(decode(text.c_str())).ok();
    };
    CHECK_FALSE(bad("(call (x) _module.P ())"));          // arg arity
    CHECK_FALSE(bad("(call (x) _module.P ((bool true)))"));  // arg type
    CHECK_FALSE(bad("(call () _module.P (3))"));          // out arity
    CHECK_FALSE(bad("(call (y) _module.P (3))"));         // out type
    CHECK_FALSE(bad("(call (x x) _module.Q ())"));        // repeated out
    CHECK_FALSE(bad("(call (x z) _module.Q ())"));        // undeclared out
}

TEST_CASE("validate rejects reserved names") {
    CHECK_FALSE(validate(decode(wrap_main("(decl CML_x int 0)").c_str())).ok());
    CHECK_FALSE(validate(decode(wrap_main("(decl _0_v int 0)").c_str())).ok());
    CHECK_FALSE(validate(decode(
        "(program (module Dafny (method X () () ()))"
        " (module _module (method Main () () ())))")).ok());
    // _12_ anywhere as a prefix is reserved, _x is fine
    CHECK(validate(decode(wrap_main("(decl _x int 0)").c_str())).ok());
}

TEST_CASE("validate requires Main with empty signature") {
    CHECK_FALSE(validate(decode(
        "(program (module _module (method Main ((z int)) () ())))")).ok());
    CHECK_FALSE(validate(decode(
        "(program (module M (method Main () () ())))")).ok());
    CHECK_FALSE(validate(decode(
        "(program (module _module (method Other () () ())))")).ok());
}

TEST_CASE("validate rejects duplicate definitions") {
    CHECK_FALSE(validate(decode(
        "(program (module _module (method Main () () ())"
        " (method Main () () ())))")).ok());
    CHECK_FALSE(validate(decode(
        "(program (module _module (method Main () () ()))"
        " (module _module))")).ok());
    CHECK_FALSE(validate(decode(
        "(program (module _module"
        " (method P ((a int) (a int)) () ()) (method Main () () ())))")).ok());
}

TEST_CASE("mutated_in_params tracks assignment targets") {
    const char* text =
        "(program (module _module"
        " (method P ((a int) (b int) (c int) (d int)) ()"
        "  ((assign a 1)"
        "   (if (bool true) ((decl b int 0) (assign b 2)) ((assign c 3)))"
        "   (print (var d))))"
        " (method Main () () ((call () _module.P (1 2 3 4))))))";
    IrProgram p = decode(text);
    REQUIRE(validate(p).ok());
    auto boxed = mutated_in_params(p.modules[0].methods[0]);
    CHECK(boxed.count("a") == 1);
    CHECK(boxed.count("b") == 0);  // assignment hits the shadowing local
    CHECK(boxed.count("c") == 1);
    CHECK(boxed.count("d") == 0);
}
