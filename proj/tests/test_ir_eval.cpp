#include <doctest.h>

#include "d2c/ir.hpp"
#include "d2c/ir_eval.hpp"
#include "d2c/sexp.hpp"

using namespace d2c;

namespace {

IrProgram decode(const std::string& text) { return from_sexp(parse_text(text)); }

IrProgram main_with(const std::string& body) {
    return decode("(program (module _module (method Main () () (" + body +
                  "))))");
}

SrcResult run_main(const std::string& body, std::int64_t clock = 10000) {
    return run_program(main_with(body), clock);
}

}  // namespace

TEST_CASE("hello runs to Done") {
    SrcResult r = run_main("(print (str \"Hello, Cake\\n\"))", 1000);
    CHECK(r.status == RunStatus::Done);
    CHECK(r.output == "Hello, Cake\n");
}

TEST_CASE("euclidean division pinned cases") {
    SrcResult r = run_main(
        "(print (div -7 2)) (print (str \" \")) (print (mod -7 2))"
        "(print (str \" \")) (print (div 7 -2)) (print (str \" \"))"
        "(print (mod 7 -2))");
    CHECK(r.status == RunStatus::Done);
    CHECK(r.output == "-4 1 -3 1");
}

TEST_CASE("euclidean law, exhaustive scan") {
    // q and r come from the interpreter; the law itself is the oracle
    for (int a = -20; a <= 20; ++a)
        for (int b = -20; b <= 20; ++b) {
            if (b == 0) continue;
            std::string body = "(print (div " + std::to_string(a) + " " +
                               std::to_string(b) + ")) (print (str \" \"))" +
                               "(print (mod " + std::to_string(a) + " " +
                               std::to_string(b) + "))";
            SrcResult res = run_main(body);
            REQUIRE(res.status == RunStatus::Done);
            auto sp = res.output.find(' ');
            long q = std::stol(res.output.substr(0, sp));
            long r = std::stol(res.output.substr(sp + 1));
            CHECK(a == b * q + r);
            CHECK(r >= 0);
            CHECK(r < std::abs(b));
        }
}

TEST_CASE("division by zero is an Err outcome") {
    SrcResult r = run_main("(print (str \"before\")) (print (div 1 0))");
    CHECK(r.status == RunStatus::Err);
    CHECK(r.err == SrcErrKind::DivByZero);
    CHECK(r.output == "before");
    CHECK(run_main("(print (mod 3 0))").err == SrcErrKind::DivByZero);
}

TEST_CASE("and/or short-circuit skips the right operand") {
    // unbound right operand; only short-circuiting avoids Err
    SrcResult r = run_main("(print (and (bool false) (var nope)))");
    CHECK(r.status == RunStatus::Done);
    CHECK(r.output == "false");
    r = run_main("(print (or (bool true) (var nope)))");
    CHECK(r.status == RunStatus::Done);
    CHECK(r.output == "true");
    r = run_main("(print (and (bool true) (var nope)))");
    CHECK(r.status == RunStatus::Err);
    CHECK(r.err == SrcErrKind::UnboundName);
}

TEST_CASE("concat appends") {
    SrcResult r = run_main(
        "(print (concat (str \"Hello, \") (str \"Cake\\n\")))");
    CHECK(r.output == "Hello, Cake\n");
}

TEST_CASE("comparisons on ints and chars") {
    SrcResult r = run_main(
        "(print (lt (char \"a\") (char \"b\"))) (print (str \" \"))"
        "(print (ge -3 -3)) (print (str \" \"))"
        "(print (le 5 4)) (print (str \" \"))"
        "(print (gt (char \"z\") (char \"a\")))");
    CHECK(r.output == "true true false true");
}

TEST_CASE("stringification of each type") {
    SrcResult r = run_main(
        "(print -12) (print (str \"|\")) (print (bool true))"
        "(print (str \"|\")) (print (char \"k\")) (print (str \"|\"))"
        "(print (str \"s\\tr\"))");
    CHECK(r.output == "-12|true|k|s\tr");
}

TEST_CASE("factorial via call produces 120") {
    IrProgram p = decode(
        "(program (module _module"
        " (method Factorial ((n int)) ((result int))"
        "  ((assign result 1)"
        "   (decl i int 1)"
        "   (while (le (var i) (var n))"
        "    ((assign result (mul (var result) (var i)))"
        "     (assign i (add (var i) 1))))))"
        " (method Main () ()"
        "  ((decl r int 0) (call (r) _module.Factorial (5)) (print (var r))))))");
    SrcResult res = run_program(p, 10000);
    CHECK(res.status == RunStatus::Done);
    BigInt expect = 1;
    for (int i = 2; i <= 5; ++i) expect *= i;
    CHECK(res.output == expect.str());
}

TEST_CASE("infinite loop times out") {
    SrcResult r = run_main("(while (bool true) ())", 100);
    CHECK(r.status == RunStatus::Timeout);
    CHECK(r.clock_left == 0);
}

TEST_CASE("call consumes clock at zero") {
    IrProgram p = decode(
        "(program (module _module"
        " (method P () () ())"
        " (method Main () () ((call () _module.P ())))))");
    CHECK(run_program(p, 0).status == RunStatus::Timeout);
    CHECK(run_program(p, 1).status == RunStatus::Done);
}

TEST_CASE("labeled break exits on the first iteration") {
    SrcResult r = run_main(
        "(decl i int 0)"
        "(labeled \"out\""
        " (while (lt (var i) 10)"
        "  ((break-label \"out\")"
        "   (assign i (add (var i) 1)))))"
        "(print (var i))");
    CHECK(r.status == RunStatus::Done);
    CHECK(r.output == "0");  // zero completed iterations
}

TEST_CASE("labeled continue skips to the outer condition") {
    SrcResult r = run_main(
        "(decl i int 0)"
        "(labeled \"out\""
        " (while (lt (var i) 3)"
        "  ((assign i (add (var i) 1))"
        "   (decl j int 0)"
        "   (while (lt (var j) 5)"
        "    ((assign j (add (var j) 1))"
        "     (if (eq (var j) 2) ((continue-label \"out\")) ())"
        "     (print (var j)))))))"
        "(print (str \"end\"))");
    CHECK(r.status == RunStatus::Done);
    CHECK(r.output == "111end");  // inner prints j=1 only, three times
}

TEST_CASE("return escapes nested loops to the method boundary") {
    SrcResult r = run_main(
        "(decl i int 0)"
        "(while (lt (var i) 5)"
        " ((assign i (add (var i) 1))"
        "  (if (eq (var i) 2) ((return)) ())))"
        "(print (str \"unreached\"))");
    CHECK(r.status == RunStatus::Done);
    CHECK(r.output == "");
}

TEST_CASE("out-params default per type and copy back") {
    IrProgram p = decode(
        "(program (module _module"
        " (method Defaults () ((a int) (b bool) (c char) (d string)) ())"
        " (method Main () ()"
        "  ((decl w int 9) (decl x bool (bool true)) (decl y char (char \"z\"))"
        "   (decl z string (str \"pre\"))"
        "   (call (w x y z) _module.Defaults ())"
        "   (print (var w)) (print (var x)) (print (var y)) (print (var z))))))");
    SrcResult r = run_program(p, 100);
    CHECK(r.status == RunStatus::Done);
    CHECK(r.output == "0falsea");
}

TEST_CASE("run_program surfaces dynamic errors as data") {
    CHECK(run_main("(print (var ghost))").err == SrcErrKind::UnboundName);
    CHECK(run_main("(print (add 1 (bool true)))").err ==
          SrcErrKind::TypeConfusion);
    // break at method level escapes: only reachable for unvalidated input
    CHECK(run_main("(break)").err == SrcErrKind::ControlEscape);
    IrProgram no_main = decode("(program (module _module))");
    CHECK(run_program(no_main, 10).err == SrcErrKind::UnboundName);
}

TEST_CASE("clock monotonicity and determinism") {
    std::string body =
        "(decl i int 0)"
        "(while (lt (var i) 7) ((assign i (add (var i) 1)) (print (var i))))";
    SrcResult base = run_program(main_with(body), 1000);
    REQUIRE(base.status == RunStatus::Done);
    CHECK(base.clock_left <= 1000);
    std::int64_t used = 1000 - base.clock_left;
    // fuel determinism: any larger clock gives the same Done output
    for (std::int64_t extra : {0, 1, 13, 500}) {
        SrcResult again = run_program(main_with(body), used + extra);
        CHECK(again.status == RunStatus::Done);
        CHECK(again.output == base.output);
    }
    // timeout stability: anything below the need times out
    for (std::int64_t clock = 0; clock < used; ++clock)
        CHECK(run_program(main_with(body), clock).status == RunStatus::Timeout);
}

TEST_CASE("cell log records declarations in creation order") {
    SrcResult r = run_main(
        "(decl a int 1)"
        "(if (bool true) ((decl b int 2) (assign b 20)) ())"
        "(decl a bool (bool true))"
        "(assign a (bool false))");
    REQUIRE(r.status == RunStatus::Done);
    REQUIRE(r.cells.size() == 3);
    CHECK(r.cells[0].name == "a");
    CHECK(stringify(r.cells[0].final) == "1");
    CHECK(r.cells[1].name == "b");
    CHECK(stringify(r.cells[1].final) == "20");
    CHECK(r.cells[2].name == "a");
    CHECK(stringify(r.cells[2].final) == "false");
}
