#include <random>

#include <doctest.h>

#include "d2c/sexp.hpp"

using namespace d2c;

TEST_CASE("lexing basics") {
    auto toks = lex("(a b)");
    REQUIRE(toks.size() == 4);
    CHECK(toks[0].kind == TokenKind::LParen);
    CHECK(toks[1].kind == TokenKind::Atom);
    CHECK(toks[1].text == "a");
    CHECK(toks[2].text == "b");
    CHECK(toks[3].kind == TokenKind::RParen);
}

TEST_CASE("lexing strings resolves escapes") {
    auto toks = lex("\"Hello, Cake\\n\"");
    REQUIRE(toks.size() == 1);
    CHECK(toks[0].kind == TokenKind::String);
    CHECK(toks[0].text == "Hello, Cake\n");
}

TEST_CASE("lexing signed integers") {
    auto toks = lex("-42");
    REQUIRE(toks.size() == 1);
    CHECK(toks[0].kind == TokenKind::Int);
    CHECK(toks[0].value == BigInt(-42));
}

TEST_CASE("comments and whitespace are discarded") {
    auto toks = lex("( x ; rest of line\n 1 )");
    REQUIRE(toks.size() == 4);
    CHECK(toks[1].text == "x");
    CHECK(toks[2].value == BigInt(1));
}

TEST_CASE("lex errors") {
    CHECK_THROWS_AS(lex("\"open"), CodecError);
    CHECK_THROWS_AS(lex("\"bad \\q escape\""), CodecError);
    try {
        lex("\"oops");
        FAIL("unreachable");
    } catch (const CodecError& e) {
        CHECK(e.kind == CodecErrorKind::UnterminatedString);
    }
}

TEST_CASE("parse nesting") {
    SExp e = parse_text("(m (n 1))");
    REQUIRE(e.is_list());
    REQUIRE(e.items().size() == 2);
    CHECK(e.items()[0].atom_text() == "m");
    const SExp& inner = e.items()[1];
    REQUIRE(inner.is_list());
    CHECK(inner.items()[0].atom_text() == "n");
    CHECK(inner.items()[1].int_value() == BigInt(1));
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_text(")"), CodecError);
    CHECK_THROWS_AS(parse_text("(a"), CodecError);
    CHECK_THROWS_AS(parse_text("(a) (b)"), CodecError);
    CHECK_THROWS_AS(parse_text("   ; just a comment\n"), CodecError);
    try {
        parse_text(")");
        FAIL("unreachable");
    } catch (const CodecError& e) {
        CHECK(e.kind == CodecErrorKind::UnbalancedParens);
    }
}

TEST_CASE("print canonical forms") {
    CHECK(print(SExp::list({})) == "()");
    CHECK(print(SExp::str("a\nb")) == "\"a\\nb\"");
    CHECK(print(SExp::list({SExp::atom("x"), SExp::integer(3)})) == "(x 3)");
    CHECK(print(SExp::integer(BigInt(-7))) == "-7");
}

namespace {

SExp random_tree(std::mt19937_64& rng, int depth) {
    auto pick = [&](std::uint64_t n) { return rng() % n; };
    std::uint64_t shape = depth > 0 ? pick(5) : pick(3);
    switch (shape) {
        case 0: {
            static const char* atoms[] = {"a", "xy", "val-1", "+", "_m",
                                          "Main", "whi.le", "z9"};
            return SExp::atom(atoms[pick(8)]);
        }
        case 1: {
            static const char* strs[] = {"", "plain", "with space",
                                         "esc\\ape", "q\"uote", "nl\n",
                                         "tab\there", "mix\\\"\n\t"};
            return SExp::str(strs[pick(8)]);
        }
        case 2: {
            long v = long(pick(2000001)) - 1000000;
            BigInt big = BigInt(v) * BigInt(v) * BigInt(v);
            return SExp::integer(pick(2) ? big : BigInt(v));
        }
        default: {
            SExp::List items;
            std::uint64_t n = pick(5);
            for (std::uint64_t i = 0; i < n; ++i)
                items.push_back(random_tree(rng, depth - 1));
            return SExp::list(std::move(items));
        }
    }
}

}  // namespace

TEST_CASE("round-trip on 1000 random trees") {
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 1000; ++i) {
        SExp e = random_tree(rng, 8);
        SExp back = parse_text(print(e));
        CHECK(back == e);
    }
}
