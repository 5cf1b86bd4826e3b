#ifndef D2C_SEXP_HPP
#define D2C_SEXP_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "d2c/bigint.hpp"

namespace d2c {

// Surface syntax of .dfy.sexp files: symbols are bare atoms, integers are
// decimal with an optional leading '-', strings use double quotes with the
// escapes \\ \" \n \t, and ';' starts a comment running to end of line.

struct SExp {
    struct Atom { std::string text; };
    struct Str  { std::string text; };
    struct Int  { BigInt value; };
    using List = std::vector<SExp>;

    std::variant<Atom, Str, Int, List> node;

    static SExp atom(std::string text) { return SExp{Atom{std::move(text)}}; }
    static SExp str(std::string text) { return SExp{Str{std::move(text)}}; }
    static SExp integer(BigInt value) { return SExp{Int{std::move(value)}}; }
    static SExp list(List items) { return SExp{std::move(items)}; }

    bool is_atom() const { return std::holds_alternative<Atom>(node); }
    bool is_str() const { return std::holds_alternative<Str>(node); }
    bool is_int() const { return std::holds_alternative<Int>(node); }
    bool is_list() const { return std::holds_alternative<List>(node); }

    const std::string& atom_text() const { return std::get<Atom>(node).text; }
    const std::string& str_text() const { return std::get<Str>(node).text; }
    const BigInt& int_value() const { return std::get<Int>(node).value; }
    const List& items() const { return std::get<List>(node); }

    friend bool operator==(const SExp& a, const SExp& b);
};

enum class TokenKind { LParen, RParen, Atom, String, Int };

struct Token {
    TokenKind kind;
    std::string text;    // Atom / String payload (escapes already resolved)
    BigInt value;        // Int payload
    std::size_t offset;  // byte offset in the input, for diagnostics
};

enum class CodecErrorKind {
    UnterminatedString,
    BadEscape,
    BadInt,
    UnbalancedParens,
    TrailingTokens,
    EmptyInput,
};

struct CodecError : std::runtime_error {
    CodecErrorKind kind;
    std::size_t offset;
    CodecError(CodecErrorKind k, std::size_t off, const std::string& msg)
        : std::runtime_error(msg), kind(k), offset(off) {}
};

std::vector<Token> lex(std::string_view input);
SExp parse(const std::vector<Token>& tokens);
SExp parse_text(std::string_view input);

// Canonical single-line rendering; parse(lex(print(e))) == e.
std::string print(const SExp& e);

// Quotes and re-escapes a string body (shared with the ML pretty-printer).
std::string quote_string(std::string_view s);

}  // namespace d2c

#endif
