#include "d2c/sexp.hpp"

#include <cctype>

namespace d2c {

bool operator==(const SExp& a, const SExp& b) {
    if (a.node.index() != b.node.index()) return false;
    if (a.is_atom()) return a.atom_text() == b.atom_text();
    if (a.is_str()) return a.str_text() == b.str_text();
    if (a.is_int()) return a.int_value() == b.int_value();
    const auto& xs = a.items();
    const auto& ys = b.items();
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!(xs[i] == ys[i])) return false;
    return true;
}

namespace {

bool is_atom_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' &&
           c != '"' && c != ';';
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

std::vector<Token> lex(std::string_view input) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = input.size();
    while (i < n) {
        char c = input[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == ';') {
            while (i < n && input[i] != '\n') ++i;
            continue;
        }
        if (c == '(') {
            tokens.push_back({TokenKind::LParen, "", 0, i});
            ++i;
            continue;
        }
        if (c == ')') {
            tokens.push_back({TokenKind::RParen, "", 0, i});
            ++i;
            continue;
        }
        if (c == '"') {
            std::size_t start = i++;
            std::string out;
            for (;;) {
                if (i >= n)
                    throw CodecError(CodecErrorKind::UnterminatedString, start,
                                     "unterminated string literal");
                char d = input[i];
                if (d == '"') {
                    ++i;
                    break;
                }
                if (d == '\\') {
                    if (i + 1 >= n)
                        throw CodecError(CodecErrorKind::UnterminatedString, start,
                                         "unterminated string literal");
                    char e = input[i + 1];
                    switch (e) {
                        case '\\': out += '\\'; break;
                        case '"': out += '"'; break;
                        case 'n': out += '\n'; break;
                        case 't': out += '\t'; break;
                        default:
                            throw CodecError(CodecErrorKind::BadEscape, i,
                                             std::string("bad escape '\\") + e + "'");
                    }
                    i += 2;
                    continue;
                }
                out += d;
                ++i;
            }
            tokens.push_back({TokenKind::String, std::move(out), 0, start});
            continue;
        }
        // Atom or integer.
        std::size_t start = i;
        while (i < n && is_atom_char(input[i])) ++i;
        std::string_view word = input.substr(start, i - start);
        bool looks_numeric = std::isdigit(static_cast<unsigned char>(word[0])) ||
                             (word[0] == '-' && word.size() > 1 &&
                              std::isdigit(static_cast<unsigned char>(word[1])));
        if (looks_numeric) {
            std::string_view digits = word[0] == '-' ? word.substr(1) : word;
            if (!all_digits(digits))
                throw CodecError(CodecErrorKind::BadInt, start,
                                 "malformed integer '" + std::string(word) + "'");
            tokens.push_back({TokenKind::Int, "", BigInt(std::string(word)), start});
        } else {
            tokens.push_back({TokenKind::Atom, std::string(word), 0, start});
        }
    }
    return tokens;
}

namespace {

SExp parse_one(const std::vector<Token>& tokens, std::size_t& pos) {
    const Token& t = tokens[pos];
    switch (t.kind) {
        case TokenKind::Atom:
            ++pos;
            return SExp::atom(t.text);
        case TokenKind::String:
            ++pos;
            return SExp::str(t.text);
        case TokenKind::Int:
            ++pos;
            return SExp::integer(t.value);
        case TokenKind::RParen:
            throw CodecError(CodecErrorKind::UnbalancedParens, t.offset,
                             "unexpected ')'");
        case TokenKind::LParen: {
            std::size_t open = t.offset;
            ++pos;
            SExp::List items;
            for (;;) {
                if (pos >= tokens.size())
                    throw CodecError(CodecErrorKind::UnbalancedParens, open,
                                     "missing ')'");
                if (tokens[pos].kind == TokenKind::RParen) {
                    ++pos;
                    return SExp::list(std::move(items));
                }
                items.push_back(parse_one(tokens, pos));
            }
        }
    }
    throw CodecError(CodecErrorKind::UnbalancedParens, t.offset, "bad token");
}

}  // namespace

SExp parse(const std::vector<Token>& tokens) {
    if (tokens.empty())
        throw CodecError(CodecErrorKind::EmptyInput, 0, "empty input");
    std::size_t pos = 0;
    SExp e = parse_one(tokens, pos);
    if (pos != tokens.size())
        throw CodecError(CodecErrorKind::TrailingTokens, tokens[pos].offset,
                         "trailing tokens after expression");
    return e;
}

SExp parse_text(std::string_view input) { return parse(lex(input)); }

std::string quote_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

namespace {

void print_into(const SExp& e, std::string& out) {
    if (e.is_atom()) {
        out += e.atom_text();
    } else if (e.is_str()) {
        out += quote_string(e.str_text());
    } else if (e.is_int()) {
        out += e.int_value().str();
    } else {
        out += '(';
        const auto& items = e.items();
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i > 0) out += ' ';
            print_into(items[i], out);
        }
        out += ')';
    }
}

}  // namespace

std::string print(const SExp& e) {
    std::string out;
    print_into(e, out);
    return out;
}

}  // namespace d2c
