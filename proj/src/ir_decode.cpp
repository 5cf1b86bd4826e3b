#include <cctype>
#include <utility>

#include "d2c/ir.hpp"

namespace d2c {

const char* type_name(IrType t) {
    switch (t) {
        case IrType::Int: return "int";
        case IrType::Bool: return "bool";
        case IrType::Char: return "char";
        case IrType::String: return "string";
    }
    return "?";
}

const char* binop_name(BinOp op) {
    switch (op) {
        case BinOp::Add: return "add";
        case BinOp::Sub: return "sub";
        case BinOp::Mul: return "mul";
        case BinOp::Div: return "div";
        case BinOp::Mod: return "mod";
        case BinOp::Lt: return "lt";
        case BinOp::Le: return "le";
        case BinOp::Gt: return "gt";
        case BinOp::Ge: return "ge";
        case BinOp::Eq: return "eq";
        case BinOp::Neq: return "neq";
        case BinOp::And: return "and";
        case BinOp::Or: return "or";
        case BinOp::Concat: return "concat";
    }
    return "?";
}

IrExprPtr lit_int(BigInt v) {
    return std::make_shared<const IrExpr>(IrExpr{IrExpr::LitInt{std::move(v)}});
}
IrExprPtr lit_bool(bool v) {
    return std::make_shared<const IrExpr>(IrExpr{IrExpr::LitBool{v}});
}
IrExprPtr lit_char(char v) {
    return std::make_shared<const IrExpr>(IrExpr{IrExpr::LitChar{v}});
}
IrExprPtr lit_string(std::string s) {
    return std::make_shared<const IrExpr>(IrExpr{IrExpr::LitString{std::move(s)}});
}
IrExprPtr var_ref(std::string name) {
    return std::make_shared<const IrExpr>(IrExpr{IrExpr::Var{std::move(name)}});
}
IrExprPtr not_of(IrExprPtr e) {
    return std::make_shared<const IrExpr>(IrExpr{IrExpr::Not{std::move(e)}});
}
IrExprPtr binary(BinOp op, IrExprPtr lhs, IrExprPtr rhs) {
    return std::make_shared<const IrExpr>(
        IrExpr{IrExpr::Binary{op, std::move(lhs), std::move(rhs)}});
}

IrStmtPtr decl_stmt(std::string name, IrType type, IrExprPtr init) {
    return std::make_shared<const IrStmt>(
        IrStmt{IrStmt::DeclVar{std::move(name), type, std::move(init)}});
}
IrStmtPtr assign_stmt(std::string name, IrExprPtr rhs) {
    return std::make_shared<const IrStmt>(
        IrStmt{IrStmt::Assign{std::move(name), std::move(rhs)}});
}
IrStmtPtr if_stmt(IrExprPtr cond, IrBlock then_branch, IrBlock else_branch) {
    return std::make_shared<const IrStmt>(IrStmt{
        IrStmt::If{std::move(cond), std::move(then_branch), std::move(else_branch)}});
}
IrStmtPtr while_stmt(IrExprPtr cond, IrBlock body) {
    return std::make_shared<const IrStmt>(
        IrStmt{IrStmt::While{std::move(cond), std::move(body)}});
}
IrStmtPtr labeled_stmt(std::string label, IrStmtPtr body) {
    return std::make_shared<const IrStmt>(
        IrStmt{IrStmt::Labeled{std::move(label), std::move(body)}});
}
IrStmtPtr call_stmt(std::vector<std::string> outs, std::string callee,
                    std::vector<IrExprPtr> args) {
    return std::make_shared<const IrStmt>(
        IrStmt{IrStmt::Call{std::move(outs), std::move(callee), std::move(args)}});
}
IrStmtPtr print_stmt(IrExprPtr arg) {
    return std::make_shared<const IrStmt>(IrStmt{IrStmt::Print{std::move(arg)}});
}
IrStmtPtr return_stmt() {
    return std::make_shared<const IrStmt>(IrStmt{IrStmt::Return{}});
}
IrStmtPtr break_stmt() {
    return std::make_shared<const IrStmt>(IrStmt{IrStmt::Break{}});
}
IrStmtPtr break_label_stmt(std::string label) {
    return std::make_shared<const IrStmt>(IrStmt{IrStmt::BreakLabel{std::move(label)}});
}
IrStmtPtr continue_stmt() {
    return std::make_shared<const IrStmt>(IrStmt{IrStmt::Continue{}});
}
IrStmtPtr continue_label_stmt(std::string label) {
    return std::make_shared<const IrStmt>(
        IrStmt{IrStmt::ContinueLabel{std::move(label)}});
}

const IrMethod* IrProgram::find_method(std::string_view qualified) const {
    auto dot = qualified.find('.');
    if (dot == std::string_view::npos) return nullptr;
    std::string_view mod = qualified.substr(0, dot);
    std::string_view meth = qualified.substr(dot + 1);
    for (const auto& m : modules) {
        if (m.name != mod) continue;
        for (const auto& f : m.methods)
            if (f.name == meth) return &f;
    }
    return nullptr;
}

SchemaError::SchemaError(std::string path_, std::string expected_, std::string found_)
    : std::runtime_error("schema error at " + path_ + ": expected " + expected_ +
                         ", found " + found_),
      path(std::move(path_)),
      expected(std::move(expected_)),
      found(std::move(found_)) {}

namespace {

std::string describe(const SExp& e) {
    if (e.is_atom()) return "atom '" + e.atom_text() + "'";
    if (e.is_str()) return "string " + quote_string(e.str_text());
    if (e.is_int()) return "integer " + e.int_value().str();
    return "list of " + std::to_string(e.items().size());
}

[[noreturn]] void fail(const std::string& path, const std::string& expected,
                       const SExp& found) {
    throw SchemaError(path, expected, describe(found));
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

const SExp::List& expect_form(const SExp& e, const std::string& head,
                              const std::string& path) {
    if (!e.is_list() || e.items().empty() || !e.items()[0].is_atom() ||
        e.items()[0].atom_text() != head)
        fail(path, "(" + head + " ...)", e);
    return e.items();
}

std::string expect_name(const SExp& e, const std::string& path) {
    if (!e.is_atom() || !is_identifier(e.atom_text())) fail(path, "identifier", e);
    return e.atom_text();
}

std::string expect_label(const SExp& e, const std::string& path) {
    if (!e.is_str() || e.str_text().empty())
        fail(path, "non-empty label string", e);
    return e.str_text();
}

IrType decode_type(const SExp& e, const std::string& path) {
    if (e.is_atom()) {
        const std::string& t = e.atom_text();
        if (t == "int") return IrType::Int;
        if (t == "bool") return IrType::Bool;
        if (t == "char") return IrType::Char;
        if (t == "string") return IrType::String;
    }
    fail(path, "type (int|bool|char|string)", e);
}

std::optional<BinOp> binop_from_name(std::string_view s) {
    static const std::pair<const char*, BinOp> table[] = {
        {"add", BinOp::Add}, {"sub", BinOp::Sub}, {"mul", BinOp::Mul},
        {"div", BinOp::Div}, {"mod", BinOp::Mod}, {"lt", BinOp::Lt},
        {"le", BinOp::Le},   {"gt", BinOp::Gt},   {"ge", BinOp::Ge},
        {"eq", BinOp::Eq},   {"neq", BinOp::Neq}, {"and", BinOp::And},
        {"or", BinOp::Or},   {"concat", BinOp::Concat},
    };
    for (const auto& [name, op] : table)
        if (s == name) return op;
    return std::nullopt;
}

IrExprPtr decode_expr(const SExp& e, const std::string& path) {
    if (e.is_int()) return lit_int(e.int_value());
    if (!e.is_list() || e.items().empty() || !e.items()[0].is_atom())
        fail(path, "expression", e);
    const auto& items = e.items();
    const std::string& head = items[0].atom_text();

    auto arity = [&](std::size_t n, const char* what) {
        if (items.size() != n + 1)
            fail(path, "(" + head + " " + what + ")", e);
    };

    if (head == "bool") {
        arity(1, "true|false");
        if (items[1].is_atom() && items[1].atom_text() == "true") return lit_bool(true);
        if (items[1].is_atom() && items[1].atom_text() == "false")
            return lit_bool(false);
        fail(path + ".bool", "true or false", items[1]);
    }
    if (head == "char") {
        arity(1, "\"c\"");
        if (!items[1].is_str() || items[1].str_text().size() != 1)
            fail(path + ".char", "one-character string", items[1]);
        return lit_char(items[1].str_text()[0]);
    }
    if (head == "str") {
        arity(1, "\"...\"");
        if (!items[1].is_str()) fail(path + ".str", "string literal", items[1]);
        return lit_string(items[1].str_text());
    }
    if (head == "var") {
        arity(1, "NAME");
        return var_ref(expect_name(items[1], path + ".var"));
    }
    if (head == "not") {
        arity(1, "expr");
        return not_of(decode_expr(items[1], path + ".not[0]"));
    }
    if (auto op = binop_from_name(head)) {
        arity(2, "expr expr");
        return binary(*op, decode_expr(items[1], path + "." + head + "[0]"),
                      decode_expr(items[2], path + "." + head + "[1]"));
    }
    fail(path, "expression head", e);
}

IrBlock decode_block(const SExp& e, const std::string& path);

IrStmtPtr decode_stmt(const SExp& e, const std::string& path) {
    if (!e.is_list() || e.items().empty() || !e.items()[0].is_atom())
        fail(path, "statement", e);
    const auto& items = e.items();
    const std::string& head = items[0].atom_text();

    auto arity = [&](std::size_t n, const char* what) {
        if (items.size() != n + 1)
            fail(path, "(" + head + (n ? std::string(" ") + what : "") + ")", e);
    };

    if (head == "decl") {
        arity(3, "NAME type expr");
        return decl_stmt(expect_name(items[1], path + ".decl"),
                         decode_type(items[2], path + ".decl.type"),
                         decode_expr(items[3], path + ".decl.init"));
    }
    if (head == "assign") {
        arity(2, "NAME expr");
        return assign_stmt(expect_name(items[1], path + ".assign"),
                           decode_expr(items[2], path + ".assign.rhs"));
    }
    if (head == "if") {
        arity(3, "expr (stmt*) (stmt*)");
        return if_stmt(decode_expr(items[1], path + ".if.cond"),
                       decode_block(items[2], path + ".if.then"),
                       decode_block(items[3], path + ".if.else"));
    }
    if (head == "while") {
        arity(2, "expr (stmt*)");
        return while_stmt(decode_expr(items[1], path + ".while.cond"),
                          decode_block(items[2], path + ".while.body"));
    }
    if (head == "labeled") {
        arity(2, "\"LBL\" stmt");
        return labeled_stmt(expect_label(items[1], path + ".labeled"),
                            decode_stmt(items[2], path + ".labeled.body"));
    }
    if (head == "call") {
        arity(3, "(NAME*) QUALNAME (expr*)");
        if (!items[1].is_list()) fail(path + ".call.outs", "list of names", items[1]);
        std::vector<std::string> outs;
        for (std::size_t i = 0; i < items[1].items().size(); ++i)
            outs.push_back(expect_name(items[1].items()[i],
                                       path + ".call.outs[" + std::to_string(i) + "]"));
        if (!items[2].is_atom() || items[2].atom_text().find('.') == std::string::npos)
            fail(path + ".call.callee", "qualified MODULE.METHOD name", items[2]);
        const std::string& callee = items[2].atom_text();
        auto dot = callee.find('.');
        if (!is_identifier(callee.substr(0, dot)) ||
            !is_identifier(callee.substr(dot + 1)))
            fail(path + ".call.callee", "qualified MODULE.METHOD name", items[2]);
        if (!items[3].is_list()) fail(path + ".call.args", "list of exprs", items[3]);
        std::vector<IrExprPtr> args;
        for (std::size_t i = 0; i < items[3].items().size(); ++i)
            args.push_back(decode_expr(items[3].items()[i],
                                       path + ".call.args[" + std::to_string(i) + "]"));
        return call_stmt(std::move(outs), callee, std::move(args));
    }
    if (head == "print") {
        arity(1, "expr");
        return print_stmt(decode_expr(items[1], path + ".print[0]"));
    }
    if (head == "return") {
        arity(0, "");
        return return_stmt();
    }
    if (head == "break") {
        arity(0, "");
        return break_stmt();
    }
    if (head == "break-label") {
        arity(1, "\"LBL\"");
        return break_label_stmt(expect_label(items[1], path + ".break-label"));
    }
    if (head == "continue") {
        arity(0, "");
        return continue_stmt();
    }
    if (head == "continue-label") {
        arity(1, "\"LBL\"");
        return continue_label_stmt(expect_label(items[1], path + ".continue-label"));
    }
    fail(path, "statement head", e);
}

IrBlock decode_block(const SExp& e, const std::string& path) {
    if (!e.is_list()) fail(path, "list of statements", e);
    IrBlock block;
    for (std::size_t i = 0; i < e.items().size(); ++i)
        block.push_back(decode_stmt(e.items()[i], path + "[" + std::to_string(i) + "]"));
    return block;
}

IrMethod decode_method(const SExp& e, const std::string& path) {
    const auto& items = expect_form(e, "method", path);
    if (items.size() != 5)
        fail(path, "(method NAME (param*) (param*) (stmt*))", e);
    IrMethod m;
    m.name = expect_name(items[1], path + ".name");
    auto decode_params = [&](const SExp& list, const std::string& ppath) {
        if (!list.is_list()) fail(ppath, "parameter list", list);
        std::vector<IrParam> params;
        for (std::size_t i = 0; i < list.items().size(); ++i) {
            const SExp& p = list.items()[i];
            std::string ipath = ppath + "[" + std::to_string(i) + "]";
            if (!p.is_list() || p.items().size() != 2) fail(ipath, "(NAME type)", p);
            params.push_back({expect_name(p.items()[0], ipath),
                              decode_type(p.items()[1], ipath + ".type")});
        }
        return params;
    };
    m.ins = decode_params(items[2], path + ".ins");
    m.outs = decode_params(items[3], path + ".outs");
    m.body = decode_block(items[4], path + ".body");
    return m;
}

IrModule decode_module(const SExp& e, const std::string& path) {
    const auto& items = expect_form(e, "module", path);
    if (items.size() < 2) fail(path, "(module NAME method*)", e);
    IrModule m;
    m.name = expect_name(items[1], path + ".name");
    for (std::size_t i = 2; i < items.size(); ++i)
        m.methods.push_back(
            decode_method(items[i], path + ".method[" + std::to_string(i - 2) + "]"));
    return m;
}

}  // namespace

IrProgram from_sexp(const SExp& e) {
    const auto& items = expect_form(e, "program", "program");
    IrProgram p;
    for (std::size_t i = 1; i < items.size(); ++i)
        p.modules.push_back(
            decode_module(items[i], "program[" + std::to_string(i - 1) + "]"));
    return p;
}

}  // namespace d2c
