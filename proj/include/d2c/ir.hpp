#ifndef D2C_IR_HPP
#define D2C_IR_HPP

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "d2c/bigint.hpp"
#include "d2c/sexp.hpp"

namespace d2c {

enum class IrType { Int, Bool, Char, String };

const char* type_name(IrType t);

enum class BinOp {
    Add, Sub, Mul, Div, Mod,   // integer arithmetic; Div/Mod are Euclidean
    Lt, Le, Gt, Ge,            // orderings on int and char
    Eq, Neq,                   // any single type
    And, Or,                   // short-circuiting booleans
    Concat,                    // strings
};

const char* binop_name(BinOp op);

struct IrExpr;
using IrExprPtr = std::shared_ptr<const IrExpr>;

struct IrExpr {
    struct LitInt { BigInt value; };
    struct LitBool { bool value; };
    struct LitChar { char value; };
    struct LitString { std::string text; };
    struct Var { std::string name; };
    struct Not { IrExprPtr operand; };
    struct Binary { BinOp op; IrExprPtr lhs; IrExprPtr rhs; };

    std::variant<LitInt, LitBool, LitChar, LitString, Var, Not, Binary> node;
};

IrExprPtr lit_int(BigInt v);
IrExprPtr lit_bool(bool v);
IrExprPtr lit_char(char v);
IrExprPtr lit_string(std::string s);
IrExprPtr var_ref(std::string name);
IrExprPtr not_of(IrExprPtr e);
IrExprPtr binary(BinOp op, IrExprPtr lhs, IrExprPtr rhs);

struct IrStmt;
using IrStmtPtr = std::shared_ptr<const IrStmt>;
using IrBlock = std::vector<IrStmtPtr>;

struct IrStmt {
    struct DeclVar { std::string name; IrType type; IrExprPtr init; };
    struct Assign { std::string name; IrExprPtr rhs; };
    struct If { IrExprPtr cond; IrBlock then_branch; IrBlock else_branch; };
    struct While { IrExprPtr cond; IrBlock body; };
    struct Labeled { std::string label; IrStmtPtr body; };
    struct Call {
        std::vector<std::string> outs;  // assignable targets, in order
        std::string callee;             // qualified "Module.Method"
        std::vector<IrExprPtr> args;
    };
    struct Print { IrExprPtr arg; };
    struct Return {};
    struct Break {};
    struct BreakLabel { std::string label; };
    struct Continue {};
    struct ContinueLabel { std::string label; };

    std::variant<DeclVar, Assign, If, While, Labeled, Call, Print, Return, Break,
                 BreakLabel, Continue, ContinueLabel>
        node;
};

IrStmtPtr decl_stmt(std::string name, IrType type, IrExprPtr init);
IrStmtPtr assign_stmt(std::string name, IrExprPtr rhs);
IrStmtPtr if_stmt(IrExprPtr cond, IrBlock then_branch, IrBlock else_branch);
IrStmtPtr while_stmt(IrExprPtr cond, IrBlock body);
IrStmtPtr labeled_stmt(std::string label, IrStmtPtr body);
IrStmtPtr call_stmt(std::vector<std::string> outs, std::string callee,
                    std::vector<IrExprPtr> args);
IrStmtPtr print_stmt(IrExprPtr arg);
IrStmtPtr return_stmt();
IrStmtPtr break_stmt();
IrStmtPtr break_label_stmt(std::string label);
IrStmtPtr continue_stmt();
IrStmtPtr continue_label_stmt(std::string label);

struct IrParam { std::string name; IrType type; };

struct IrMethod {
    std::string name;
    std::vector<IrParam> ins;
    std::vector<IrParam> outs;
    IrBlock body;
};

struct IrModule {
    std::string name;
    std::vector<IrMethod> methods;
};

struct IrProgram {
    std::vector<IrModule> modules;

    // Resolves "Module.Method"; nullptr when absent.
    const IrMethod* find_method(std::string_view qualified) const;
};

struct SchemaError : std::runtime_error {
    std::string path;
    std::string expected;
    std::string found;
    SchemaError(std::string path_, std::string expected_, std::string found_);
};

// Structural decoding only; scope and type checks live in validate().
IrProgram from_sexp(const SExp& e);

struct Violation {
    std::string where;
    std::string message;
};

struct ValidityReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

ValidityReport validate(const IrProgram& p);

// Infers the type of a validated expression; lookup resolves variable types.
// Returns nullopt if the expression is incoherent under the given lookup.
std::optional<IrType> infer_type(
    const IrExpr& e,
    const std::function<std::optional<IrType>(const std::string&)>& lookup);

// In-params the body can mutate (by assignment or call-out position),
// accounting for locals that shadow them. The compiler backs exactly these
// with references; the evaluator's state instrumentation mirrors that.
std::set<std::string> mutated_in_params(const IrMethod& m);

}  // namespace d2c

#endif
