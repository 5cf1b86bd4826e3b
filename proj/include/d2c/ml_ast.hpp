#ifndef D2C_ML_AST_HPP
#define D2C_ML_AST_HPP

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "d2c/bigint.hpp"

namespace d2c {

// IntLt/CharLt/PolyEq cover the comparisons the backend emits after
// normalization; ListCons/ListAppend back the chars-as-lists string model.
enum class MlPrim {
    IntAdd,
    IntSub,
    IntMul,
    IntLt,
    CharLt,
    PolyEq,
    ListCons,
    ListAppend
};

struct MlExp;
using MlExpPtr = std::shared_ptr<const MlExp>;

struct MlFunBind {
    std::string name;
    std::string param;
    MlExpPtr body;
};

struct MlExp {
    struct Lit {
        // monostate = unit
        std::variant<std::monostate, BigInt, bool, char, std::string> value;
    };
    struct Var { std::string name; };  // possibly qualified "Struct.x"
    struct App { MlExpPtr fn; MlExpPtr arg; };
    struct Fn { std::string param; MlExpPtr body; };
    struct If { MlExpPtr cond; MlExpPtr then_e; MlExpPtr else_e; };
    struct Let { std::string name; MlExpPtr bound; MlExpPtr body; };
    struct LetRecFuns { std::vector<MlFunBind> funs; MlExpPtr body; };
    struct Seq { MlExpPtr first; MlExpPtr second; };
    struct Ref {
        MlExpPtr init;
        std::string label;  // source binding this ref backs; "" for plumbing
    };
    struct Deref { MlExpPtr target; };
    struct AssignRef { MlExpPtr target; MlExpPtr value; };
    struct Raise { MlExpPtr exn; };
    struct Handle {
        MlExpPtr body;
        std::string exn_var;  // bound in handler only
        MlExpPtr handler;
    };
    struct Con { std::string constructor; std::vector<MlExpPtr> args; };
    struct BinPrim { MlPrim op; MlExpPtr lhs; MlExpPtr rhs; };
    struct Implode { MlExpPtr arg; };
    struct IntToChars { MlExpPtr arg; };  // decimal digits of an int, as chars
    struct CharList { std::string text; };
    struct PrintPrim { MlExpPtr arg; };  // requires a packed string

    std::variant<Lit, Var, App, Fn, If, Let, LetRecFuns, Seq, Ref, Deref,
                 AssignRef, Raise, Handle, Con, BinPrim, Implode, IntToChars,
                 CharList, PrintPrim>
        node;
};

struct MlDec {
    struct StructureDec {
        std::string name;
        std::vector<MlDec> decs;
    };
    struct FunGroup { std::vector<MlFunBind> funs; };
    struct ExceptionDec {
        std::string name;
        bool has_payload;  // payload, when present, is a string
    };

    std::variant<StructureDec, FunGroup, ExceptionDec> node;
};

struct MlProgramT {
    std::vector<MlDec> decs;
};

namespace ml {

MlExpPtr unit();
MlExpPtr lit_int(BigInt v);
MlExpPtr lit_bool(bool v);
MlExpPtr lit_char(char v);
MlExpPtr var(std::string name);
MlExpPtr app(MlExpPtr fn, MlExpPtr arg);
MlExpPtr fn(std::string param, MlExpPtr body);
MlExpPtr if_(MlExpPtr cond, MlExpPtr then_e, MlExpPtr else_e);
MlExpPtr let_(std::string name, MlExpPtr bound, MlExpPtr body);
MlExpPtr letrec(std::vector<MlFunBind> funs, MlExpPtr body);
MlExpPtr seq(MlExpPtr first, MlExpPtr second);
MlExpPtr ref_(MlExpPtr init, std::string label = "");
MlExpPtr deref(MlExpPtr target);
MlExpPtr assign(MlExpPtr target, MlExpPtr value);
MlExpPtr raise_(MlExpPtr exn);
MlExpPtr handle_(MlExpPtr body, std::string exn_var, MlExpPtr handler);
MlExpPtr con(std::string constructor, std::vector<MlExpPtr> args = {});
MlExpPtr prim(MlPrim op, MlExpPtr lhs, MlExpPtr rhs);
MlExpPtr implode(MlExpPtr arg);
MlExpPtr int_to_chars(MlExpPtr arg);
MlExpPtr char_list(std::string text);
MlExpPtr print_prim(MlExpPtr arg);

// not/andalso/orelse as the compiler emits them (If forms the
// pretty-printer recognizes).
MlExpPtr not_(MlExpPtr e);
MlExpPtr andalso(MlExpPtr a, MlExpPtr b);
MlExpPtr orelse(MlExpPtr a, MlExpPtr b);

}  // namespace ml

// Deterministic SML-style rendering; golden files are normative.
std::string pretty(const MlProgramT& p);
std::string pretty_exp(const MlExp& e);

// Static checks over an emitted program: every constructor referenced by a
// Con is declared by an ExceptionDec (with matching payload arity), and
// every Var is either bound locally or a declared qualified name.
std::vector<std::string> lint(const MlProgramT& p);

}  // namespace d2c

#endif
