#include <utility>

#include "d2c/ml_ast.hpp"

namespace d2c::ml {

namespace {
MlExpPtr make(MlExp e) { return std::make_shared<const MlExp>(std::move(e)); }
}  // namespace

MlExpPtr unit() {
    static const MlExpPtr u = make(MlExp{MlExp::Lit{std::monostate{}}});
    return u;
}
MlExpPtr lit_int(BigInt v) { return make(MlExp{MlExp::Lit{std::move(v)}}); }
MlExpPtr lit_bool(bool v) { return make(MlExp{MlExp::Lit{v}}); }
MlExpPtr lit_char(char v) { return make(MlExp{MlExp::Lit{v}}); }
MlExpPtr var(std::string name) { return make(MlExp{MlExp::Var{std::move(name)}}); }
MlExpPtr app(MlExpPtr fn, MlExpPtr arg) {
    return make(MlExp{MlExp::App{std::move(fn), std::move(arg)}});
}
MlExpPtr fn(std::string param, MlExpPtr body) {
    return make(MlExp{MlExp::Fn{std::move(param), std::move(body)}});
}
MlExpPtr if_(MlExpPtr cond, MlExpPtr then_e, MlExpPtr else_e) {
    return make(
        MlExp{MlExp::If{std::move(cond), std::move(then_e), std::move(else_e)}});
}
MlExpPtr let_(std::string name, MlExpPtr bound, MlExpPtr body) {
    return make(
        MlExp{MlExp::Let{std::move(name), std::move(bound), std::move(body)}});
}
MlExpPtr letrec(std::vector<MlFunBind> funs, MlExpPtr body) {
    return make(MlExp{MlExp::LetRecFuns{std::move(funs), std::move(body)}});
}
MlExpPtr seq(MlExpPtr first, MlExpPtr second) {
    return make(MlExp{MlExp::Seq{std::move(first), std::move(second)}});
}
MlExpPtr ref_(MlExpPtr init, std::string label) {
    return make(MlExp{MlExp::Ref{std::move(init), std::move(label)}});
}
MlExpPtr deref(MlExpPtr target) {
    return make(MlExp{MlExp::Deref{std::move(target)}});
}
MlExpPtr assign(MlExpPtr target, MlExpPtr value) {
    return make(MlExp{MlExp::AssignRef{std::move(target), std::move(value)}});
}
MlExpPtr raise_(MlExpPtr exn) { return make(MlExp{MlExp::Raise{std::move(exn)}}); }
MlExpPtr handle_(MlExpPtr body, std::string exn_var, MlExpPtr handler) {
    return make(MlExp{
        MlExp::Handle{std::move(body), std::move(exn_var), std::move(handler)}});
}
MlExpPtr con(std::string constructor, std::vector<MlExpPtr> args) {
    return make(MlExp{MlExp::Con{std::move(constructor), std::move(args)}});
}
MlExpPtr prim(MlPrim op, MlExpPtr lhs, MlExpPtr rhs) {
    return make(MlExp{MlExp::BinPrim{op, std::move(lhs), std::move(rhs)}});
}
MlExpPtr implode(MlExpPtr arg) {
    return make(MlExp{MlExp::Implode{std::move(arg)}});
}
MlExpPtr int_to_chars(MlExpPtr arg) {
    return make(MlExp{MlExp::IntToChars{std::move(arg)}});
}
MlExpPtr char_list(std::string text) {
    return make(MlExp{MlExp::CharList{std::move(text)}});
}
MlExpPtr print_prim(MlExpPtr arg) {
    return make(MlExp{MlExp::PrintPrim{std::move(arg)}});
}

MlExpPtr not_(MlExpPtr e) {
    return if_(std::move(e), lit_bool(false), lit_bool(true));
}
MlExpPtr andalso(MlExpPtr a, MlExpPtr b) {
    return if_(std::move(a), std::move(b), lit_bool(false));
}
MlExpPtr orelse(MlExpPtr a, MlExpPtr b) {
    return if_(std::move(a), lit_bool(true), std::move(b));
}

}  // namespace d2c::ml
