#include <map>
#include <utility>

#include "d2c/compile.hpp"
#include "d2c/ir_eval.hpp"

namespace d2c {

using namespace ml;

const char* mutation_name(CompilerMutation m) {
    switch (m) {
        case CompilerMutation::DropBreakHandler: return "drop-break-handler";
        case CompilerMutation::SwapLeNormalization: return "swap-le-normalization";
        case CompilerMutation::SkipImplode: return "skip-implode";
        case CompilerMutation::IntRefsStartAtOne: return "int-refs-start-at-one";
        case CompilerMutation::ReturnHandlerInsideLoops:
            return "return-handler-inside-loops";
    }
    return "?";
}

CompileOnInvalid::CompileOnInvalid(ValidityReport r)
    : std::runtime_error("compile of invalid program:\n" + r.to_string()),
      report(std::move(r)) {}

namespace {

using ml::lit_bool;
using ml::lit_char;
using ml::lit_int;

constexpr const char* kExnVar = "CML_e";
constexpr const char* kUnitParam = "CML_unit";

struct Binding {
    std::string target;  // name in the emitted code
    bool boxed;          // behind a ref
    IrType type;
};

struct Ctx {
    const IrProgram* prog;
    const CompileOptions* opts;
    std::string module_name;
    const std::set<std::string>* boxed_ins;
    int while_counter = 0;
    std::map<std::string, int> decl_ordinal;
    std::vector<std::map<std::string, Binding>> scopes;

    const Binding& binding(const std::string& name) const {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end()) return found->second;
        }
        throw std::logic_error("compile: unbound " + name);
    }

    std::optional<IrType> type_of(const std::string& name) const {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end()) return found->second.type;
        }
        return std::nullopt;
    }
};

MlExpPtr default_lit(IrType t, const Ctx& ctx) {
    switch (t) {
        case IrType::Int:
            return lit_int(
                ctx.opts->has(CompilerMutation::IntRefsStartAtOne) ? 1 : 0);
        case IrType::Bool: return lit_bool(false);
        case IrType::Char: return lit_char('a');
        case IrType::String: return char_list("");
    }
    return unit();
}

// (body) handle CML_e => if CML_e = <con> then () else raise CML_e
MlExpPtr absorb(MlExpPtr body, const std::string& ctor,
                std::optional<std::string> payload) {
    std::vector<MlExpPtr> args;
    if (payload) args.push_back(char_list(*payload));
    return handle_(std::move(body), kExnVar,
                   if_(prim(MlPrim::PolyEq, var(kExnVar), con(ctor, args)),
                       unit(), raise_(var(kExnVar))));
}

MlExpPtr compile_expr(const IrExpr& e, Ctx& ctx);

MlExpPtr compile_cmp_lt(const IrExpr& lhs_src, MlExpPtr lhs, MlExpPtr rhs,
                        Ctx& ctx) {
    auto lookup = [&](const std::string& n) { return ctx.type_of(n); };
    bool chars = infer_type(lhs_src, lookup) == IrType::Char;
    return prim(chars ? MlPrim::CharLt : MlPrim::IntLt, std::move(lhs),
                std::move(rhs));
}

MlExpPtr compile_binary(const IrExpr::Binary& n, Ctx& ctx) {
    MlExpPtr l = compile_expr(*n.lhs, ctx);
    MlExpPtr r = compile_expr(*n.rhs, ctx);
    switch (n.op) {
        case BinOp::Add: return prim(MlPrim::IntAdd, l, r);
        case BinOp::Sub: return prim(MlPrim::IntSub, l, r);
        case BinOp::Mul: return prim(MlPrim::IntMul, l, r);
        case BinOp::Div: return app(app(var("Dafny.ediv"), l), r);
        case BinOp::Mod: return app(app(var("Dafny.emod"), l), r);
        case BinOp::Lt: return compile_cmp_lt(*n.lhs, l, r, ctx);
        case BinOp::Le:
            // a <= b becomes not (b < a)
            if (ctx.opts->has(CompilerMutation::SwapLeNormalization))
                return not_(compile_cmp_lt(*n.lhs, l, r, ctx));
            return not_(compile_cmp_lt(*n.lhs, r, l, ctx));
        case BinOp::Gt: return compile_cmp_lt(*n.lhs, r, l, ctx);
        case BinOp::Ge: return not_(compile_cmp_lt(*n.lhs, l, r, ctx));
        case BinOp::Eq: return prim(MlPrim::PolyEq, l, r);
        case BinOp::Neq: return not_(prim(MlPrim::PolyEq, l, r));
        case BinOp::And: return andalso(l, r);
        case BinOp::Or: return orelse(l, r);
        case BinOp::Concat: return prim(MlPrim::ListAppend, l, r);
    }
    return unit();
}

MlExpPtr compile_expr(const IrExpr& e, Ctx& ctx) {
    return std::visit(
        [&](const auto& n) -> MlExpPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IrExpr::LitInt>) {
                return lit_int(n.value);
            } else if constexpr (std::is_same_v<T, IrExpr::LitBool>) {
                return lit_bool(n.value);
            } else if constexpr (std::is_same_v<T, IrExpr::LitChar>) {
                return lit_char(n.value);
            } else if constexpr (std::is_same_v<T, IrExpr::LitString>) {
                return char_list(n.text);
            } else if constexpr (std::is_same_v<T, IrExpr::Var>) {
                const Binding& b = ctx.binding(n.name);
                return b.boxed ? deref(var(b.target)) : var(b.target);
            } else if constexpr (std::is_same_v<T, IrExpr::Not>) {
                return not_(compile_expr(*n.operand, ctx));
            } else {
                return compile_binary(n, ctx);
            }
        },
        e.node);
}

MlExpPtr compile_block(const IrBlock& block, Ctx& ctx, MlExpPtr tail);
MlExpPtr compile_stmt(const IrStmt& s, Ctx& ctx);

MlExpPtr compile_while(const IrStmt::While& n,
                       const std::vector<std::string>& labels, Ctx& ctx) {
    std::string name = "CML_while_" + std::to_string(ctx.while_counter++);
    MlExpPtr cond = compile_expr(*n.cond, ctx);
    MlExpPtr body = compile_block(n.body, ctx, nullptr);

    // Continue must still reach the recursive call, so its handlers wrap
    // the body only.
    body = absorb(std::move(body), "Dafny.Continue", std::nullopt);
    for (auto it = labels.rbegin(); it != labels.rend(); ++it)
        body = absorb(std::move(body), "Dafny.LabeledContinue", *it);

    MlExpPtr loop_body =
        if_(std::move(cond), seq(std::move(body), app(var(name), unit())), unit());

    MlExpPtr invocation = app(var(name), unit());
    if (!ctx.opts->has(CompilerMutation::DropBreakHandler))
        invocation = absorb(std::move(invocation), "Dafny.Break", std::nullopt);
    if (ctx.opts->has(CompilerMutation::ReturnHandlerInsideLoops))
        invocation = absorb(std::move(invocation), "Dafny.Return", std::nullopt);

    return letrec({{name, kUnitParam, std::move(loop_body)}},
                  std::move(invocation));
}

MlExpPtr compile_labeled(const IrStmt::Labeled& n, Ctx& ctx) {
    std::vector<std::string> labels{n.label};
    const IrStmt* inner = n.body.get();
    while (auto* l = std::get_if<IrStmt::Labeled>(&inner->node)) {
        labels.push_back(l->label);
        inner = l->body.get();
    }
    MlExpPtr out;
    if (auto* w = std::get_if<IrStmt::While>(&inner->node))
        out = compile_while(*w, labels, ctx);
    else
        out = compile_stmt(*inner, ctx);
    for (auto it = labels.rbegin(); it != labels.rend(); ++it)
        out = absorb(std::move(out), "Dafny.LabeledBreak", *it);
    return out;
}

MlExpPtr compile_call(const IrStmt::Call& n, Ctx& ctx) {
    auto dot = n.callee.find('.');
    std::string mod = n.callee.substr(0, dot);
    MlExpPtr fn =
        var(mod == ctx.module_name ? n.callee.substr(dot + 1) : n.callee);
    for (const auto& a : n.args) fn = app(std::move(fn), compile_expr(*a, ctx));
    for (const auto& out : n.outs)
        fn = app(std::move(fn), var(ctx.binding(out).target));
    if (n.args.empty() && n.outs.empty()) fn = app(std::move(fn), unit());
    return fn;
}

MlExpPtr compile_print(const IrStmt::Print& n, Ctx& ctx) {
    auto lookup = [&](const std::string& name) { return ctx.type_of(name); };
    auto t = infer_type(*n.arg, lookup);
    MlExpPtr chars = compile_expr(*n.arg, ctx);
    if (t == IrType::Int)
        chars = app(var("Dafny.int_to_string"), std::move(chars));
    else if (t == IrType::Bool)
        chars = app(var("Dafny.bool_to_string"), std::move(chars));
    else if (t == IrType::Char)
        chars = app(var("Dafny.char_to_string"), std::move(chars));
    if (ctx.opts->has(CompilerMutation::SkipImplode))
        return print_prim(std::move(chars));
    return print_prim(implode(std::move(chars)));
}

MlExpPtr compile_stmt(const IrStmt& s, Ctx& ctx) {
    return std::visit(
        [&](const auto& n) -> MlExpPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IrStmt::Assign>) {
                return assign(var(ctx.binding(n.name).target),
                              compile_expr(*n.rhs, ctx));
            } else if constexpr (std::is_same_v<T, IrStmt::If>) {
                return if_(compile_expr(*n.cond, ctx),
                           compile_block(n.then_branch, ctx, nullptr),
                           compile_block(n.else_branch, ctx, nullptr));
            } else if constexpr (std::is_same_v<T, IrStmt::While>) {
                return compile_while(n, {}, ctx);
            } else if constexpr (std::is_same_v<T, IrStmt::Labeled>) {
                return compile_labeled(n, ctx);
            } else if constexpr (std::is_same_v<T, IrStmt::Call>) {
                return compile_call(n, ctx);
            } else if constexpr (std::is_same_v<T, IrStmt::Print>) {
                return compile_print(n, ctx);
            } else if constexpr (std::is_same_v<T, IrStmt::Return>) {
                return raise_(con("Dafny.Return"));
            } else if constexpr (std::is_same_v<T, IrStmt::Break>) {
                return raise_(con("Dafny.Break"));
            } else if constexpr (std::is_same_v<T, IrStmt::BreakLabel>) {
                return raise_(con("Dafny.LabeledBreak", {char_list(n.label)}));
            } else if constexpr (std::is_same_v<T, IrStmt::Continue>) {
                return raise_(con("Dafny.Continue"));
            } else if constexpr (std::is_same_v<T, IrStmt::ContinueLabel>) {
                return raise_(con("Dafny.LabeledContinue", {char_list(n.label)}));
            } else {
                static_assert(std::is_same_v<T, IrStmt::DeclVar>);
                throw std::logic_error("decl handled in compile_block");
            }
        },
        s.node);
}

MlExpPtr compile_seq(const IrBlock& block, std::size_t i, Ctx& ctx,
                     MlExpPtr tail) {
    if (i == block.size()) return tail ? tail : unit();
    if (auto* d = std::get_if<IrStmt::DeclVar>(&block[i]->node)) {
        int k = ctx.decl_ordinal[d->name]++;
        std::string mangled = "_" + std::to_string(k) + "_" + d->name;
        // The init is compiled before the new binding is visible, so an
        // initializer mentioning the same name sees the outer one.
        MlExpPtr init = compile_expr(*d->init, ctx);
        ctx.scopes.back().insert_or_assign(d->name,
                                           Binding{mangled, true, d->type});
        MlExpPtr rest = compile_seq(block, i + 1, ctx, std::move(tail));
        return let_(mangled, ref_(default_lit(d->type, ctx), d->name),
                    seq(assign(var(mangled), std::move(init)), std::move(rest)));
    }
    MlExpPtr cur = compile_stmt(*block[i], ctx);
    if (i + 1 == block.size() && !tail) return cur;
    return seq(std::move(cur), compile_seq(block, i + 1, ctx, std::move(tail)));
}

MlExpPtr compile_block(const IrBlock& block, Ctx& ctx, MlExpPtr tail) {
    ctx.scopes.emplace_back();
    MlExpPtr out = compile_seq(block, 0, ctx, std::move(tail));
    ctx.scopes.pop_back();
    return out;
}

MlFunBind compile_method(const IrMethod& m, const std::string& module_name,
                         const IrProgram& prog, const CompileOptions& opts) {
    Ctx ctx;
    ctx.prog = &prog;
    ctx.opts = &opts;
    ctx.module_name = module_name;
    std::set<std::string> boxed = mutated_in_params(m);
    ctx.boxed_ins = &boxed;

    ctx.scopes.emplace_back();
    for (const auto& p : m.ins)
        ctx.scopes.back().emplace(p.name,
                                  Binding{p.name, boxed.count(p.name) > 0, p.type});
    for (const auto& p : m.outs)
        ctx.scopes.back().emplace(p.name, Binding{p.name, true, p.type});

    MlExpPtr core = compile_block(m.body, ctx, raise_(con("Dafny.Return")));

    // Callee writes type defaults through the caller's out refs on entry.
    for (auto it = m.outs.rbegin(); it != m.outs.rend(); ++it)
        core = seq(assign(var(it->name), default_lit(it->type, ctx)),
                   std::move(core));

    core = absorb(std::move(core), "Dafny.Return", std::nullopt);

    // Assigned in-params are rebound as refs of the same name.
    for (auto it = m.ins.rbegin(); it != m.ins.rend(); ++it)
        if (boxed.count(it->name))
            core = let_(it->name, ref_(var(it->name), it->name), std::move(core));

    std::vector<std::string> params;
    for (const auto& p : m.ins) params.push_back(p.name);
    for (const auto& p : m.outs) params.push_back(p.name);
    if (params.empty()) params.push_back(kUnitParam);

    for (std::size_t i = params.size(); i-- > 1;)
        core = fn(params[i], std::move(core));
    return {m.name, params[0], std::move(core)};
}

MlDec build_runtime() {
    std::vector<MlDec> decs;
    auto exn = [&](const char* name, bool payload) {
        decs.push_back({MlDec::ExceptionDec{name, payload}});
    };
    exn("Return", false);
    exn("Break", false);
    exn("Continue", false);
    exn("LabeledBreak", true);
    exn("LabeledContinue", true);
    exn("DivByZero", false);

    auto ilt = [](MlExpPtr a, MlExpPtr b) {
        return prim(MlPrim::IntLt, std::move(a), std::move(b));
    };
    auto isub = [](MlExpPtr a, MlExpPtr b) {
        return prim(MlPrim::IntSub, std::move(a), std::move(b));
    };
    auto imul = [](MlExpPtr a, MlExpPtr b) {
        return prim(MlPrim::IntMul, std::move(a), std::move(b));
    };
    auto eq0 = [](MlExpPtr a) {
        return prim(MlPrim::PolyEq, std::move(a), lit_int(0));
    };
    auto neg = [&](MlExpPtr a) { return isub(lit_int(0), std::move(a)); };
    auto call1 = [](const char* f, MlExpPtr a) {
        return app(var(f), std::move(a));
    };
    auto call2 = [](const char* f, MlExpPtr a, MlExpPtr b) {
        return app(app(var(f), std::move(a)), std::move(b));
    };

    std::vector<MlFunBind> funs;

    funs.push_back(
        {"natabs", "x",
         if_(ilt(var("x"), lit_int(0)), neg(var("x")), var("x"))});

    funs.push_back(
        {"divpos", "a",
         fn("b",
            if_(ilt(var("a"), var("b")), lit_int(0),
                let_("q", call2("divpos", var("a"), imul(lit_int(2), var("b"))),
                     let_("q2", imul(lit_int(2), var("q")),
                          if_(ilt(isub(var("a"), imul(var("q2"), var("b"))),
                                  var("b")),
                              var("q2"),
                              prim(MlPrim::IntAdd, var("q2"), lit_int(1)))))))});

    funs.push_back(
        {"ediv", "a",
         fn("b",
            if_(eq0(var("b")), raise_(con("Dafny.DivByZero")),
                let_("q",
                     call2("divpos", call1("natabs", var("a")),
                           call1("natabs", var("b"))),
                     if_(not_(ilt(var("a"), lit_int(0))),
                         if_(not_(ilt(var("b"), lit_int(0))), var("q"),
                             neg(var("q"))),
                         let_("r",
                              isub(call1("natabs", var("a")),
                                   imul(var("q"), call1("natabs", var("b")))),
                              if_(eq0(var("r")),
                                  if_(not_(ilt(var("b"), lit_int(0))),
                                      neg(var("q")), var("q")),
                                  if_(not_(ilt(var("b"), lit_int(0))),
                                      isub(neg(var("q")), lit_int(1)),
                                      prim(MlPrim::IntAdd, var("q"),
                                           lit_int(1)))))))))});

    funs.push_back({"emod", "a",
                    fn("b", isub(var("a"),
                                 imul(var("b"), call2("ediv", var("a"),
                                                      var("b")))))});

    funs.push_back({"bool_to_string", "b",
                    if_(var("b"), char_list("true"), char_list("false"))});

    funs.push_back({"char_to_string", "c",
                    prim(MlPrim::ListCons, var("c"), char_list(""))});

    funs.push_back({"int_to_string", "n", int_to_chars(var("n"))});

    decs.push_back({MlDec::FunGroup{std::move(funs)}});
    return {MlDec::StructureDec{"Dafny", std::move(decs)}};
}

}  // namespace

MlDec runtime_structure() { return build_runtime(); }

MlProgramT compile_program(const IrProgram& p, const CompileOptions& opts) {
    ValidityReport report = validate(p);
    if (!report.ok()) throw CompileOnInvalid(std::move(report));

    MlProgramT out;
    out.decs.push_back(runtime_structure());
    for (const auto& mod : p.modules) {
        std::vector<MlFunBind> funs;
        for (const auto& m : mod.methods)
            funs.push_back(compile_method(m, mod.name, p, opts));
        out.decs.push_back({MlDec::StructureDec{
            mod.name, {MlDec{MlDec::FunGroup{std::move(funs)}}}}});
    }
    return out;
}

}  // namespace d2c
