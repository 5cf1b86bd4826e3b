#include <unordered_map>
#include <utility>

#include "d2c/ml_eval.hpp"

namespace d2c {

MlEnv env_bind(MlEnv env, std::string name, MlValue value) {
    return std::make_shared<const EnvNode>(
        EnvNode{std::move(name), std::move(value), std::move(env)});
}

const MlValue* env_lookup(const MlEnv& env, const std::string& name) {
    for (const EnvNode* n = env.get(); n; n = n->next.get())
        if (n->name == name) return &n->value;
    return nullptr;
}

std::string ml_value_describe(const MlValue& v) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BigInt>) {
                return n.str();
            } else if constexpr (std::is_same_v<T, bool>) {
                return n ? "true" : "false";
            } else if constexpr (std::is_same_v<T, char>) {
                return std::string("#\"") + n + "\"";
            } else if constexpr (std::is_same_v<T, MlValue::VStr>) {
                return "\"" + n.text + "\"";
            } else if constexpr (std::is_same_v<T, MlValue::VChars>) {
                return "chars \"" + n.chars + "\"";
            } else if constexpr (std::is_same_v<T, MlValue::VUnit>) {
                return "()";
            } else if constexpr (std::is_same_v<T, MlValue::VExn>) {
                return n.payload ? n.constructor + " \"" + *n.payload + "\""
                                 : n.constructor;
            } else if constexpr (std::is_same_v<T, MlValue::VRef>) {
                return "<ref " + std::to_string(n.addr) + ">";
            } else {
                return "<fn>";
            }
        },
        v.node);
}

std::string TgtResult::describe() const {
    switch (kind) {
        case Kind::Val: return "RVal " + ml_value_describe(value);
        case Kind::Raise: return "RRaise " + ml_value_describe(value);
        case Kind::Timeout: return "RTimeout";
        case Kind::TypeErr: return "RTypeErr(" + detail + ")";
    }
    return "?";
}

namespace {

using VStr = MlValue::VStr;
using VChars = MlValue::VChars;
using VUnit = MlValue::VUnit;
using VClosure = MlValue::VClosure;
using VRecClosure = MlValue::VRecClosure;
using VRef = MlValue::VRef;
using VExn = MlValue::VExn;

struct Frame {
    struct AppFn { MlExpPtr arg; MlEnv env; };
    struct AppArg { MlValue fn; };
    struct IfK { MlExpPtr then_e, else_e; MlEnv env; };
    struct LetK { std::string name; MlExpPtr body; MlEnv env; };
    struct SeqK { MlExpPtr second; MlEnv env; };
    struct RefK { std::string label; };
    struct DerefK {};
    struct Assign1 { MlExpPtr value; MlEnv env; };
    struct Assign2 { MlValue target; };
    struct RaiseK {};
    struct HandleK { std::string exn_var; MlExpPtr handler; MlEnv env; };
    struct ConK { std::string ctor; };
    struct Bin1 { MlPrim op; MlExpPtr rhs; MlEnv env; };
    struct Bin2 { MlPrim op; MlValue lhs; };
    struct ImplodeK {};
    struct IntToCharsK {};
    struct PrintK {};

    std::variant<AppFn, AppArg, IfK, LetK, SeqK, RefK, DerefK, Assign1, Assign2,
                 RaiseK, HandleK, ConK, Bin1, Bin2, ImplodeK, IntToCharsK, PrintK>
        v;
};

using Globals = std::unordered_map<std::string, MlValue>;

class Machine {
  public:
    Machine(TgtState& st, const Globals* globals) : st_(st), globals_(globals) {}

    TgtResult run(MlExpPtr start, MlEnv env) {
        cur_ = std::move(start);
        env_ = std::move(env);
        for (;;) {
            switch (mode_) {
                case Mode::Eval:
                    if (!step_eval()) return std::move(out_);
                    break;
                case Mode::Value:
                    if (!step_value()) return std::move(out_);
                    break;
                case Mode::Raise:
                    if (!step_raise()) return std::move(out_);
                    break;
            }
        }
    }

  private:
    enum class Mode { Eval, Value, Raise };

    bool finish(TgtResult r) {
        out_ = std::move(r);
        return false;
    }
    bool type_err(std::string detail) {
        return finish({TgtResult::Kind::TypeErr, {}, std::move(detail)});
    }
    bool value(MlValue v) {
        val_ = std::move(v);
        mode_ = Mode::Value;
        return true;
    }
    bool eval(MlExpPtr e, MlEnv env) {
        cur_ = std::move(e);
        env_ = std::move(env);
        mode_ = Mode::Eval;
        return true;
    }

    template <class F>
    void push(F frame) {
        k_.push_back({std::move(frame)});
    }

    bool step_eval() {
        const MlExp& e = *cur_;
        return std::visit(
            [&](const auto& n) -> bool {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, MlExp::Lit>) {
                    return std::visit(
                        [&](const auto& lv) -> bool {
                            using L = std::decay_t<decltype(lv)>;
                            if constexpr (std::is_same_v<L, std::monostate>)
                                return value(MlValue{VUnit{}});
                            else if constexpr (std::is_same_v<L, std::string>)
                                return value(MlValue{VStr{lv}});
                            else
                                return value(MlValue{lv});
                        },
                        n.value);
                } else if constexpr (std::is_same_v<T, MlExp::Var>) {
                    if (const MlValue* v = env_lookup(env_, n.name))
                        return value(*v);
                    if (globals_) {
                        auto it = globals_->find(n.name);
                        if (it != globals_->end()) return value(it->second);
                    }
                    return type_err("unbound variable " + n.name);
                } else if constexpr (std::is_same_v<T, MlExp::App>) {
                    push(Frame::AppFn{n.arg, env_});
                    return eval(n.fn, env_);
                } else if constexpr (std::is_same_v<T, MlExp::Fn>) {
                    return value(MlValue{VClosure{env_, n.param, n.body}});
                } else if constexpr (std::is_same_v<T, MlExp::If>) {
                    push(Frame::IfK{n.then_e, n.else_e, env_});
                    return eval(n.cond, env_);
                } else if constexpr (std::is_same_v<T, MlExp::Let>) {
                    push(Frame::LetK{n.name, n.body, env_});
                    return eval(n.bound, env_);
                } else if constexpr (std::is_same_v<T, MlExp::LetRecFuns>) {
                    return eval(n.body, bind_group(env_, n.funs));
                } else if constexpr (std::is_same_v<T, MlExp::Seq>) {
                    push(Frame::SeqK{n.second, env_});
                    return eval(n.first, env_);
                } else if constexpr (std::is_same_v<T, MlExp::Ref>) {
                    push(Frame::RefK{n.label});
                    return eval(n.init, env_);
                } else if constexpr (std::is_same_v<T, MlExp::Deref>) {
                    push(Frame::DerefK{});
                    return eval(n.target, env_);
                } else if constexpr (std::is_same_v<T, MlExp::AssignRef>) {
                    push(Frame::Assign1{n.value, env_});
                    return eval(n.target, env_);
                } else if constexpr (std::is_same_v<T, MlExp::Raise>) {
                    push(Frame::RaiseK{});
                    return eval(n.exn, env_);
                } else if constexpr (std::is_same_v<T, MlExp::Handle>) {
                    push(Frame::HandleK{n.exn_var, n.handler, env_});
                    return eval(n.body, env_);
                } else if constexpr (std::is_same_v<T, MlExp::Con>) {
                    if (n.args.empty())
                        return value(MlValue{VExn{n.constructor, std::nullopt}});
                    if (n.args.size() != 1)
                        return type_err("constructor arity for " + n.constructor);
                    push(Frame::ConK{n.constructor});
                    return eval(n.args[0], env_);
                } else if constexpr (std::is_same_v<T, MlExp::BinPrim>) {
                    push(Frame::Bin1{n.op, n.rhs, env_});
                    return eval(n.lhs, env_);
                } else if constexpr (std::is_same_v<T, MlExp::Implode>) {
                    push(Frame::ImplodeK{});
                    return eval(n.arg, env_);
                } else if constexpr (std::is_same_v<T, MlExp::IntToChars>) {
                    push(Frame::IntToCharsK{});
                    return eval(n.arg, env_);
                } else if constexpr (std::is_same_v<T, MlExp::CharList>) {
                    return value(MlValue{VChars{n.text}});
                } else {
                    static_assert(std::is_same_v<T, MlExp::PrintPrim>);
                    push(Frame::PrintK{});
                    return eval(n.arg, env_);
                }
            },
            e.node);
    }

    static MlEnv bind_group(const MlEnv& env, const std::vector<MlFunBind>& funs) {
        auto group = std::make_shared<const std::vector<MlFunBind>>(funs);
        MlEnv out = env;
        for (const auto& b : *group)
            out = env_bind(out, b.name, MlValue{VRecClosure{env, group, b.name}});
        return out;
    }

    bool apply(MlValue fn, MlValue arg) {
        if (auto* c = std::get_if<VClosure>(&fn.node)) {
            if (st_.fuel == 0) return finish({TgtResult::Kind::Timeout, {}, {}});
            --st_.fuel;
            return eval(c->body, env_bind(c->env, c->param, std::move(arg)));
        }
        if (auto* r = std::get_if<VRecClosure>(&fn.node)) {
            if (st_.fuel == 0) return finish({TgtResult::Kind::Timeout, {}, {}});
            --st_.fuel;
            const MlFunBind* bind = nullptr;
            for (const auto& b : *r->group)
                if (b.name == r->selected) bind = &b;
            if (!bind) return type_err("missing group member " + r->selected);
            MlEnv env = bind_group_shared(r->env, r->group);
            return eval(bind->body, env_bind(std::move(env), bind->param,
                                             std::move(arg)));
        }
        return type_err("apply of non-function " + ml_value_describe(fn));
    }

    static MlEnv bind_group_shared(
        const MlEnv& env, const std::shared_ptr<const std::vector<MlFunBind>>& g) {
        MlEnv out = env;
        for (const auto& b : *g)
            out = env_bind(out, b.name, MlValue{VRecClosure{env, g, b.name}});
        return out;
    }

    bool step_value() {
        if (k_.empty()) return finish({TgtResult::Kind::Val, std::move(val_), {}});
        Frame f = std::move(k_.back());
        k_.pop_back();
        return std::visit(
            [&](auto& fr) -> bool {
                using T = std::decay_t<decltype(fr)>;
                if constexpr (std::is_same_v<T, Frame::AppFn>) {
                    push(Frame::AppArg{std::move(val_)});
                    return eval(fr.arg, fr.env);
                } else if constexpr (std::is_same_v<T, Frame::AppArg>) {
                    return apply(std::move(fr.fn), std::move(val_));
                } else if constexpr (std::is_same_v<T, Frame::IfK>) {
                    auto* b = std::get_if<bool>(&val_.node);
                    if (!b) return type_err("if on non-bool");
                    return eval(*b ? fr.then_e : fr.else_e, fr.env);
                } else if constexpr (std::is_same_v<T, Frame::LetK>) {
                    return eval(fr.body,
                                env_bind(fr.env, fr.name, std::move(val_)));
                } else if constexpr (std::is_same_v<T, Frame::SeqK>) {
                    return eval(fr.second, fr.env);
                } else if constexpr (std::is_same_v<T, Frame::RefK>) {
                    st_.store.push_back({std::move(val_), fr.label});
                    return value(MlValue{VRef{st_.store.size() - 1}});
                } else if constexpr (std::is_same_v<T, Frame::DerefK>) {
                    auto* r = std::get_if<VRef>(&val_.node);
                    if (!r) return type_err("deref of non-ref");
                    return value(st_.store[r->addr].value);
                } else if constexpr (std::is_same_v<T, Frame::Assign1>) {
                    push(Frame::Assign2{std::move(val_)});
                    return eval(fr.value, fr.env);
                } else if constexpr (std::is_same_v<T, Frame::Assign2>) {
                    auto* r = std::get_if<VRef>(&fr.target.node);
                    if (!r) return type_err("assign to non-ref");
                    st_.store[r->addr].value = std::move(val_);
                    return value(MlValue{VUnit{}});
                } else if constexpr (std::is_same_v<T, Frame::RaiseK>) {
                    if (!std::holds_alternative<VExn>(val_.node))
                        return type_err("raise of non-exception");
                    mode_ = Mode::Raise;
                    return true;
                } else if constexpr (std::is_same_v<T, Frame::HandleK>) {
                    return true;  // body finished normally; drop the handler
                } else if constexpr (std::is_same_v<T, Frame::ConK>) {
                    if (auto* c = std::get_if<VChars>(&val_.node))
                        return value(MlValue{VExn{fr.ctor, c->chars}});
                    if (auto* s = std::get_if<VStr>(&val_.node))
                        return value(MlValue{VExn{fr.ctor, s->text}});
                    return type_err("constructor payload for " + fr.ctor);
                } else if constexpr (std::is_same_v<T, Frame::Bin1>) {
                    push(Frame::Bin2{fr.op, std::move(val_)});
                    return eval(fr.rhs, fr.env);
                } else if constexpr (std::is_same_v<T, Frame::Bin2>) {
                    return prim(fr.op, std::move(fr.lhs), std::move(val_));
                } else if constexpr (std::is_same_v<T, Frame::ImplodeK>) {
                    auto* c = std::get_if<VChars>(&val_.node);
                    if (!c) return type_err("implode of non-char-list");
                    return value(MlValue{VStr{std::move(c->chars)}});
                } else if constexpr (std::is_same_v<T, Frame::IntToCharsK>) {
                    auto* i = std::get_if<BigInt>(&val_.node);
                    if (!i) return type_err("int_to_chars of non-int");
                    return value(MlValue{VChars{i->str()}});
                } else {
                    static_assert(std::is_same_v<T, Frame::PrintK>);
                    auto* s = std::get_if<VStr>(&val_.node);
                    if (!s) return type_err("print of non-string");
                    st_.output += s->text;
                    return value(MlValue{VUnit{}});
                }
            },
            f.v);
    }

    bool step_raise() {
        while (!k_.empty()) {
            Frame f = std::move(k_.back());
            k_.pop_back();
            if (auto* h = std::get_if<Frame::HandleK>(&f.v))
                return eval(h->handler,
                            env_bind(h->env, h->exn_var, std::move(val_)));
        }
        return finish({TgtResult::Kind::Raise, std::move(val_), {}});
    }

    bool prim(MlPrim op, MlValue lhs, MlValue rhs) {
        switch (op) {
            case MlPrim::IntAdd:
            case MlPrim::IntSub:
            case MlPrim::IntMul:
            case MlPrim::IntLt: {
                auto* a = std::get_if<BigInt>(&lhs.node);
                auto* b = std::get_if<BigInt>(&rhs.node);
                if (!a || !b) return type_err("int primitive on non-int");
                switch (op) {
                    case MlPrim::IntAdd: return value(MlValue{*a + *b});
                    case MlPrim::IntSub: return value(MlValue{*a - *b});
                    case MlPrim::IntMul: return value(MlValue{*a * *b});
                    default: return value(MlValue{*a < *b});
                }
            }
            case MlPrim::CharLt: {
                auto* a = std::get_if<char>(&lhs.node);
                auto* b = std::get_if<char>(&rhs.node);
                if (!a || !b) return type_err("char comparison on non-char");
                return value(MlValue{*a < *b});
            }
            case MlPrim::PolyEq: {
                bool ok = true;
                bool eq = poly_eq(lhs, rhs, ok);
                if (!ok) return type_err("equality on functional value");
                return value(MlValue{eq});
            }
            case MlPrim::ListCons: {
                auto* c = std::get_if<char>(&lhs.node);
                auto* l = std::get_if<VChars>(&rhs.node);
                if (!c || !l) return type_err("cons on non-char-list");
                return value(MlValue{VChars{std::string(1, *c) + l->chars}});
            }
            case MlPrim::ListAppend: {
                auto* a = std::get_if<VChars>(&lhs.node);
                auto* b = std::get_if<VChars>(&rhs.node);
                if (!a || !b) return type_err("append on non-char-list");
                return value(MlValue{VChars{a->chars + b->chars}});
            }
        }
        return type_err("unknown primitive");
    }

    static bool poly_eq(const MlValue& a, const MlValue& b, bool& ok) {
        if (std::holds_alternative<VClosure>(a.node) ||
            std::holds_alternative<VRecClosure>(a.node) ||
            std::holds_alternative<VRef>(a.node) ||
            std::holds_alternative<VClosure>(b.node) ||
            std::holds_alternative<VRecClosure>(b.node) ||
            std::holds_alternative<VRef>(b.node)) {
            ok = false;
            return false;
        }
        if (a.node.index() != b.node.index()) return false;
        return std::visit(
            [&](const auto& x) -> bool {
                using T = std::decay_t<decltype(x)>;
                const auto& y = std::get<T>(b.node);
                if constexpr (std::is_same_v<T, VStr>) {
                    return x.text == y.text;
                } else if constexpr (std::is_same_v<T, VChars>) {
                    return x.chars == y.chars;
                } else if constexpr (std::is_same_v<T, VUnit>) {
                    return true;
                } else if constexpr (std::is_same_v<T, VExn>) {
                    return x.constructor == y.constructor &&
                           x.payload == y.payload;
                } else if constexpr (std::is_same_v<T, BigInt> ||
                                     std::is_same_v<T, bool> ||
                                     std::is_same_v<T, char>) {
                    return x == y;
                } else {
                    return false;
                }
            },
            a.node);
    }

    TgtState& st_;
    const Globals* globals_;
    Mode mode_ = Mode::Eval;
    MlExpPtr cur_;
    MlEnv env_;
    MlValue val_;
    std::vector<Frame> k_;
    TgtResult out_;
};

}  // namespace

TgtResult eval_ml(TgtState& state, const MlEnv& env, const MlExpPtr& e) {
    return Machine(state, nullptr).run(e, env);
}

TgtRun run_ml_program(const MlProgramT& p, long long fuel) {
    TgtRun run;
    run.state.fuel = fuel;

    Globals globals;
    for (const auto& d : p.decs) {
        if (auto* s = std::get_if<MlDec::StructureDec>(&d.node)) {
            for (const auto& inner : s->decs) {
                auto* g = std::get_if<MlDec::FunGroup>(&inner.node);
                if (!g) continue;
                auto group = std::make_shared<const std::vector<MlFunBind>>(g->funs);
                for (const auto& b : *group)
                    globals.emplace(
                        s->name + "." + b.name,
                        MlValue{MlValue::VRecClosure{nullptr, group, b.name}});
            }
        } else if (auto* g = std::get_if<MlDec::FunGroup>(&d.node)) {
            auto group = std::make_shared<const std::vector<MlFunBind>>(g->funs);
            for (const auto& b : *group)
                globals.emplace(b.name, MlValue{MlValue::VRecClosure{nullptr, group,
                                                                     b.name}});
        }
    }

    if (!globals.count("_module.Main")) {
        run.result = {TgtResult::Kind::TypeErr, {}, "_module.Main is not defined"};
        return run;
    }

    MlExpPtr start = ml::app(ml::var("_module.Main"), ml::unit());
    run.result = Machine(run.state, &globals).run(start, nullptr);
    return run;
}

}  // namespace d2c
