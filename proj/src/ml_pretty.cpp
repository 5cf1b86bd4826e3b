#include <functional>
#include <optional>

#include "d2c/ml_ast.hpp"

namespace d2c {

namespace {

// Unit params render as (); the compiler uses this exact name for them.
constexpr const char* kUnitParam = "CML_unit";

std::string ml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

bool is_bool_lit(const MlExp& e, bool want) {
    auto* l = std::get_if<MlExp::Lit>(&e.node);
    if (!l) return false;
    auto* b = std::get_if<bool>(&l->value);
    return b && *b == want;
}

bool is_unit_lit(const MlExp& e) {
    auto* l = std::get_if<MlExp::Lit>(&e.node);
    return l && std::holds_alternative<std::monostate>(l->value);
}

enum class BoolForm { None, Not, AndAlso, OrElse };

BoolForm bool_form(const MlExp::If& n) {
    if (is_bool_lit(*n.then_e, false) && is_bool_lit(*n.else_e, true))
        return BoolForm::Not;
    if (is_bool_lit(*n.else_e, false)) return BoolForm::AndAlso;
    if (is_bool_lit(*n.then_e, true)) return BoolForm::OrElse;
    return BoolForm::None;
}

// Recognizes If(v = Con, (), raise v): the plain absorb handler the
// compiler emits for Return/Break/Continue. Returns the constructor.
std::optional<std::string> absorb_pattern(const MlExp::Handle& h) {
    auto* i = std::get_if<MlExp::If>(&h.handler->node);
    if (!i || !is_unit_lit(*i->then_e)) return std::nullopt;
    auto* eq = std::get_if<MlExp::BinPrim>(&i->cond->node);
    if (!eq || eq->op != MlPrim::PolyEq) return std::nullopt;
    auto* v = std::get_if<MlExp::Var>(&eq->lhs->node);
    auto* c = std::get_if<MlExp::Con>(&eq->rhs->node);
    if (!v || !c || v->name != h.exn_var || !c->args.empty()) return std::nullopt;
    auto* r = std::get_if<MlExp::Raise>(&i->else_e->node);
    if (!r) return std::nullopt;
    auto* rv = std::get_if<MlExp::Var>(&r->exn->node);
    if (!rv || rv->name != h.exn_var) return std::nullopt;
    return c->constructor;
}

bool is_block(const MlExp& e) {
    if (std::holds_alternative<MlExp::Seq>(e.node) ||
        std::holds_alternative<MlExp::Let>(e.node) ||
        std::holds_alternative<MlExp::LetRecFuns>(e.node) ||
        std::holds_alternative<MlExp::Handle>(e.node))
        return true;
    if (auto* i = std::get_if<MlExp::If>(&e.node))
        return bool_form(*i) == BoolForm::None;
    return false;
}

// Context precedences: a node parenthesizes itself when its own level is
// below the context's requirement. 11 = atom position.
constexpr int kAtom = 11, kApp = 10, kMul = 7, kAdd = 6, kCons = 5, kCmp = 4,
              kAssign = 3, kAndAlso = 2, kOrElse = 1, kLow = 0;

struct PrimInfo {
    const char* text;
    int level, lhs, rhs;
};

PrimInfo prim_info(MlPrim op) {
    switch (op) {
        case MlPrim::IntAdd: return {"+", kAdd, kAdd, kAdd + 1};
        case MlPrim::IntSub: return {"-", kAdd, kAdd, kAdd + 1};
        case MlPrim::IntMul: return {"*", kMul, kMul, kMul + 1};
        case MlPrim::IntLt: return {"<", kCmp, kCmp + 1, kCmp + 1};
        case MlPrim::CharLt: return {"<", kCmp, kCmp + 1, kCmp + 1};
        case MlPrim::PolyEq: return {"=", kCmp, kCmp + 1, kCmp + 1};
        case MlPrim::ListCons: return {"::", kCons, kCons + 1, kCons};
        case MlPrim::ListAppend: return {"@", kCons, kCons + 1, kCons};
    }
    return {"?", kAtom, kAtom, kAtom};
}

void collect_seq(const MlExp& e, std::vector<const MlExp*>& items) {
    if (auto* s = std::get_if<MlExp::Seq>(&e.node)) {
        collect_seq(*s->first, items);
        collect_seq(*s->second, items);
    } else {
        items.push_back(&e);
    }
}

class Printer {
  public:
    std::string run(const MlProgramT& p) {
        for (std::size_t i = 0; i < p.decs.size(); ++i) {
            if (i) out_ += "\n";
            dec(p.decs[i], 0);
        }
        return std::move(out_);
    }

    std::string run_exp(const MlExp& e) {
        any(e, 0);
        out_ += "\n";
        return std::move(out_);
    }

  private:
    void text(const std::string& s) { out_ += s; }
    void nl(int ind) {
        out_ += "\n";
        out_.append(static_cast<std::size_t>(ind), ' ');
    }

    void dec(const MlDec& d, int ind) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, MlDec::StructureDec>) {
                    text("structure " + n.name + " = struct");
                    for (const auto& inner : n.decs) {
                        nl(ind + 2);
                        dec(inner, ind + 2);
                    }
                    nl(ind);
                    text("end\n");
                } else if constexpr (std::is_same_v<T, MlDec::FunGroup>) {
                    fun_group(n.funs, ind);
                } else {
                    text("exception " + n.name);
                    if (n.has_payload) text(" of string");
                }
            },
            d.node);
    }

    void fun_group(const std::vector<MlFunBind>& funs, int ind) {
        for (std::size_t i = 0; i < funs.size(); ++i) {
            if (i) nl(ind);
            fun_bind(funs[i], i == 0 ? "fun" : "and", ind);
        }
    }

    void fun_bind(const MlFunBind& b, const char* kw, int ind) {
        text(std::string(kw) + " " + b.name);
        const MlExp* body = b.body.get();
        std::vector<std::string> params{b.param};
        while (auto* f = std::get_if<MlExp::Fn>(&body->node)) {
            params.push_back(f->param);
            body = f->body.get();
        }
        for (const auto& p : params)
            text(p == kUnitParam ? " ()" : " " + p);
        text(" =");
        nl(ind + 2);
        any(*body, ind + 2);
    }

    // Renders e at the current cursor column (== ind for multi-line forms).
    void any(const MlExp& e, int ind) {
        if (is_block(e))
            blk(e, ind);
        else
            inl(e, kLow);
    }

    void blk(const MlExp& e, int ind) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, MlExp::Seq>) {
                    blk_seq(e, ind);
                } else if constexpr (std::is_same_v<T, MlExp::Let>) {
                    text("let val " + n.name + " = ");
                    inl(*n.bound, kLow);
                    text(" in");
                    nl(ind + 2);
                    any(*n.body, ind + 2);
                    nl(ind);
                    text("end");
                } else if constexpr (std::is_same_v<T, MlExp::LetRecFuns>) {
                    text("let");
                    nl(ind + 2);
                    fun_group(n.funs, ind + 2);
                    nl(ind);
                    text("in");
                    nl(ind + 2);
                    any(*n.body, ind + 2);
                    nl(ind);
                    text("end");
                } else if constexpr (std::is_same_v<T, MlExp::If>) {
                    text("if ");
                    inl(*n.cond, kLow);
                    text(" then");
                    branch(*n.then_e, ind);
                    nl(ind);
                    text("else");
                    branch(*n.else_e, ind);
                } else if constexpr (std::is_same_v<T, MlExp::Handle>) {
                    blk_handle(n, ind);
                } else {
                    inl(e, kLow);
                }
            },
            e.node);
    }

    void branch(const MlExp& e, int ind) {
        if (is_block(e)) {
            nl(ind + 2);
            blk(e, ind + 2);
        } else {
            text(" ");
            inl(e, kLow);
        }
    }

    void blk_seq(const MlExp& e, int ind) {
        std::vector<const MlExp*> items;
        collect_seq(e, items);
        text("(");
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) {
                text(";");
                nl(ind + 1);
            }
            any(*items[i], ind + 1);
        }
        text(")");
    }

    void blk_handle(const MlExp::Handle& n, int ind) {
        std::size_t body_start = out_.size();
        if (std::holds_alternative<MlExp::Seq>(n.body->node)) {
            blk_seq(*n.body, ind);
        } else if (is_block(*n.body)) {
            text("(");
            blk(*n.body, ind + 1);
            text(")");
        } else {
            text("(");
            inl(*n.body, kLow);
            text(")");
        }
        bool one_line =
            out_.find('\n', body_start) == std::string::npos;
        if (auto c = absorb_pattern(n)) {
            if (one_line)
                text(" handle " + *c + " => ()");
            else {
                nl(ind);
                text("handle " + *c + " => ()");
            }
            return;
        }
        nl(ind);
        text("handle " + n.exn_var + " =>");
        nl(ind + 2);
        any(*n.handler, ind + 2);
    }

    void paren_inl(const MlExp& e) {
        text("(");
        inl(e, kLow);
        text(")");
    }

    void inl(const MlExp& e, int need) {
        std::visit([&](const auto& n) { inl_node(e, n, need); }, e.node);
    }

    void wrap(int level, int need, const std::function<void()>& body) {
        if (level < need) text("(");
        body();
        if (level < need) text(")");
    }

    void inl_node(const MlExp&, const MlExp::Lit& n, int need) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::monostate>) {
                    text("()");
                } else if constexpr (std::is_same_v<T, BigInt>) {
                    if (v < 0)
                        wrap(kApp, need, [&] { text("~" + BigInt(-v).str()); });
                    else
                        text(v.str());
                } else if constexpr (std::is_same_v<T, bool>) {
                    text(v ? "true" : "false");
                } else if constexpr (std::is_same_v<T, char>) {
                    text("#\"" + ml_escape(std::string(1, v)) + "\"");
                } else {
                    text("\"" + ml_escape(v) + "\"");
                }
            },
            n.value);
    }

    void inl_node(const MlExp&, const MlExp::Var& n, int) { text(n.name); }

    void inl_node(const MlExp&, const MlExp::App& n, int need) {
        wrap(kApp, need, [&] {
            inl(*n.fn, kApp);
            text(" ");
            inl(*n.arg, kAtom);
        });
    }

    void inl_node(const MlExp&, const MlExp::Fn& n, int need) {
        wrap(kLow, need, [&] {
            text("fn " + n.param + " => ");
            inl(*n.body, kLow);
        });
    }

    void inl_node(const MlExp& e, const MlExp::If& n, int need) {
        switch (bool_form(n)) {
            case BoolForm::Not:
                wrap(kApp, need, [&] {
                    text("not ");
                    inl(*n.cond, kAtom);
                });
                return;
            case BoolForm::AndAlso:
                wrap(kAndAlso, need, [&] {
                    inl(*n.cond, kAndAlso + 1);
                    text(" andalso ");
                    inl(*n.then_e, kAndAlso);
                });
                return;
            case BoolForm::OrElse:
                wrap(kOrElse, need, [&] {
                    inl(*n.cond, kOrElse + 1);
                    text(" orelse ");
                    inl(*n.else_e, kOrElse);
                });
                return;
            case BoolForm::None: break;
        }
        wrap(kLow, need, [&] {
            text("if ");
            inl(*n.cond, kLow);
            text(" then ");
            inl(*n.then_e, kLow);
            text(" else ");
            inl(*n.else_e, kLow);
        });
        (void)e;
    }

    void inl_node(const MlExp&, const MlExp::Let& n, int) {
        text("let val " + n.name + " = ");
        inl(*n.bound, kLow);
        text(" in ");
        inl(*n.body, kLow);
        text(" end");
    }

    void inl_node(const MlExp&, const MlExp::LetRecFuns& n, int) {
        text("let ");
        for (std::size_t i = 0; i < n.funs.size(); ++i) {
            const auto& b = n.funs[i];
            text(std::string(i ? " and " : "fun ") + b.name);
            text(b.param == kUnitParam ? " ()" : " " + b.param);
            text(" = ");
            inl(*b.body, kLow);
        }
        text(" in ");
        inl(*n.body, kLow);
        text(" end");
    }

    void inl_node(const MlExp& e, const MlExp::Seq&, int) {
        std::vector<const MlExp*> items;
        collect_seq(e, items);
        text("(");
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) text("; ");
            inl(*items[i], kLow);
        }
        text(")");
    }

    void inl_node(const MlExp&, const MlExp::Ref& n, int need) {
        wrap(kApp, need, [&] {
            text("ref ");
            inl(*n.init, kAtom);
        });
    }

    void inl_node(const MlExp&, const MlExp::Deref& n, int) {
        text("(! ");
        inl(*n.target, kAtom);
        text(")");
    }

    void inl_node(const MlExp&, const MlExp::AssignRef& n, int need) {
        wrap(kAssign, need, [&] {
            inl(*n.target, kAssign + 1);
            text(" := ");
            inl(*n.value, kAssign + 1);
        });
    }

    void inl_node(const MlExp&, const MlExp::Raise& n, int need) {
        wrap(kLow, need, [&] {
            text("raise ");
            inl(*n.exn, kAtom);
        });
    }

    void inl_node(const MlExp& e, const MlExp::Handle& h, int need) {
        wrap(kLow, need, [&] {
            paren_inl(*h.body);
            if (auto c = absorb_pattern(h)) {
                text(" handle " + *c + " => ()");
            } else {
                text(" handle " + h.exn_var + " => ");
                inl(*h.handler, kLow);
            }
        });
        (void)e;
    }

    void inl_node(const MlExp&, const MlExp::Con& n, int need) {
        if (n.args.empty()) {
            text(n.constructor);
            return;
        }
        wrap(kApp, need, [&] {
            text(n.constructor);
            for (const auto& a : n.args) {
                text(" ");
                inl(*a, kAtom);
            }
        });
    }

    void inl_node(const MlExp&, const MlExp::BinPrim& n, int need) {
        PrimInfo info = prim_info(n.op);
        wrap(info.level, need, [&] {
            inl(*n.lhs, info.lhs);
            text(std::string(" ") + info.text + " ");
            inl(*n.rhs, info.rhs);
        });
    }

    void inl_node(const MlExp&, const MlExp::Implode& n, int need) {
        wrap(kApp, need, [&] {
            text("String.implode ");
            inl(*n.arg, kAtom);
        });
    }

    void inl_node(const MlExp&, const MlExp::IntToChars& n, int need) {
        wrap(kApp, need, [&] {
            text("String.explode (Int.toString ");
            inl(*n.arg, kAtom);
            text(")");
        });
    }

    void inl_node(const MlExp&, const MlExp::CharList& n, int) {
        text("\"" + ml_escape(n.text) + "\"");
    }

    void inl_node(const MlExp&, const MlExp::PrintPrim& n, int need) {
        wrap(kApp, need, [&] {
            text("print ");
            inl(*n.arg, kAtom);
        });
    }

    std::string out_;
};

}  // namespace

std::string pretty(const MlProgramT& p) { return Printer{}.run(p); }

std::string pretty_exp(const MlExp& e) { return Printer{}.run_exp(e); }

}  // namespace d2c
