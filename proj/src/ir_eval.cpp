#include <algorithm>
#include <unordered_map>
#include <utility>

#include "d2c/ir_eval.hpp"

namespace d2c {

SrcValue default_value(IrType t) {
    switch (t) {
        case IrType::Int: return BigInt(0);
        case IrType::Bool: return false;
        case IrType::Char: return 'a';
        case IrType::String: return std::string();
    }
    return BigInt(0);
}

std::string stringify(const SrcValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, BigInt>) {
                return x.str();
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else if constexpr (std::is_same_v<T, char>) {
                return std::string(1, x);
            } else {
                return x;
            }
        },
        v);
}

const char* src_err_name(SrcErrKind k) {
    switch (k) {
        case SrcErrKind::DivByZero: return "DivByZero";
        case SrcErrKind::UnboundName: return "UnboundName";
        case SrcErrKind::TypeConfusion: return "TypeConfusion";
        case SrcErrKind::ControlEscape: return "ControlEscape";
    }
    return "?";
}

std::string SrcResult::describe() const {
    switch (status) {
        case RunStatus::Done: return "Done";
        case RunStatus::Err: return std::string("Err(") + src_err_name(err) + ")";
        case RunStatus::Timeout: return "Timeout";
    }
    return "?";
}

namespace {

enum class FlowKind {
    Normal,
    Returned,
    Broke,
    Continued,
    BrokeLabel,
    ContinuedLabel,
    Erred,
    TimedOut
};

struct Flow {
    FlowKind kind = FlowKind::Normal;
    std::string label;
};

struct Slot {
    SrcValue value;
    int cell = -1;  // index into SrcResult::cells; -1 for plain bindings
};

// Insertion order is significant: it is the cell-creation order within the
// frame, and shadowing works by scanning backwards.
using Frame = std::vector<std::pair<std::string, Slot>>;

const std::vector<std::string> kNoLabels;

class SrcEval {
  public:
    SrcEval(const IrProgram& p, long long clock) : prog_(p) {
        res_.clock_left = clock;
    }

    SrcResult run() {
        const IrMethod* main = prog_.find_method("_module.Main");
        if (!main) {
            res_.status = RunStatus::Err;
            res_.err = SrcErrKind::UnboundName;
            return std::move(res_);
        }
        if (!main->ins.empty() || !main->outs.empty()) {
            res_.status = RunStatus::Err;
            res_.err = SrcErrKind::TypeConfusion;
            return std::move(res_);
        }
        Flow f = eval_method(*main, {}, {});
        switch (f.kind) {
            case FlowKind::Normal: res_.status = RunStatus::Done; break;
            case FlowKind::TimedOut: res_.status = RunStatus::Timeout; break;
            default:
                res_.status = RunStatus::Err;
                res_.err = last_err_;
                break;
        }
        return std::move(res_);
    }

  private:
    Flow err_flow(SrcErrKind k) {
        last_err_ = k;
        return {FlowKind::Erred, {}};
    }

    bool tick() {
        if (res_.clock_left == 0) return false;
        --res_.clock_left;
        return true;
    }

    int new_cell(const std::string& name) {
        res_.cells.push_back({name, SrcValue{}});
        return static_cast<int>(res_.cells.size()) - 1;
    }

    void pop_frame() {
        for (auto& [name, slot] : frames_.back())
            if (slot.cell >= 0) res_.cells[slot.cell].final = std::move(slot.value);
        frames_.pop_back();
    }

    Slot* lookup(const std::string& name) {
        for (std::size_t i = frames_.size(); i-- > cur_base_;) {
            Frame& f = frames_[i];
            for (std::size_t j = f.size(); j-- > 0;)
                if (f[j].first == name) return &f[j].second;
        }
        return nullptr;
    }

    const std::set<std::string>& boxed_ins(const IrMethod& m) {
        auto it = boxed_cache_.find(&m);
        if (it == boxed_cache_.end())
            it = boxed_cache_.emplace(&m, mutated_in_params(m)).first;
        return it->second;
    }

    // --- expressions ---

    std::optional<SrcValue> fail_expr(SrcErrKind k) {
        expr_err_ = k;
        return std::nullopt;
    }

    std::optional<SrcValue> eval_expr(const IrExpr& e) {
        using R = std::optional<SrcValue>;
        return std::visit(
            [&](const auto& n) -> R {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, IrExpr::LitInt>) {
                    return SrcValue{n.value};
                } else if constexpr (std::is_same_v<T, IrExpr::LitBool>) {
                    return SrcValue{n.value};
                } else if constexpr (std::is_same_v<T, IrExpr::LitChar>) {
                    return SrcValue{n.value};
                } else if constexpr (std::is_same_v<T, IrExpr::LitString>) {
                    return SrcValue{n.text};
                } else if constexpr (std::is_same_v<T, IrExpr::Var>) {
                    Slot* s = lookup(n.name);
                    if (!s) return fail_expr(SrcErrKind::UnboundName);
                    return s->value;
                } else if constexpr (std::is_same_v<T, IrExpr::Not>) {
                    R v = eval_expr(*n.operand);
                    if (!v) return v;
                    if (auto* b = std::get_if<bool>(&*v)) return SrcValue{!*b};
                    return fail_expr(SrcErrKind::TypeConfusion);
                } else {
                    return eval_binary(n);
                }
            },
            e.node);
    }

    std::optional<SrcValue> eval_binary(const IrExpr::Binary& n) {
        using R = std::optional<SrcValue>;
        if (n.op == BinOp::And || n.op == BinOp::Or) {
            R l = eval_expr(*n.lhs);
            if (!l) return l;
            auto* lb = std::get_if<bool>(&*l);
            if (!lb) return fail_expr(SrcErrKind::TypeConfusion);
            if (n.op == BinOp::And && !*lb) return SrcValue{false};
            if (n.op == BinOp::Or && *lb) return SrcValue{true};
            R r = eval_expr(*n.rhs);
            if (!r) return r;
            if (auto* rb = std::get_if<bool>(&*r)) return SrcValue{*rb};
            return fail_expr(SrcErrKind::TypeConfusion);
        }

        R l = eval_expr(*n.lhs);
        if (!l) return l;
        R r = eval_expr(*n.rhs);
        if (!r) return r;

        switch (n.op) {
            case BinOp::Add:
            case BinOp::Sub:
            case BinOp::Mul:
            case BinOp::Div:
            case BinOp::Mod: {
                auto* a = std::get_if<BigInt>(&*l);
                auto* b = std::get_if<BigInt>(&*r);
                if (!a || !b) return fail_expr(SrcErrKind::TypeConfusion);
                switch (n.op) {
                    case BinOp::Add: return SrcValue{*a + *b};
                    case BinOp::Sub: return SrcValue{*a - *b};
                    case BinOp::Mul: return SrcValue{*a * *b};
                    case BinOp::Div:
                        if (b->is_zero()) return fail_expr(SrcErrKind::DivByZero);
                        return SrcValue{euclid_div(*a, *b)};
                    default:
                        if (b->is_zero()) return fail_expr(SrcErrKind::DivByZero);
                        return SrcValue{euclid_mod(*a, *b)};
                }
            }
            case BinOp::Lt:
            case BinOp::Le:
            case BinOp::Gt:
            case BinOp::Ge: {
                bool lt, eq;
                if (auto* a = std::get_if<BigInt>(&*l)) {
                    auto* b = std::get_if<BigInt>(&*r);
                    if (!b) return fail_expr(SrcErrKind::TypeConfusion);
                    lt = *a < *b;
                    eq = *a == *b;
                } else if (auto* c = std::get_if<char>(&*l)) {
                    auto* d = std::get_if<char>(&*r);
                    if (!d) return fail_expr(SrcErrKind::TypeConfusion);
                    lt = *c < *d;
                    eq = *c == *d;
                } else {
                    return fail_expr(SrcErrKind::TypeConfusion);
                }
                switch (n.op) {
                    case BinOp::Lt: return SrcValue{lt};
                    case BinOp::Le: return SrcValue{lt || eq};
                    case BinOp::Gt: return SrcValue{!lt && !eq};
                    default: return SrcValue{!lt};
                }
            }
            case BinOp::Eq:
            case BinOp::Neq: {
                if (l->index() != r->index())
                    return fail_expr(SrcErrKind::TypeConfusion);
                bool eq = *l == *r;
                return SrcValue{n.op == BinOp::Eq ? eq : !eq};
            }
            case BinOp::Concat: {
                auto* a = std::get_if<std::string>(&*l);
                auto* b = std::get_if<std::string>(&*r);
                if (!a || !b) return fail_expr(SrcErrKind::TypeConfusion);
                return SrcValue{*a + *b};
            }
            default: return fail_expr(SrcErrKind::TypeConfusion);
        }
    }

    // --- statements ---

    Flow eval_block(const IrBlock& b) {
        frames_.emplace_back();
        Flow f;
        for (const auto& s : b) {
            f = eval_stmt(*s, kNoLabels);
            if (f.kind != FlowKind::Normal) break;
        }
        pop_frame();
        return f;
    }

    Flow eval_stmt(const IrStmt& s, const std::vector<std::string>& labels) {
        return std::visit([&](const auto& n) { return eval_node(n, labels); }, s.node);
    }

    Flow expr_failure() { return err_flow(expr_err_); }

    Flow eval_node(const IrStmt::DeclVar& n, const std::vector<std::string>&) {
        auto v = eval_expr(*n.init);
        if (!v) return expr_failure();
        Slot slot{std::move(*v), new_cell(n.name)};
        frames_.back().emplace_back(n.name, std::move(slot));
        return {};
    }

    Flow eval_node(const IrStmt::Assign& n, const std::vector<std::string>&) {
        auto v = eval_expr(*n.rhs);
        if (!v) return expr_failure();
        Slot* s = lookup(n.name);
        if (!s) return err_flow(SrcErrKind::UnboundName);
        s->value = std::move(*v);
        return {};
    }

    Flow eval_node(const IrStmt::If& n, const std::vector<std::string>&) {
        auto v = eval_expr(*n.cond);
        if (!v) return expr_failure();
        auto* b = std::get_if<bool>(&*v);
        if (!b) return err_flow(SrcErrKind::TypeConfusion);
        return eval_block(*b ? n.then_branch : n.else_branch);
    }

    Flow eval_node(const IrStmt::While& n, const std::vector<std::string>& labels) {
        for (;;) {
            if (!tick()) return {FlowKind::TimedOut, {}};
            auto v = eval_expr(*n.cond);
            if (!v) return expr_failure();
            auto* b = std::get_if<bool>(&*v);
            if (!b) return err_flow(SrcErrKind::TypeConfusion);
            if (!*b) return {};
            Flow f = eval_block(n.body);
            switch (f.kind) {
                case FlowKind::Normal:
                case FlowKind::Continued: break;
                case FlowKind::Broke: return {};
                case FlowKind::ContinuedLabel:
                    if (std::find(labels.begin(), labels.end(), f.label) ==
                        labels.end())
                        return f;
                    break;
                case FlowKind::BrokeLabel:
                    if (std::find(labels.begin(), labels.end(), f.label) ==
                        labels.end())
                        return f;
                    return {};
                default: return f;
            }
        }
    }

    Flow eval_node(const IrStmt::Labeled& n, const std::vector<std::string>& labels) {
        std::vector<std::string> inner(labels);
        inner.push_back(n.label);
        Flow f;
        if (std::holds_alternative<IrStmt::While>(n.body->node) ||
            std::holds_alternative<IrStmt::Labeled>(n.body->node))
            f = eval_stmt(*n.body, inner);
        else
            f = eval_stmt(*n.body, kNoLabels);
        if (f.kind == FlowKind::BrokeLabel &&
            std::find(inner.begin(), inner.end(), f.label) != inner.end())
            return {};
        return f;
    }

    Flow eval_node(const IrStmt::Call& n, const std::vector<std::string>&) {
        if (!tick()) return {FlowKind::TimedOut, {}};
        const IrMethod* callee = prog_.find_method(n.callee);
        if (!callee) return err_flow(SrcErrKind::UnboundName);
        if (n.args.size() != callee->ins.size() ||
            n.outs.size() != callee->outs.size())
            return err_flow(SrcErrKind::TypeConfusion);
        std::vector<SrcValue> args;
        args.reserve(n.args.size());
        for (const auto& a : n.args) {
            auto v = eval_expr(*a);
            if (!v) return expr_failure();
            args.push_back(std::move(*v));
        }
        std::vector<Slot*> targets;
        targets.reserve(n.outs.size());
        for (const auto& name : n.outs) {
            Slot* s = lookup(name);
            if (!s) return err_flow(SrcErrKind::UnboundName);
            targets.push_back(s);
        }
        return eval_method(*callee, std::move(args), std::move(targets));
    }

    Flow eval_node(const IrStmt::Print& n, const std::vector<std::string>&) {
        auto v = eval_expr(*n.arg);
        if (!v) return expr_failure();
        res_.output += stringify(*v);
        return {};
    }

    Flow eval_node(const IrStmt::Return&, const std::vector<std::string>&) {
        return {FlowKind::Returned, {}};
    }
    Flow eval_node(const IrStmt::Break&, const std::vector<std::string>&) {
        return {FlowKind::Broke, {}};
    }
    Flow eval_node(const IrStmt::BreakLabel& n, const std::vector<std::string>&) {
        return {FlowKind::BrokeLabel, n.label};
    }
    Flow eval_node(const IrStmt::Continue&, const std::vector<std::string>&) {
        return {FlowKind::Continued, {}};
    }
    Flow eval_node(const IrStmt::ContinueLabel& n, const std::vector<std::string>&) {
        return {FlowKind::ContinuedLabel, n.label};
    }

    Flow eval_method(const IrMethod& m, std::vector<SrcValue> args,
                     std::vector<Slot*> out_targets) {
        std::size_t base = frames_.size();
        std::size_t saved_base = cur_base_;
        cur_base_ = base;
        frames_.emplace_back();

        const auto& boxed = boxed_ins(m);
        for (std::size_t i = 0; i < m.ins.size(); ++i) {
            Slot slot{std::move(args[i]), -1};
            if (boxed.count(m.ins[i].name)) slot.cell = new_cell(m.ins[i].name);
            frames_[base].emplace_back(m.ins[i].name, std::move(slot));
        }
        std::size_t outs_at = frames_[base].size();
        for (const auto& o : m.outs)
            frames_[base].emplace_back(o.name, Slot{default_value(o.type), -1});

        Flow f = eval_block(m.body);

        if (f.kind == FlowKind::Normal || f.kind == FlowKind::Returned) {
            for (std::size_t j = 0; j < out_targets.size(); ++j)
                out_targets[j]->value = frames_[base][outs_at + j].second.value;
            f = {};
        } else if (f.kind == FlowKind::Broke || f.kind == FlowKind::Continued ||
                   f.kind == FlowKind::BrokeLabel ||
                   f.kind == FlowKind::ContinuedLabel) {
            f = err_flow(SrcErrKind::ControlEscape);
        }

        while (frames_.size() > base) pop_frame();
        cur_base_ = saved_base;
        return f;
    }

    const IrProgram& prog_;
    SrcResult res_;
    std::vector<Frame> frames_;
    std::size_t cur_base_ = 0;
    SrcErrKind last_err_ = SrcErrKind::DivByZero;
    SrcErrKind expr_err_ = SrcErrKind::DivByZero;
    std::unordered_map<const IrMethod*, std::set<std::string>> boxed_cache_;
};

}  // namespace

SrcResult run_program(const IrProgram& p, long long clock) {
    return SrcEval(p, clock).run();
}

}  // namespace d2c
