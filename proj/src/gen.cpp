#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "d2c/gen.hpp"

namespace d2c {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct Sig {
    std::string module;
    std::string name;
    std::vector<IrParam> ins;
    std::vector<IrParam> outs;
};

struct Gen {
    const GenConfig& cfg;
    std::mt19937_64 rng;
    std::vector<Sig> sigs;  // call DAG: method i may call j > i

    // per-method state
    std::size_t cur = 0;
    std::vector<std::map<std::string, IrType>> scopes;
    std::set<std::string> counters;  // loop counters, never assigned
    struct LabelInfo {
        std::string name;
        bool on_loop;
    };
    std::vector<LabelInfo> label_stack;
    int loop_depth = 0;
    int label_counter = 0;
    int var_counter = 0;
    int call_sites = 0;

    explicit Gen(const GenConfig& c) : cfg(c), rng(splitmix64(c.seed)) {}

    std::uint64_t pick(std::uint64_t n) { return rng() % n; }
    bool chance(int percent) { return pick(100) < std::uint64_t(percent); }

    IrType pick_type() {
        if (cfg.features.strings) {
            switch (pick(5)) {
                case 0: return IrType::Bool;
                case 1: return IrType::Char;
                case 2: return IrType::String;
                default: return IrType::Int;
            }
        }
        return pick(3) == 0 ? IrType::Bool : IrType::Int;
    }

    std::string fresh_var() { return "v" + std::to_string(var_counter++); }
    std::string fresh_label() { return "L" + std::to_string(label_counter++); }

    std::map<std::string, IrType> visible_vars() {
        std::map<std::string, IrType> latest;
        for (const auto& frame : scopes)
            for (const auto& [name, type] : frame) latest[name] = type;
        return latest;
    }

    std::vector<std::string> vars_of(IrType t) {
        std::vector<std::string> out;
        for (const auto& [name, type] : visible_vars())
            if (type == t) out.push_back(name);
        return out;
    }

    std::vector<std::pair<std::string, IrType>> assignable_vars() {
        std::vector<std::pair<std::string, IrType>> out;
        for (const auto& [name, type] : visible_vars())
            if (!counters.count(name)) out.emplace_back(name, type);
        return out;
    }

    IrExprPtr literal(IrType t) {
        switch (t) {
            case IrType::Int: return lit_int(BigInt(long(pick(41)) - 20));
            case IrType::Bool: return lit_bool(pick(2) == 1);
            case IrType::Char: return lit_char(char('a' + pick(26)));
            case IrType::String: {
                static const char* words[] = {"",   "x",   "ab",  "cake",
                                              "ml", "dfy", "-",   "zz9",
                                              " ",  "one two"};
                return lit_string(words[pick(10)]);
            }
        }
        return lit_int(0);
    }

    IrExprPtr leaf(IrType t) {
        auto vs = vars_of(t);
        if (!vs.empty() && chance(60)) return var_ref(vs[pick(vs.size())]);
        return literal(t);
    }

    IrExprPtr nonzero_literal() {
        long v = long(pick(18)) - 9;
        if (v >= 0) ++v;
        return lit_int(BigInt(v));
    }

    IrExprPtr expr(IrType t, int depth) {
        if (depth <= 0) return leaf(t);
        switch (t) {
            case IrType::Int: {
                switch (pick(6)) {
                    case 0: return leaf(t);
                    case 1:
                        return binary(BinOp::Add, expr(t, depth - 1),
                                      expr(t, depth - 1));
                    case 2:
                        return binary(BinOp::Sub, expr(t, depth - 1),
                                      expr(t, depth - 1));
                    case 3:
                        // literal factor keeps repeated self-assignment from
                        // doubling bignum widths every loop iteration
                        return binary(BinOp::Mul, expr(t, depth - 1),
                                      literal(t));
                    case 4:
                        return binary(BinOp::Div, expr(t, depth - 1),
                                      nonzero_literal());
                    default:
                        return binary(BinOp::Mod, expr(t, depth - 1),
                                      nonzero_literal());
                }
            }
            case IrType::Bool: {
                switch (pick(8)) {
                    case 0: return leaf(t);
                    case 1: return not_of(expr(t, depth - 1));
                    case 2:
                        return binary(BinOp::And, expr(t, depth - 1),
                                      expr(t, depth - 1));
                    case 3:
                        return binary(BinOp::Or, expr(t, depth - 1),
                                      expr(t, depth - 1));
                    case 4:
                    case 5: {
                        IrType ot = cfg.features.strings && chance(25)
                                        ? IrType::Char
                                        : IrType::Int;
                        BinOp cmp[] = {BinOp::Lt, BinOp::Le, BinOp::Gt,
                                       BinOp::Ge};
                        return binary(cmp[pick(4)], expr(ot, depth - 1),
                                      expr(ot, depth - 1));
                    }
                    default: {
                        IrType ot = pick_type();
                        return binary(pick(2) ? BinOp::Eq : BinOp::Neq,
                                      expr(ot, depth - 1), expr(ot, depth - 1));
                    }
                }
            }
            case IrType::Char: return leaf(t);
            case IrType::String: {
                // right operand stays literal so repeated self-assignment in a
                // loop grows strings linearly, not exponentially
                if (chance(50))
                    return binary(BinOp::Concat, expr(t, depth - 1),
                                  literal(t));
                return leaf(t);
            }
        }
        return leaf(t);
    }

    void declare(IrBlock& block, const std::string& name, IrType t) {
        block.push_back(decl_stmt(name, t, expr(t, cfg.max_expr_depth - 1)));
        scopes.back()[name] = t;
    }

    void emit_print(IrBlock& block) {
        IrType t = pick_type();
        block.push_back(print_stmt(expr(t, 2)));
        if (chance(70))
            block.push_back(print_stmt(lit_string(chance(50) ? "\n" : " ")));
    }

    void emit_assign(IrBlock& block) {
        auto vs = assignable_vars();
        if (vs.empty()) return;
        auto [name, type] = vs[pick(vs.size())];
        block.push_back(assign_stmt(name, expr(type, cfg.max_expr_depth)));
    }

    // if (<counter> = trigger) (ctrl) () — fires on a definite iteration
    void emit_counter_control(IrBlock& block, const std::string& counter,
                              long bound) {
        long trigger = 1 + long(pick(std::uint64_t(bound)));
        IrStmtPtr ctrl;
        bool force_return = chance(25);
        if (force_return) {
            ctrl = return_stmt();
        } else if (!label_stack.empty() && chance(40)) {
            const auto& li = label_stack[pick(label_stack.size())];
            if (li.on_loop && chance(50))
                ctrl = continue_label_stmt(li.name);
            else
                ctrl = break_label_stmt(li.name);
        } else {
            ctrl = chance(50) ? break_stmt() : continue_stmt();
        }
        block.push_back(if_stmt(
            binary(BinOp::Eq, var_ref(counter), lit_int(BigInt(trigger))),
            {std::move(ctrl)}, {}));
    }

    void emit_while(IrBlock& block, int depth) {
        std::string k = fresh_var();
        long bound = 2 + long(pick(8));
        declare(block, k, IrType::Int);
        block.push_back(assign_stmt(k, lit_int(0)));
        counters.insert(k);

        bool use_le = chance(50);
        IrExprPtr cond =
            binary(use_le ? BinOp::Le : BinOp::Lt, var_ref(k),
                   lit_int(BigInt(use_le ? bound - 1 : bound)));

        bool labeled = cfg.features.labels && chance(40);
        std::string label;
        if (labeled) {
            label = fresh_label();
            label_stack.push_back({label, true});
        }

        ++loop_depth;
        scopes.emplace_back();
        IrBlock body;
        body.push_back(assign_stmt(k, binary(BinOp::Add, var_ref(k), lit_int(1))));
        if (chance(55)) emit_counter_control(body, k, bound);
        int n = 1 + int(pick(3));
        for (int i = 0; i < n; ++i) statement(body, depth - 1);
        scopes.pop_back();
        --loop_depth;

        if (labeled) label_stack.pop_back();
        counters.erase(k);

        IrStmtPtr w = while_stmt(std::move(cond), std::move(body));
        if (labeled) w = labeled_stmt(label, std::move(w));
        block.push_back(std::move(w));
        // post-loop output makes an early escape from the loop observable
        if (chance(60)) emit_print(block);
    }

    void emit_labeled_if(IrBlock& block, int depth) {
        std::string label = fresh_label();
        label_stack.push_back({label, false});
        scopes.emplace_back();
        IrBlock then_branch;
        int n = 1 + int(pick(2));
        for (int i = 0; i < n; ++i) statement(then_branch, depth - 1);
        if (chance(70)) then_branch.push_back(break_label_stmt(label));
        scopes.pop_back();
        label_stack.pop_back();
        block.push_back(labeled_stmt(
            label, if_stmt(expr(IrType::Bool, 2), std::move(then_branch), {})));
    }

    void emit_call(IrBlock& block) {
        std::vector<std::size_t> targets;
        for (std::size_t j = cur + 1; j < sigs.size(); ++j) targets.push_back(j);
        if (targets.empty()) return;
        const Sig& callee = sigs[targets[pick(targets.size())]];
        ++call_sites;

        std::vector<IrExprPtr> args;
        for (const auto& p : callee.ins)
            args.push_back(expr(p.type, cfg.max_expr_depth - 1));
        std::vector<std::string> outs;
        for (const auto& p : callee.outs) {
            std::string o = fresh_var();
            declare(block, o, p.type);
            outs.push_back(o);
        }
        block.push_back(call_stmt(outs, callee.module + "." + callee.name,
                                  std::move(args)));
        for (const auto& o : outs)
            if (chance(75)) {
                block.push_back(print_stmt(var_ref(o)));
                block.push_back(print_stmt(lit_string(" ")));
            }
    }

    void statement(IrBlock& block, int depth) {
        switch (pick(12)) {
            case 0:
            case 1: {
                auto vs = assignable_vars();
                if (!vs.empty() && chance(15)) {
                    // shadowing re-declaration, exercises name mangling
                    declare(block, vs[pick(vs.size())].first, pick_type());
                } else {
                    declare(block, fresh_var(), pick_type());
                }
                break;
            }
            case 2:
            case 3: emit_assign(block); break;
            case 4:
            case 5:
            case 6: emit_print(block); break;
            case 7:
            case 8: {
                if (depth <= 0) {
                    emit_print(block);
                    break;
                }
                scopes.emplace_back();
                IrBlock then_branch;
                int n = 1 + int(pick(2));
                for (int i = 0; i < n; ++i) statement(then_branch, depth - 1);
                scopes.pop_back();
                IrBlock else_branch;
                if (chance(50)) {
                    scopes.emplace_back();
                    statement(else_branch, depth - 1);
                    scopes.pop_back();
                }
                block.push_back(if_stmt(expr(IrType::Bool, 2),
                                        std::move(then_branch),
                                        std::move(else_branch)));
                break;
            }
            case 9:
            case 10:
                if (cfg.features.loops && depth > 0 && loop_depth < 2) {
                    emit_while(block, depth);
                } else {
                    emit_print(block);
                }
                break;
            default:
                if (cfg.features.calls && loop_depth == 0 && call_sites < 2) {
                    emit_call(block);
                } else if (cfg.features.labels && depth > 0 && chance(30)) {
                    emit_labeled_if(block, depth);
                } else {
                    emit_assign(block);
                }
                break;
        }
    }

    IrMethod body_for(std::size_t index) {
        cur = index;
        const Sig& sig = sigs[index];
        scopes.clear();
        scopes.emplace_back();
        counters.clear();
        label_stack.clear();
        loop_depth = 0;
        label_counter = 0;
        var_counter = 0;
        call_sites = 0;
        for (const auto& p : sig.ins) scopes.back()[p.name] = p.type;
        for (const auto& p : sig.outs) scopes.back()[p.name] = p.type;

        IrBlock body;
        int n = 3 + int(pick(4));
        for (int i = 0; i < n; ++i) statement(body, cfg.max_stmt_depth);

        // roughly 80% of outs get a definite final assignment; the rest
        // keep their entry defaults unless an earlier random assign hit them.
        // A shadowing decl may have changed the name's visible type by now.
        auto visible = visible_vars();
        for (const auto& p : sig.outs)
            if (chance(80))
                body.push_back(assign_stmt(
                    p.name, expr(visible.at(p.name), cfg.max_expr_depth)));

        if (sig.name == "Main") {
            body.push_back(print_stmt(expr(IrType::Int, 2)));
            body.push_back(print_stmt(lit_string("\n")));
        }
        return {sig.name, sig.ins, sig.outs, std::move(body)};
    }
};

}  // namespace

IrProgram generate(const GenConfig& cfg) {
    Gen g(cfg);

    g.sigs.push_back({"_module", "Main", {}, {}});
    if (cfg.features.calls) {
        bool second_module = g.chance(60);
        int extras = 1 + int(g.pick(std::uint64_t(std::max(1, cfg.max_methods))));
        for (int i = 0; i < extras; ++i) {
            Sig s;
            s.module = second_module && g.chance(50) ? "Aux" : "_module";
            s.name = "Proc" + std::to_string(i);
            int n_ins = int(g.pick(4));
            for (int a = 0; a < n_ins; ++a)
                s.ins.push_back({"p" + std::to_string(a), g.pick_type()});
            if (cfg.features.outs) {
                int n_outs = int(g.pick(3));
                for (int o = 0; o < n_outs; ++o)
                    s.outs.push_back({"o" + std::to_string(o), g.pick_type()});
            }
            g.sigs.push_back(std::move(s));
        }
    }

    IrProgram prog;
    prog.modules.push_back({"_module", {}});
    bool has_aux = false;
    for (const auto& s : g.sigs)
        if (s.module == "Aux") has_aux = true;
    if (has_aux) prog.modules.push_back({"Aux", {}});

    for (std::size_t i = 0; i < g.sigs.size(); ++i) {
        IrMethod m = g.body_for(i);
        for (auto& mod : prog.modules)
            if (mod.name == g.sigs[i].module) mod.methods.push_back(std::move(m));
    }
    return prog;
}

}  // namespace d2c
