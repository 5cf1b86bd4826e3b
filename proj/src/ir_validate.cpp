#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "d2c/ir.hpp"

namespace d2c {

std::string ValidityReport::to_string() const {
    if (violations.empty()) return "valid";
    std::string out;
    for (const auto& v : violations) {
        out += v.where;
        out += ": ";
        out += v.message;
        out += '\n';
    }
    return out;
}

std::optional<IrType> infer_type(
    const IrExpr& e,
    const std::function<std::optional<IrType>(const std::string&)>& lookup) {
    using R = std::optional<IrType>;
    return std::visit(
        [&](const auto& n) -> R {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IrExpr::LitInt>) {
                return IrType::Int;
            } else if constexpr (std::is_same_v<T, IrExpr::LitBool>) {
                return IrType::Bool;
            } else if constexpr (std::is_same_v<T, IrExpr::LitChar>) {
                return IrType::Char;
            } else if constexpr (std::is_same_v<T, IrExpr::LitString>) {
                return IrType::String;
            } else if constexpr (std::is_same_v<T, IrExpr::Var>) {
                return lookup(n.name);
            } else if constexpr (std::is_same_v<T, IrExpr::Not>) {
                auto t = infer_type(*n.operand, lookup);
                if (t == IrType::Bool) return IrType::Bool;
                return std::nullopt;
            } else {
                auto l = infer_type(*n.lhs, lookup);
                auto r = infer_type(*n.rhs, lookup);
                if (!l || !r) return std::nullopt;
                switch (n.op) {
                    case BinOp::Add:
                    case BinOp::Sub:
                    case BinOp::Mul:
                    case BinOp::Div:
                    case BinOp::Mod:
                        if (l == IrType::Int && r == IrType::Int) return IrType::Int;
                        return std::nullopt;
                    case BinOp::Lt:
                    case BinOp::Le:
                    case BinOp::Gt:
                    case BinOp::Ge:
                        if (l == r && (l == IrType::Int || l == IrType::Char))
                            return IrType::Bool;
                        return std::nullopt;
                    case BinOp::Eq:
                    case BinOp::Neq:
                        if (l == r) return IrType::Bool;
                        return std::nullopt;
                    case BinOp::And:
                    case BinOp::Or:
                        if (l == IrType::Bool && r == IrType::Bool)
                            return IrType::Bool;
                        return std::nullopt;
                    case BinOp::Concat:
                        if (l == IrType::String && r == IrType::String)
                            return IrType::String;
                        return std::nullopt;
                }
                return std::nullopt;
            }
        },
        e.node);
}

namespace {

// Names the compiler reserves in the target: loop functions and mangled
// locals. Source programs must not use them.
bool reserved_name(const std::string& s) {
    if (s.rfind("CML_", 0) == 0) return true;
    if (s.size() >= 3 && s[0] == '_' && std::isdigit(static_cast<unsigned char>(s[1]))) {
        std::size_t i = 1;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i < s.size() && s[i] == '_') return true;
    }
    return false;
}

// Structure names the emitted program already uses.
const std::unordered_set<std::string>& reserved_modules() {
    static const std::unordered_set<std::string> r = {"Dafny", "String", "List",
                                                      "Char", "Int", "Bool", "Option"};
    return r;
}

class Scopes {
  public:
    void push() { frames_.emplace_back(); }
    void pop() { frames_.pop_back(); }
    void declare(const std::string& name, IrType t) {
        frames_.back().insert_or_assign(name, t);
    }
    std::optional<IrType> lookup(const std::string& name) const {
        for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end()) return found->second;
        }
        return std::nullopt;
    }

  private:
    std::vector<std::unordered_map<std::string, IrType>> frames_;
};

struct LabelInfo {
    bool on_loop = false;
};

class Checker {
  public:
    Checker(const IrProgram& p, ValidityReport& report) : prog_(p), report_(report) {}

    void check_method(const IrModule& mod, const IrMethod& m) {
        where_ = mod.name + "." + m.name;
        scopes_ = Scopes{};
        scopes_.push();
        std::unordered_set<std::string> seen;
        auto check_param = [&](const IrParam& p, const char* kind) {
            if (reserved_name(p.name))
                add(where_, std::string(kind) + " '" + p.name + "' uses a reserved name");
            if (!seen.insert(p.name).second)
                add(where_, std::string("duplicate parameter '") + p.name + "'");
            scopes_.declare(p.name, p.type);
        };
        for (const auto& p : m.ins) check_param(p, "in-parameter");
        for (const auto& p : m.outs) check_param(p, "out-parameter");
        loop_depth_ = 0;
        labels_.clear();
        check_block(m.body, where_ + ".body");
        scopes_.pop();
    }

  private:
    void add(std::string where, std::string message) {
        report_.violations.push_back({std::move(where), std::move(message)});
    }

    // Typechecks e, reporting at most one violation per subtree.
    std::optional<IrType> check_expr(const IrExpr& e, const std::string& at) {
        bool reported = false;
        auto lookup = [&](const std::string& name) -> std::optional<IrType> {
            auto t = scopes_.lookup(name);
            if (!t && !reported) {
                add(at, "variable '" + name + "' is not in scope");
                reported = true;
            }
            return t;
        };
        auto t = infer_type(e, lookup);
        if (!t && !reported) add(at, "expression is ill-typed");
        return t;
    }

    void check_expr_is(const IrExpr& e, IrType want, const std::string& at) {
        auto t = check_expr(e, at);
        if (t && *t != want)
            add(at, std::string("expected ") + type_name(want) + ", found " +
                        type_name(*t));
    }

    void check_block(const IrBlock& block, const std::string& at) {
        scopes_.push();
        for (std::size_t i = 0; i < block.size(); ++i)
            check_stmt(*block[i], at + "[" + std::to_string(i) + "]");
        scopes_.pop();
    }

    void check_stmt(const IrStmt& s, const std::string& at) {
        std::visit([&](const auto& n) { check_node(n, at); }, s.node);
    }

    void check_node(const IrStmt::DeclVar& n, const std::string& at) {
        if (reserved_name(n.name))
            add(at, "variable '" + n.name + "' uses a reserved name");
        check_expr_is(*n.init, n.type, at + ".init");
        scopes_.declare(n.name, n.type);
    }

    void check_node(const IrStmt::Assign& n, const std::string& at) {
        auto t = scopes_.lookup(n.name);
        if (!t) {
            add(at, "assignment to undeclared variable '" + n.name + "'");
            check_expr(*n.rhs, at + ".rhs");
            return;
        }
        check_expr_is(*n.rhs, *t, at + ".rhs");
    }

    void check_node(const IrStmt::If& n, const std::string& at) {
        check_expr_is(*n.cond, IrType::Bool, at + ".cond");
        check_block(n.then_branch, at + ".then");
        check_block(n.else_branch, at + ".else");
    }

    void check_node(const IrStmt::While& n, const std::string& at) {
        check_expr_is(*n.cond, IrType::Bool, at + ".cond");
        ++loop_depth_;
        check_block(n.body, at + ".body");
        --loop_depth_;
    }

    void check_node(const IrStmt::Labeled& n, const std::string& at) {
        if (labels_.count(n.label)) {
            add(at, "label \"" + n.label + "\" shadows an enclosing label");
            check_stmt(*n.body, at + ".body");
            return;
        }
        // A label chain ending at a while labels that loop.
        const IrStmt* target = n.body.get();
        while (auto* inner = std::get_if<IrStmt::Labeled>(&target->node))
            target = inner->body.get();
        bool on_loop = std::holds_alternative<IrStmt::While>(target->node);
        labels_.emplace(n.label, LabelInfo{on_loop});
        check_stmt(*n.body, at + ".body");
        labels_.erase(n.label);
    }

    void check_node(const IrStmt::Call& n, const std::string& at) {
        const IrMethod* callee = prog_.find_method(n.callee);
        if (!callee) {
            add(at, "call to unknown method '" + n.callee + "'");
            for (std::size_t i = 0; i < n.args.size(); ++i)
                check_expr(*n.args[i], at + ".args[" + std::to_string(i) + "]");
            return;
        }
        if (n.args.size() != callee->ins.size())
            add(at, "'" + n.callee + "' takes " + std::to_string(callee->ins.size()) +
                        " argument(s), got " + std::to_string(n.args.size()));
        for (std::size_t i = 0; i < n.args.size() && i < callee->ins.size(); ++i)
            check_expr_is(*n.args[i], callee->ins[i].type,
                          at + ".args[" + std::to_string(i) + "]");
        if (n.outs.size() != callee->outs.size())
            add(at, "'" + n.callee + "' returns " + std::to_string(callee->outs.size()) +
                        " value(s), got " + std::to_string(n.outs.size()) +
                        " target(s)");
        std::unordered_set<std::string> distinct;
        for (std::size_t i = 0; i < n.outs.size(); ++i) {
            const std::string& name = n.outs[i];
            if (!distinct.insert(name).second)
                add(at, "duplicate out target '" + name + "'");
            auto t = scopes_.lookup(name);
            if (!t) {
                add(at, "out target '" + name + "' is not in scope");
                continue;
            }
            if (i < callee->outs.size() && *t != callee->outs[i].type)
                add(at, "out target '" + name + "' has type " + type_name(*t) +
                            ", callee returns " + type_name(callee->outs[i].type));
        }
    }

    void check_node(const IrStmt::Print& n, const std::string& at) {
        check_expr(*n.arg, at + ".arg");
    }

    void check_node(const IrStmt::Return&, const std::string&) {}

    void check_node(const IrStmt::Break&, const std::string& at) {
        if (loop_depth_ == 0) add(at, "break outside of a loop");
    }

    void check_node(const IrStmt::BreakLabel& n, const std::string& at) {
        if (!labels_.count(n.label))
            add(at, "break to unknown label \"" + n.label + "\"");
    }

    void check_node(const IrStmt::Continue&, const std::string& at) {
        if (loop_depth_ == 0) add(at, "continue outside of a loop");
    }

    void check_node(const IrStmt::ContinueLabel& n, const std::string& at) {
        auto it = labels_.find(n.label);
        if (it == labels_.end())
            add(at, "continue to unknown label \"" + n.label + "\"");
        else if (!it->second.on_loop)
            add(at, "continue label \"" + n.label + "\" is not on a loop");
    }

    const IrProgram& prog_;
    ValidityReport& report_;
    std::string where_;
    Scopes scopes_;
    int loop_depth_ = 0;
    std::unordered_map<std::string, LabelInfo> labels_;
};

}  // namespace

ValidityReport validate(const IrProgram& p) {
    ValidityReport report;
    auto add = [&](std::string where, std::string message) {
        report.violations.push_back({std::move(where), std::move(message)});
    };

    std::unordered_set<std::string> module_names;
    for (const auto& mod : p.modules) {
        if (!module_names.insert(mod.name).second)
            add(mod.name, "duplicate module name");
        if (reserved_modules().count(mod.name) || reserved_name(mod.name))
            add(mod.name, "module name is reserved");
        std::unordered_set<std::string> method_names;
        for (const auto& m : mod.methods) {
            if (!method_names.insert(m.name).second)
                add(mod.name + "." + m.name, "duplicate method name");
            if (reserved_name(m.name))
                add(mod.name + "." + m.name, "method name is reserved");
        }
    }

    const IrMethod* main = p.find_method("_module.Main");
    if (!main)
        add("program", "no _module.Main method");
    else if (!main->ins.empty() || !main->outs.empty())
        add("_module.Main", "Main must take and return nothing");

    Checker checker(p, report);
    for (const auto& mod : p.modules)
        for (const auto& m : mod.methods) checker.check_method(mod, m);
    return report;
}

std::set<std::string> mutated_in_params(const IrMethod& m) {
    std::set<std::string> in_names;
    for (const auto& p : m.ins) in_names.insert(p.name);

    std::set<std::string> mutated;
    // Frames of locally declared names; a declaration shadows the in-param
    // for the remainder of its block.
    std::vector<std::set<std::string>> shadows;

    auto shadowed = [&](const std::string& name) {
        for (const auto& frame : shadows)
            if (frame.count(name)) return true;
        return false;
    };
    auto touch = [&](const std::string& name) {
        if (in_names.count(name) && !shadowed(name)) mutated.insert(name);
    };

    std::function<void(const IrBlock&)> walk_block;
    std::function<void(const IrStmt&)> walk_stmt = [&](const IrStmt& s) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, IrStmt::DeclVar>) {
                    shadows.back().insert(n.name);
                } else if constexpr (std::is_same_v<T, IrStmt::Assign>) {
                    touch(n.name);
                } else if constexpr (std::is_same_v<T, IrStmt::If>) {
                    walk_block(n.then_branch);
                    walk_block(n.else_branch);
                } else if constexpr (std::is_same_v<T, IrStmt::While>) {
                    walk_block(n.body);
                } else if constexpr (std::is_same_v<T, IrStmt::Labeled>) {
                    walk_stmt(*n.body);
                } else if constexpr (std::is_same_v<T, IrStmt::Call>) {
                    for (const auto& out : n.outs) touch(out);
                }
            },
            s.node);
    };
    walk_block = [&](const IrBlock& block) {
        shadows.emplace_back();
        for (const auto& s : block) walk_stmt(*s);
        shadows.pop_back();
    };
    walk_block(m.body);
    return mutated;
}

}  // namespace d2c
