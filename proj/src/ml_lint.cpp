#include <algorithm>
#include <set>
#include <unordered_map>

#include "d2c/ml_ast.hpp"

namespace d2c {

namespace {

struct LintState {
    std::unordered_map<std::string, bool> exceptions;  // qualified -> has_payload
    std::set<std::string> qualified;                   // declared "Struct.fun"
    std::vector<std::string> problems;
};

void check_exp(const MlExp& e, std::vector<std::string> scope, LintState& st);

void check_funs(const std::vector<MlFunBind>& funs, std::vector<std::string> scope,
                LintState& st) {
    for (const auto& b : funs) scope.push_back(b.name);
    for (const auto& b : funs) {
        auto inner = scope;
        inner.push_back(b.param);
        check_exp(*b.body, std::move(inner), st);
    }
}

void check_exp(const MlExp& e, std::vector<std::string> scope, LintState& st) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, MlExp::Var>) {
                if (n.name.find('.') != std::string::npos) {
                    if (!st.qualified.count(n.name))
                        st.problems.push_back("unknown qualified name " + n.name);
                } else if (std::find(scope.begin(), scope.end(), n.name) ==
                           scope.end()) {
                    st.problems.push_back("unbound variable " + n.name);
                }
            } else if constexpr (std::is_same_v<T, MlExp::App>) {
                check_exp(*n.fn, scope, st);
                check_exp(*n.arg, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::Fn>) {
                scope.push_back(n.param);
                check_exp(*n.body, std::move(scope), st);
            } else if constexpr (std::is_same_v<T, MlExp::If>) {
                check_exp(*n.cond, scope, st);
                check_exp(*n.then_e, scope, st);
                check_exp(*n.else_e, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::Let>) {
                check_exp(*n.bound, scope, st);
                scope.push_back(n.name);
                check_exp(*n.body, std::move(scope), st);
            } else if constexpr (std::is_same_v<T, MlExp::LetRecFuns>) {
                check_funs(n.funs, scope, st);
                for (const auto& b : n.funs) scope.push_back(b.name);
                check_exp(*n.body, std::move(scope), st);
            } else if constexpr (std::is_same_v<T, MlExp::Seq>) {
                check_exp(*n.first, scope, st);
                check_exp(*n.second, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::Ref>) {
                check_exp(*n.init, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::Deref>) {
                check_exp(*n.target, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::AssignRef>) {
                check_exp(*n.target, scope, st);
                check_exp(*n.value, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::Raise>) {
                check_exp(*n.exn, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::Handle>) {
                check_exp(*n.body, scope, st);
                scope.push_back(n.exn_var);
                check_exp(*n.handler, std::move(scope), st);
            } else if constexpr (std::is_same_v<T, MlExp::Con>) {
                auto it = st.exceptions.find(n.constructor);
                if (it == st.exceptions.end()) {
                    st.problems.push_back("undeclared exception constructor " +
                                          n.constructor);
                } else if (it->second != (n.args.size() == 1) ||
                           n.args.size() > 1) {
                    st.problems.push_back("constructor arity mismatch for " +
                                          n.constructor);
                }
                for (const auto& a : n.args) check_exp(*a, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::BinPrim>) {
                check_exp(*n.lhs, scope, st);
                check_exp(*n.rhs, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::Implode>) {
                check_exp(*n.arg, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::IntToChars>) {
                check_exp(*n.arg, scope, st);
            } else if constexpr (std::is_same_v<T, MlExp::PrintPrim>) {
                check_exp(*n.arg, scope, st);
            }
            // Lit, CharList: nothing to check
        },
        e.node);
}

}  // namespace

std::vector<std::string> lint(const MlProgramT& p) {
    LintState st;
    for (const auto& d : p.decs) {
        if (auto* s = std::get_if<MlDec::StructureDec>(&d.node)) {
            for (const auto& inner : s->decs) {
                if (auto* e = std::get_if<MlDec::ExceptionDec>(&inner.node))
                    st.exceptions[s->name + "." + e->name] = e->has_payload;
                else if (auto* g = std::get_if<MlDec::FunGroup>(&inner.node))
                    for (const auto& b : g->funs)
                        st.qualified.insert(s->name + "." + b.name);
            }
        } else if (auto* e = std::get_if<MlDec::ExceptionDec>(&d.node)) {
            st.exceptions[e->name] = e->has_payload;
        }
    }

    for (const auto& d : p.decs) {
        if (auto* s = std::get_if<MlDec::StructureDec>(&d.node)) {
            for (const auto& inner : s->decs)
                if (auto* g = std::get_if<MlDec::FunGroup>(&inner.node))
                    check_funs(g->funs, {}, st);
        } else if (auto* g = std::get_if<MlDec::FunGroup>(&d.node)) {
            check_funs(g->funs, {}, st);
        }
    }
    return std::move(st.problems);
}

}  // namespace d2c
