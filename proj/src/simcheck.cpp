#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "d2c/simcheck.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace d2c {

namespace {

SExp encode_expr(const IrExpr& e);

SExp encode_expr_list(const std::vector<IrExprPtr>& es) {
    SExp::List out;
    for (const auto& e : es) out.push_back(encode_expr(*e));
    return SExp::list(std::move(out));
}

SExp encode_expr(const IrExpr& e) {
    return std::visit(
        [](const auto& n) -> SExp {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IrExpr::LitInt>) {
                return SExp::integer(n.value);
            } else if constexpr (std::is_same_v<T, IrExpr::LitBool>) {
                return SExp::list({SExp::atom("bool"),
                                   SExp::atom(n.value ? "true" : "false")});
            } else if constexpr (std::is_same_v<T, IrExpr::LitChar>) {
                return SExp::list(
                    {SExp::atom("char"), SExp::str(std::string(1, n.value))});
            } else if constexpr (std::is_same_v<T, IrExpr::LitString>) {
                return SExp::list({SExp::atom("str"), SExp::str(n.text)});
            } else if constexpr (std::is_same_v<T, IrExpr::Var>) {
                return SExp::list({SExp::atom("var"), SExp::atom(n.name)});
            } else if constexpr (std::is_same_v<T, IrExpr::Not>) {
                return SExp::list({SExp::atom("not"), encode_expr(*n.operand)});
            } else {
                return SExp::list({SExp::atom(binop_name(n.op)),
                                   encode_expr(*n.lhs), encode_expr(*n.rhs)});
            }
        },
        e.node);
}

SExp encode_block(const IrBlock& block);

SExp encode_stmt(const IrStmt& s) {
    return std::visit(
        [](const auto& n) -> SExp {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IrStmt::DeclVar>) {
                return SExp::list({SExp::atom("decl"), SExp::atom(n.name),
                                   SExp::atom(type_name(n.type)),
                                   encode_expr(*n.init)});
            } else if constexpr (std::is_same_v<T, IrStmt::Assign>) {
                return SExp::list({SExp::atom("assign"), SExp::atom(n.name),
                                   encode_expr(*n.rhs)});
            } else if constexpr (std::is_same_v<T, IrStmt::If>) {
                return SExp::list({SExp::atom("if"), encode_expr(*n.cond),
                                   encode_block(n.then_branch),
                                   encode_block(n.else_branch)});
            } else if constexpr (std::is_same_v<T, IrStmt::While>) {
                return SExp::list({SExp::atom("while"), encode_expr(*n.cond),
                                   encode_block(n.body)});
            } else if constexpr (std::is_same_v<T, IrStmt::Labeled>) {
                return SExp::list({SExp::atom("labeled"), SExp::str(n.label),
                                   encode_stmt(*n.body)});
            } else if constexpr (std::is_same_v<T, IrStmt::Call>) {
                SExp::List outs;
                for (const auto& o : n.outs) outs.push_back(SExp::atom(o));
                return SExp::list({SExp::atom("call"),
                                   SExp::list(std::move(outs)),
                                   SExp::atom(n.callee),
                                   encode_expr_list(n.args)});
            } else if constexpr (std::is_same_v<T, IrStmt::Print>) {
                return SExp::list({SExp::atom("print"), encode_expr(*n.arg)});
            } else if constexpr (std::is_same_v<T, IrStmt::Return>) {
                return SExp::list({SExp::atom("return")});
            } else if constexpr (std::is_same_v<T, IrStmt::Break>) {
                return SExp::list({SExp::atom("break")});
            } else if constexpr (std::is_same_v<T, IrStmt::BreakLabel>) {
                return SExp::list(
                    {SExp::atom("break-label"), SExp::str(n.label)});
            } else if constexpr (std::is_same_v<T, IrStmt::Continue>) {
                return SExp::list({SExp::atom("continue")});
            } else {
                static_assert(std::is_same_v<T, IrStmt::ContinueLabel>);
                return SExp::list(
                    {SExp::atom("continue-label"), SExp::str(n.label)});
            }
        },
        s.node);
}

SExp encode_block(const IrBlock& block) {
    SExp::List out;
    for (const auto& s : block) out.push_back(encode_stmt(*s));
    return SExp::list(std::move(out));
}

SExp encode_params(const std::vector<IrParam>& params) {
    SExp::List out;
    for (const auto& p : params)
        out.push_back(SExp::list(
            {SExp::atom(p.name), SExp::atom(type_name(p.type))}));
    return SExp::list(std::move(out));
}

}  // namespace

SExp to_schema(const IrProgram& p) {
    SExp::List prog{SExp::atom("program")};
    for (const auto& mod : p.modules) {
        SExp::List m{SExp::atom("module"), SExp::atom(mod.name)};
        for (const auto& method : mod.methods)
            m.push_back(SExp::list({SExp::atom("method"),
                                    SExp::atom(method.name),
                                    encode_params(method.ins),
                                    encode_params(method.outs),
                                    encode_block(method.body)}));
        prog.push_back(SExp::list(std::move(m)));
    }
    return SExp::list(std::move(prog));
}

bool value_rel(const SrcValue& s, const MlValue& t) {
    return std::visit(
        [&](const auto& sv) -> bool {
            using S = std::decay_t<decltype(sv)>;
            if constexpr (std::is_same_v<S, BigInt>) {
                auto* tv = std::get_if<BigInt>(&t.node);
                return tv && *tv == sv;
            } else if constexpr (std::is_same_v<S, bool>) {
                auto* tv = std::get_if<bool>(&t.node);
                return tv && *tv == sv;
            } else if constexpr (std::is_same_v<S, char>) {
                auto* tv = std::get_if<char>(&t.node);
                return tv && *tv == sv;
            } else {
                static_assert(std::is_same_v<S, std::string>);
                auto* tv = std::get_if<MlValue::VChars>(&t.node);
                return tv && tv->chars == sv;
            }
        },
        s);
}

bool state_rel(const SrcResult& s, const TgtState& t) {
    if (s.output != t.output) return false;
    if (s.cells.size() != t.store.size()) return false;
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
        if (s.cells[i].name != t.store[i].label) return false;
        if (!value_rel(s.cells[i].final, t.store[i].value)) return false;
    }
    return true;
}

bool res_rel(const SrcResult& s, const TgtResult& t) {
    switch (s.status) {
        case RunStatus::Done:
            return t.kind == TgtResult::Kind::Val && t.is_unit();
        case RunStatus::Timeout: return t.kind == TgtResult::Kind::Timeout;
        case RunStatus::Err: return false;
    }
    return false;
}

const char* diff_kind_name(DiffKind k) {
    switch (k) {
        case DiffKind::Related: return "Related";
        case DiffKind::OutputMismatch: return "OutputMismatch";
        case DiffKind::ResultMismatch: return "ResultMismatch";
        case DiffKind::StateMismatch: return "StateMismatch";
        case DiffKind::TargetFuelExhausted: return "TargetFuelExhausted";
        case DiffKind::SourceSkip: return "SourceSkip";
    }
    return "?";
}

std::string DiffOutcome::describe() const {
    std::ostringstream os;
    os << diff_kind_name(kind);
    switch (kind) {
        case DiffKind::Related: os << " (fuel " << fuel_used << ")"; break;
        case DiffKind::TargetFuelExhausted:
            os << " (cap " << cap_reached << ")";
            break;
        case DiffKind::SourceSkip:
            os << " (source "
               << (skip_status == RunStatus::Err ? "Err" : "Timeout") << ")";
            break;
        default: break;
    }
    if (!detail.empty()) os << "\n" << detail;
    return os.str();
}

namespace {

std::string cells_text(const SrcResult& s) {
    std::ostringstream os;
    for (const auto& c : s.cells)
        os << c.name << " = " << stringify(c.final) << "\n";
    return os.str();
}

std::string store_text(const TgtState& t) {
    std::ostringstream os;
    for (const auto& c : t.store)
        os << c.label << " = " << ml_value_describe(c.value) << "\n";
    return os.str();
}

}  // namespace

DiffOutcome check_simulation(const IrProgram& p, const CheckConfig& cfg) {
    SrcResult src = run_program(p, cfg.src_clock);
    if (src.status != RunStatus::Done) {
        DiffOutcome out;
        out.kind = DiffKind::SourceSkip;
        out.skip_status = src.status;
        out.detail = src.describe();
        return out;
    }

    MlProgramT target = compile_program(p, cfg.compile);

    std::int64_t fuel = std::min(std::max<std::int64_t>(cfg.src_clock, 1),
                                 cfg.fuel_cap);
    TgtRun run = run_ml_program(target, fuel);
    while (run.result.kind == TgtResult::Kind::Timeout && fuel < cfg.fuel_cap) {
        fuel = std::min(fuel * 2, cfg.fuel_cap);
        run = run_ml_program(target, fuel);
    }

    DiffOutcome out;
    out.fuel_used = fuel;
    if (run.result.kind == TgtResult::Kind::Timeout) {
        out.kind = DiffKind::TargetFuelExhausted;
        out.cap_reached = cfg.fuel_cap;
        out.detail = "source: " + src.describe();
        return out;
    }
    if (!res_rel(src, run.result)) {
        out.kind = DiffKind::ResultMismatch;
        out.detail = "source: " + src.describe() +
                     "\ntarget: " + run.result.describe();
        return out;
    }
    if (src.output != run.state.output) {
        out.kind = DiffKind::OutputMismatch;
        out.detail = "source output: " + quote_string(src.output) +
                     "\ntarget output: " + quote_string(run.state.output);
        return out;
    }
    if (!state_rel(src, run.state)) {
        out.kind = DiffKind::StateMismatch;
        out.detail = "source cells:\n" + cells_text(src) + "target store:\n" +
                     store_text(run.state);
        return out;
    }
    out.kind = DiffKind::Related;
    return out;
}

std::uint64_t fuzz_case_seed(std::uint64_t base_seed, int index) {
    std::uint64_t x =
        base_seed * 0x9E3779B97F4A7C15ULL + std::uint64_t(index) + 1;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

void write_witness(const FuzzConfig& cfg, const IrProgram& p,
                   const FuzzFailure& f) {
    namespace fs = std::filesystem;
    fs::path dir = fs::path(cfg.witness_dir) /
                   ("case_" + std::to_string(f.case_index));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) return;

    write_file(dir / "program.dfy.sexp", print(to_schema(p)) + "\n");
    SrcResult src = run_program(p, cfg.check.src_clock);
    std::ostringstream srcinfo;
    srcinfo << src.describe() << "\ncells:\n" << cells_text(src);
    write_file(dir / "source_output.txt", src.output);
    write_file(dir / "source_result.txt", srcinfo.str());
    try {
        MlProgramT target = compile_program(p, cfg.check.compile);
        write_file(dir / "target.cml.sml", pretty(target));
        std::int64_t fuel =
            f.outcome.fuel_used > 0 ? f.outcome.fuel_used : cfg.check.fuel_cap;
        TgtRun run = run_ml_program(target, fuel);
        std::ostringstream tgtinfo;
        tgtinfo << run.result.describe() << " (fuel " << fuel << ")\nstore:\n"
                << store_text(run.state);
        write_file(dir / "target_output.txt", run.state.output);
        write_file(dir / "target_result.txt", tgtinfo.str());
    } catch (const std::exception& e) {
        write_file(dir / "target_result.txt",
                   std::string("compile failed: ") + e.what() + "\n");
    }
    write_file(dir / "outcome.txt", f.outcome.describe() + "\n");
}

}  // namespace

FuzzSummary fuzz(const FuzzConfig& cfg) {
    FuzzSummary sum;
    std::atomic<bool> stop{false};

    std::vector<DiffOutcome> outcomes(std::size_t(std::max(cfg.count, 0)));
    std::vector<char> ran(std::size_t(std::max(cfg.count, 0)), 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
#endif
    for (int i = 0; i < cfg.count; ++i) {
        if (stop.load(std::memory_order_relaxed)) continue;
        GenConfig gen_cfg;
        gen_cfg.features = cfg.features;
        gen_cfg.max_methods = cfg.max_methods;
        gen_cfg.seed = fuzz_case_seed(cfg.seed, i);
        IrProgram p = generate(gen_cfg);
        DiffOutcome out = check_simulation(p, cfg.check);
        outcomes[std::size_t(i)] = out;
        ran[std::size_t(i)] = 1;
        if (cfg.stop_on_failure && !out.ok())
            stop.store(true, std::memory_order_relaxed);
    }

    for (int i = 0; i < cfg.count; ++i) {
        if (!ran[std::size_t(i)]) continue;
        ++sum.total;
        const DiffOutcome& out = outcomes[std::size_t(i)];
        switch (out.kind) {
            case DiffKind::Related: ++sum.related; break;
            case DiffKind::OutputMismatch: ++sum.output_mismatch; break;
            case DiffKind::ResultMismatch: ++sum.result_mismatch; break;
            case DiffKind::StateMismatch: ++sum.state_mismatch; break;
            case DiffKind::TargetFuelExhausted: ++sum.fuel_exhausted; break;
            case DiffKind::SourceSkip:
                if (out.skip_status == RunStatus::Err)
                    ++sum.skip_err;
                else
                    ++sum.skip_timeout;
                break;
        }
        if (!out.ok() && sum.failures.size() < 16)
            sum.failures.push_back({fuzz_case_seed(cfg.seed, i), i, out});
    }

    if (!cfg.witness_dir.empty()) {
        for (const auto& f : sum.failures) {
            GenConfig gen_cfg;
            gen_cfg.features = cfg.features;
            gen_cfg.max_methods = cfg.max_methods;
            gen_cfg.seed = f.case_seed;
            IrProgram p = generate(gen_cfg);
            write_witness(cfg, p, f);
        }
    }
    return sum;
}

std::string FuzzSummary::describe() const {
    std::ostringstream os;
    os << "cases:               " << total << "\n"
       << "related:             " << related << "\n"
       << "skipped (src err):   " << skip_err << "\n"
       << "skipped (src t/o):   " << skip_timeout << "\n"
       << "output mismatches:   " << output_mismatch << "\n"
       << "result mismatches:   " << result_mismatch << "\n"
       << "state mismatches:    " << state_mismatch << "\n"
       << "fuel exhausted:      " << fuel_exhausted << "\n";
    if (!failures.empty()) {
        os << "first failure: case " << failures.front().case_index << " ("
           << diff_kind_name(failures.front().outcome.kind) << ")\n";
    }
    return os.str();
}

}  // namespace d2c
