#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "d2c/compile.hpp"
#include "d2c/gen.hpp"
#include "d2c/ir.hpp"
#include "d2c/ir_eval.hpp"
#include "d2c/ml_eval.hpp"
#include "d2c/sexp.hpp"

namespace d2c {

// Inverse of from_sexp for programs the decoder accepts.
SExp to_schema(const IrProgram& p);

// VInt~VInt, VBool~VBool, VChar~VChar, string~VChars of its characters.
bool value_rel(const SrcValue& s, const MlValue& t);

// Byte-equal outputs and pairwise-related cell logs (labels match names).
bool state_rel(const SrcResult& s, const TgtState& t);

// Done ~ RVal (); Timeout ~ RTimeout (retry signal). Caller ensures s != Err.
bool res_rel(const SrcResult& s, const TgtResult& t);

enum class DiffKind {
    Related,
    OutputMismatch,
    ResultMismatch,
    StateMismatch,
    TargetFuelExhausted,
    SourceSkip,
};

const char* diff_kind_name(DiffKind k);

struct DiffOutcome {
    DiffKind kind = DiffKind::Related;
    std::int64_t fuel_used = 0;   // fuel of the final (non-timeout) target run
    std::int64_t cap_reached = 0; // TargetFuelExhausted only
    RunStatus skip_status = RunStatus::Done;  // SourceSkip: Err or Timeout
    std::string detail;

    bool ok() const {
        return kind == DiffKind::Related || kind == DiffKind::SourceSkip;
    }
    std::string describe() const;
};

struct CheckConfig {
    std::int64_t src_clock = 10000;
    std::int64_t fuel_cap = 1 << 20;
    CompileOptions compile;
};

// Differential check for one program: run source, then search target fuel
// by doubling from src_clock up to fuel_cap; compare results and states.
DiffOutcome check_simulation(const IrProgram& p, const CheckConfig& cfg);

struct FuzzConfig {
    int count = 1000;
    std::uint64_t seed = 0;
    GenFeatures features;
    int max_methods = 4;
    CheckConfig check;
    std::string witness_dir;  // when set, one subdirectory per failure
    bool stop_on_failure = false;
    bool parallel = true;
};

struct FuzzFailure {
    std::uint64_t case_seed = 0;
    int case_index = 0;
    DiffOutcome outcome;
};

struct FuzzSummary {
    int total = 0;
    int related = 0;
    int output_mismatch = 0;
    int result_mismatch = 0;
    int state_mismatch = 0;
    int fuel_exhausted = 0;
    int skip_err = 0;
    int skip_timeout = 0;
    std::vector<FuzzFailure> failures;  // capped at 16, lowest case indexes

    int mismatches() const {
        return output_mismatch + result_mismatch + state_mismatch +
               fuel_exhausted;
    }
    int skips() const { return skip_err + skip_timeout; }
    std::string describe() const;
};

std::uint64_t fuzz_case_seed(std::uint64_t base_seed, int index);

FuzzSummary fuzz(const FuzzConfig& cfg);

}  // namespace d2c
