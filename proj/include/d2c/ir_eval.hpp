#ifndef D2C_IR_EVAL_HPP
#define D2C_IR_EVAL_HPP

#include <string>
#include <variant>
#include <vector>

#include "d2c/ir.hpp"

namespace d2c {

using SrcValue = std::variant<BigInt, bool, char, std::string>;

SrcValue default_value(IrType t);

// Print formatting: ints in decimal with '-', bools as true/false, chars and
// strings verbatim. The target runtime mirrors this byte for byte.
std::string stringify(const SrcValue& v);

enum class SrcErrKind { DivByZero, UnboundName, TypeConfusion, ControlEscape };

const char* src_err_name(SrcErrKind k);

enum class RunStatus { Done, Err, Timeout };

// One ref-backed binding: recorded at creation, final value filled in when
// the binding dies. Creation order matches the target's store allocation
// order, which is what state_rel pairs against.
struct CellRecord {
    std::string name;
    SrcValue final;
};

struct SrcResult {
    RunStatus status = RunStatus::Done;
    SrcErrKind err = SrcErrKind::DivByZero;
    std::string output;
    std::vector<CellRecord> cells;
    long long clock_left = 0;

    std::string describe() const;
};

// Runs _module.Main from an empty state. Invalid programs surface Err as
// data rather than throwing.
SrcResult run_program(const IrProgram& p, long long clock);

}  // namespace d2c

#endif
