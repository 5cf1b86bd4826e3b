#ifndef D2C_COMPILE_HPP
#define D2C_COMPILE_HPP

#include <set>

#include "d2c/ir.hpp"
#include "d2c/ml_ast.hpp"

namespace d2c {

// Deliberate miscompilations for sensitivity-testing the differential
// harness; the faithful backend uses none of them.
enum class CompilerMutation {
    DropBreakHandler,
    SwapLeNormalization,
    SkipImplode,
    IntRefsStartAtOne,
    ReturnHandlerInsideLoops
};

const char* mutation_name(CompilerMutation m);

struct CompileOptions {
    std::set<CompilerMutation> mutations;
    bool has(CompilerMutation m) const { return mutations.count(m) > 0; }
};

struct CompileOnInvalid : std::runtime_error {
    ValidityReport report;
    explicit CompileOnInvalid(ValidityReport r);
};

// The Dafny runtime structure: control-flow exceptions, DivByZero, and the
// division / to-string helpers.
MlDec runtime_structure();

MlProgramT compile_program(const IrProgram& p, const CompileOptions& opts = {});

}  // namespace d2c

#endif
