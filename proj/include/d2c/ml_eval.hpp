#ifndef D2C_ML_EVAL_HPP
#define D2C_ML_EVAL_HPP

#include <optional>

#include "d2c/ml_ast.hpp"

namespace d2c {

struct EnvNode;
using MlEnv = std::shared_ptr<const EnvNode>;

struct MlValue {
    struct VStr { std::string text; };    // packed string
    struct VChars { std::string chars; }; // list of characters
    struct VUnit {};
    struct VClosure {
        MlEnv env;
        std::string param;
        MlExpPtr body;
    };
    struct VRecClosure {
        MlEnv env;
        std::shared_ptr<const std::vector<MlFunBind>> group;
        std::string selected;
    };
    struct VRef { std::size_t addr; };
    struct VExn {
        std::string constructor;
        std::optional<std::string> payload;
    };

    std::variant<BigInt, bool, char, VStr, VChars, VUnit, VClosure, VRecClosure,
                 VRef, VExn>
        node;
};

struct EnvNode {
    std::string name;
    MlValue value;
    MlEnv next;
};

MlEnv env_bind(MlEnv env, std::string name, MlValue value);
const MlValue* env_lookup(const MlEnv& env, const std::string& name);

std::string ml_value_describe(const MlValue& v);

struct StoreCell {
    MlValue value;
    std::string label;  // source binding name carried over from Ref nodes
};

struct TgtState {
    long long fuel = 0;
    std::vector<StoreCell> store;
    std::string output;
};

struct TgtResult {
    enum class Kind { Val, Raise, Timeout, TypeErr };
    Kind kind = Kind::Val;
    MlValue value;       // Val: result; Raise: the exception value
    std::string detail;  // TypeErr only

    bool is_val() const { return kind == Kind::Val; }
    bool is_unit() const {
        return kind == Kind::Val &&
               std::holds_alternative<MlValue::VUnit>(value.node);
    }
    std::string describe() const;
};

// Small-step machine with an explicit continuation stack: never grows the
// C++ stack, so tail self-applications iterate. Fuel ticks once per
// closure application.
TgtResult eval_ml(TgtState& state, const MlEnv& env, const MlExpPtr& e);

struct TgtRun {
    TgtState state;
    TgtResult result;
};

// Registers every declaration under its qualified name, then applies
// _module.Main to unit.
TgtRun run_ml_program(const MlProgramT& p, long long fuel);

}  // namespace d2c

#endif
