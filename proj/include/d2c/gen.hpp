#pragma once

#include <cstdint>

#include "d2c/ir.hpp"

namespace d2c {

struct GenFeatures {
    bool loops = true;
    bool labels = true;
    bool calls = true;
    bool outs = true;
    bool strings = true;

    static GenFeatures all() { return {}; }
    static GenFeatures none() { return {false, false, false, false, false}; }
};

struct GenConfig {
    int max_methods = 4;    // per module, across up to two modules
    int max_stmt_depth = 3;
    int max_expr_depth = 3;
    GenFeatures features;
    std::uint64_t seed = 0;
};

// Deterministic in cfg.seed; output always passes validate().
IrProgram generate(const GenConfig& cfg);

}  // namespace d2c
