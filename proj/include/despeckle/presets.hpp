#pragma once

// Published parameter presets, keyed by image role, channel kind, and looks.

#include <string>
#include <vector>

#include "despeckle/solver.hpp"

namespace despeckle {

struct PresetEntry {
    std::string name;   // "<image>-<gray|color>-L<looks>" or "<image>-gray"
    ModelKind model;
    int looks;          // 0 = any
    double alpha, beta, gamma, lambda;
};

const std::vector<PresetEntry>& preset_table();

// Exact name for the given model, or the "<model>-<image>-L<looks>" alias
// (which overrides the model argument). Returns nullptr when absent.
const PresetEntry* find_preset(const std::string& name, ModelKind model);

// Copies the preset's model and tuned constants into p.
void apply_preset(ModelParams& p, const PresetEntry& e);

}  // namespace despeckle
