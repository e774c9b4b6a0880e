#pragma once

#include <optional>
#include <vector>

#include "savflow/gradient_system.hpp"

namespace savflow {

struct RunRow {
    long step = 0;
    double t = 0.0;
    double modified_energy = 0.0;
    double energy = 0.0;
    double rel_modified_error = 0.0;
    double rel_energy_error = 0.0;
    std::optional<StateVector> state;
};

/// Per-step energies sampled every `stride` steps, plus summary metrics that
/// are accumulated over every step regardless of the stride.
struct RunRecord {
    double dt = 0.0;
    long steps = 0;
    long stride = 1;
    std::vector<RunRow> rows;
    AugmentedState initial;
    AugmentedState final;
    double max_rel_modified_error = 0.0;
    double max_rel_energy_error = 0.0;
};

struct RunOptions {
    long stride = 1;
    bool keep_states = true;
};

/// Accumulates a RunRecord while a scheme steps.
class RunRecorder {
public:
    RunRecorder(const GradientSystem& sys, const AugmentedState& z0, double dt, long steps, RunOptions options);

    void record(long step, const AugmentedState& z);
    [[nodiscard]] RunRecord finish(const AugmentedState& final_state) &&;

private:
    const GradientSystem* sys_;
    RunOptions options_;
    RunRecord record_;
    double e_mod0_;
    double e0_;
};

/// |value - reference| / |reference|, falling back to the absolute difference
/// when the reference vanishes.
double relative_difference(double value, double reference);

}  // namespace savflow
