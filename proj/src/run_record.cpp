#include "savflow/run_record.hpp"

#include <algorithm>
#include <cmath>

#include "savflow/errors.hpp"

namespace savflow {

double relative_difference(double value, double reference) {
    const double diff = std::abs(value - reference);
    return reference == 0.0 ? diff : diff / std::abs(reference);
}

RunRecorder::RunRecorder(const GradientSystem& sys, const AugmentedState& z0, double dt, long steps,
                         RunOptions options)
    : sys_(&sys), options_(options) {
    if (steps < 1) throw Error(ErrorKind::ConfigError, "steps must be at least 1");
    if (options_.stride < 1) throw Error(ErrorKind::ConfigError, "record stride must be at least 1");
    if (!(dt > 0.0)) throw Error(ErrorKind::ConfigError, "dt must be positive");
    record_.dt = dt;
    record_.steps = steps;
    record_.stride = options_.stride;
    record_.initial = z0;
    record_.rows.reserve(static_cast<std::size_t>(steps / options_.stride + 1));
    e_mod0_ = modified_energy(sys, z0);
    e0_ = original_energy(sys, z0.u);
    record(0, z0);
}

void RunRecorder::record(long step, const AugmentedState& z) {
    const double e_mod = modified_energy(*sys_, z);
    const double e = original_energy(*sys_, z.u);
    const double rel_mod = relative_difference(e_mod, e_mod0_);
    const double rel = relative_difference(e, e0_);
    record_.max_rel_modified_error = std::max(record_.max_rel_modified_error, rel_mod);
    record_.max_rel_energy_error = std::max(record_.max_rel_energy_error, rel);
    if (step % options_.stride != 0) return;
    RunRow row{step, static_cast<double>(step) * record_.dt, e_mod, e, rel_mod, rel, std::nullopt};
    if (options_.keep_states) row.state = z.u;
    record_.rows.push_back(std::move(row));
}

RunRecord RunRecorder::finish(const AugmentedState& final_state) && {
    record_.final = final_state;
    return std::move(record_);
}

}  // namespace savflow
