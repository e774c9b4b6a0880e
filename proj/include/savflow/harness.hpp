#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "savflow/gradient_system.hpp"
#include "savflow/run_record.hpp"

namespace savflow {

enum class ProblemKind { Kepler, Kdv };
enum class SchemeKind { SavCnExt, SavCnEuler, SavRk4 };
/// Which explicit predictor family the Euler and RK schemes use. Auto picks
/// the problem default: explicit for Kepler, exponential for KdV.
enum class PredictorFamily { Auto, Explicit, Exponential };

std::string_view to_string(ProblemKind kind) noexcept;
std::string_view to_string(SchemeKind kind) noexcept;
std::string_view to_string(PredictorFamily kind) noexcept;
ProblemKind parse_problem(std::string_view text);
SchemeKind parse_scheme(std::string_view text);
PredictorFamily parse_predictor(std::string_view text);

/// Flat experiment configuration. The step size is period / 2^dt_exp unless
/// `dt` is given; the step count is periods * period / dt unless `steps` is
/// given. Sweeps run dt_exp over [exp_min, exp_max], one period each.
struct ExperimentConfig {
    ProblemKind problem = ProblemKind::Kepler;
    SchemeKind scheme = SchemeKind::SavRk4;
    PredictorFamily predictor = PredictorFamily::Auto;
    int dt_exp = 10;
    std::optional<double> dt;
    int periods = 1;
    std::optional<long> steps;
    int exp_min = 7;
    int exp_max = 14;
    std::size_t grid_size = 16;
    double a_L = 1.0;
    double a_U = 1.0;
    long stride = 1;
    std::string out = ".";
    int jobs = 1;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError on any invalid field.
void validate(const ExperimentConfig& cfg);

/// Applies `key=value` lines (blank lines and '#' comments ignored) on top of
/// `base`. Throws ConfigError on unknown keys or malformed values.
ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base = {});
/// Applies a single key/value pair.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);
/// Serialises every field as `key=value` lines in a fixed order.
std::vector<std::string> config_lines(const ExperimentConfig& cfg);

/// Reads the `# config.` metadata lines of a CSV written by this module back
/// into a configuration.
ExperimentConfig parse_metadata_header(std::string_view csv);

/// The concrete problem behind a configuration.
struct Experiment {
    GradientSystem system;
    StateVector initial_state;
    double period = 0.0;
};

Experiment make_experiment(const ExperimentConfig& cfg);
double resolved_dt(const ExperimentConfig& cfg, double period);
long resolved_steps(const ExperimentConfig& cfg, double period);

RunRecord run_scheme(const Experiment& exp, const ExperimentConfig& cfg, double dt, long steps,
                     RunOptions options = {});

/// ‖u_final - u_initial‖_∞ / ‖u_initial‖_∞
double relative_solution_error(const StateVector& final_state, const StateVector& initial_state);

std::string build_id();

std::string format_run_csv(const ExperimentConfig& cfg, const Experiment& exp, const RunRecord& record);
/// Orbit samples (t, x, y) with a marker at each multiple of the period.
std::string format_orbit_csv(const ExperimentConfig& cfg, const RunRecord& record, long steps_per_period);

struct RunResult {
    RunRecord record;
    std::vector<std::string> written_files;
};

/// Runs one experiment and writes `<out>/<problem>_<scheme>_run.csv` (plus an
/// orbit CSV for Kepler).
RunResult run_experiment(const ExperimentConfig& cfg);

struct SlopeFit {
    double slope = 0.0;
    std::vector<std::size_t> used;  // indices of points entering the fit
};

/// Least-squares slope of log(error) against log(dt). Points within 10x of
/// the smallest error in the sweep are treated as round-off floored and
/// excluded, as are non-positive errors. Slope is NaN with fewer than two
/// usable points.
SlopeFit fit_convergence_slope(const std::vector<double>& dts, const std::vector<double>& errors);

struct ConvergenceRow {
    int exponent = 0;
    long steps = 0;
    double dt = 0.0;
    double solution_error = 0.0;
    double energy_error = 0.0;
    double modified_energy_error = 0.0;
    std::optional<double> local_slope_solution;
    std::optional<double> local_slope_energy;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    SlopeFit solution_fit;
    SlopeFit energy_fit;
};

/// One-period runs for dt = T / 2^i, i in [exp_min, exp_max].
ConvergenceTable run_convergence(const ExperimentConfig& cfg);
std::string format_convergence_csv(const ExperimentConfig& cfg, const ConvergenceTable& table);

/// Runs the sweep and writes `<out>/<problem>_<scheme>_convergence.csv`.
std::string write_convergence(const ExperimentConfig& cfg, const ConvergenceTable& table);

}  // namespace savflow
