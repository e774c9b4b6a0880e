// savflow: experiment runner for the SAV integrators.
//
//   savflow run --problem kepler --scheme sav-rk4 --dt-exp 10 --periods 10 --out runs/
//   savflow converge --problem kdv --scheme sav-cn-euler --exp-range 3:20 --out tables/
//
// Exit codes: 0 ok, 1 runtime error, 2 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "savflow/errors.hpp"
#include "savflow/harness.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct Flags {
    std::string config_file;
    std::optional<std::string> problem;
    std::optional<std::string> scheme;
    std::optional<std::string> predictor;
    std::optional<int> dt_exp;
    std::optional<double> dt;
    std::optional<int> periods;
    std::optional<long> steps;
    std::optional<std::string> exp_range;
    std::optional<std::size_t> grid_size;
    std::optional<double> a_L;
    std::optional<double> a_U;
    std::optional<long> stride;
    std::optional<std::string> out;
    std::optional<int> jobs;
};

void add_common(CLI::App& cmd, Flags& f) {
    cmd.add_option("--config", f.config_file, "key=value configuration file (flags override it)");
    cmd.add_option("--problem", f.problem, "kepler | kdv");
    cmd.add_option("--scheme", f.scheme, "sav-cn-ext | sav-cn-euler | sav-rk4");
    cmd.add_option("--predictor", f.predictor, "auto | explicit | exponential");
    cmd.add_option("--N", f.grid_size, "KdV grid size (power of two)");
    cmd.add_option("--a-L", f.a_L, "shift constant a_L");
    cmd.add_option("--a-U", f.a_U, "shift constant a_U");
    cmd.add_option("--out", f.out, "output directory");
}

savflow::ExperimentConfig resolve(const Flags& f) {
    savflow::ExperimentConfig cfg;
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) throw savflow::Error(savflow::ErrorKind::ConfigError, "cannot read config file " + f.config_file);
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = savflow::parse_config_text(buf.str(), cfg);
    }
    if (f.problem) cfg.problem = savflow::parse_problem(*f.problem);
    if (f.scheme) cfg.scheme = savflow::parse_scheme(*f.scheme);
    if (f.predictor) cfg.predictor = savflow::parse_predictor(*f.predictor);
    if (f.dt_exp) cfg.dt_exp = *f.dt_exp;
    if (f.dt) cfg.dt = *f.dt;
    if (f.periods) cfg.periods = *f.periods;
    if (f.steps) cfg.steps = *f.steps;
    if (f.exp_range) {
        const auto colon = f.exp_range->find(':');
        if (colon == std::string::npos) {
            throw savflow::Error(savflow::ErrorKind::ConfigError, "--exp-range expects MIN:MAX");
        }
        savflow::set_config_value(cfg, "exp_min", f.exp_range->substr(0, colon));
        savflow::set_config_value(cfg, "exp_max", f.exp_range->substr(colon + 1));
    }
    if (f.grid_size) cfg.grid_size = *f.grid_size;
    if (f.a_L) cfg.a_L = *f.a_L;
    if (f.a_U) cfg.a_U = *f.a_U;
    if (f.stride) cfg.stride = *f.stride;
    if (f.out) cfg.out = *f.out;
    if (f.jobs) cfg.jobs = *f.jobs;
    savflow::validate(cfg);
    return cfg;
}

void report(const savflow::Error& e) {
    std::cerr << "error: kind=" << savflow::to_string(e.kind());
    if (e.step()) std::cerr << " step=" << *e.step();
    std::cerr << " message=\"" << e.what() << "\"\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure-preserving SAV integrators: experiment runner"};
    app.require_subcommand(1);

    Flags run_flags;
    CLI::App* run = app.add_subcommand("run", "integrate one configuration and write energy/state CSVs");
    add_common(*run, run_flags);
    run->add_option("--dt-exp", run_flags.dt_exp, "dt = period / 2^dt-exp");
    run->add_option("--dt", run_flags.dt, "explicit step size (overrides --dt-exp)");
    run->add_option("--periods", run_flags.periods, "number of periods to integrate");
    run->add_option("--steps", run_flags.steps, "explicit step count (overrides --periods)");
    run->add_option("--stride", run_flags.stride, "record every stride-th step");

    Flags conv_flags;
    CLI::App* converge = app.add_subcommand("converge", "dt sweep over one period; writes a convergence table");
    add_common(*converge, conv_flags);
    converge->add_option("--exp-range", conv_flags.exp_range, "sweep exponents MIN:MAX, dt = period / 2^i");
    converge->add_option("--jobs", conv_flags.jobs, "sweep points run in parallel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (run->parsed()) {
            const savflow::ExperimentConfig cfg = resolve(run_flags);
            const savflow::RunResult result = savflow::run_experiment(cfg);
            for (const std::string& path : result.written_files) std::cout << "wrote " << path << '\n';
            std::printf("max_relerr_E_mod=%.3e max_relerr_E_orig=%.3e\n", result.record.max_rel_modified_error,
                        result.record.max_rel_energy_error);
        } else {
            const savflow::ExperimentConfig cfg = resolve(conv_flags);
            const savflow::ConvergenceTable table = savflow::run_convergence(cfg);
            std::cout << "wrote " << savflow::write_convergence(cfg, table) << '\n';
            for (const auto& row : table.rows) {
                std::printf("i=%2d dt=%.4e solution_error=%.4e energy_error=%.4e\n", row.exponent, row.dt,
                            row.solution_error, row.energy_error);
            }
            std::printf("fitted slope: solution %.3f, energy %.3f\n", table.solution_fit.slope,
                        table.energy_fit.slope);
        }
    } catch (const savflow::Error& e) {
        report(e);
        return e.kind() == savflow::ErrorKind::ConfigError ? kExitConfig : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: kind=Internal message=\"" << e.what() << "\"\n";
        return kExitRuntime;
    }
    return 0;
}
