#include "savflow/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include "savflow/errors.hpp"
#include "savflow/kdv.hpp"
#include "savflow/kepler.hpp"
#include "savflow/scheme_cn.hpp"
#include "savflow/scheme_rk.hpp"

#ifndef SAVFLOW_BUILD_ID
#define SAVFLOW_BUILD_ID "unknown"
#endif

namespace savflow {

namespace {

constexpr std::string_view kConfigPrefix = "# config.";

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorKind::ConfigError, message); }

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        config_error("invalid value '" + std::string(text) + "' for " + std::string(key));
    }
    return value;
}

}  // namespace

std::string_view to_string(ProblemKind kind) noexcept { return kind == ProblemKind::Kepler ? "kepler" : "kdv"; }

std::string_view to_string(SchemeKind kind) noexcept {
    switch (kind) {
        case SchemeKind::SavCnExt: return "sav-cn-ext";
        case SchemeKind::SavCnEuler: return "sav-cn-euler";
        case SchemeKind::SavRk4: return "sav-rk4";
    }
    return "unknown";
}

std::string_view to_string(PredictorFamily kind) noexcept {
    switch (kind) {
        case PredictorFamily::Auto: return "auto";
        case PredictorFamily::Explicit: return "explicit";
        case PredictorFamily::Exponential: return "exponential";
    }
    return "unknown";
}

ProblemKind parse_problem(std::string_view text) {
    if (text == "kepler") return ProblemKind::Kepler;
    if (text == "kdv") return ProblemKind::Kdv;
    config_error("unknown problem '" + std::string(text) + "' (expected kepler or kdv)");
}

SchemeKind parse_scheme(std::string_view text) {
    if (text == "sav-cn-ext") return SchemeKind::SavCnExt;
    if (text == "sav-cn-euler") return SchemeKind::SavCnEuler;
    if (text == "sav-rk4") return SchemeKind::SavRk4;
    config_error("unknown scheme '" + std::string(text) + "' (expected sav-cn-ext, sav-cn-euler or sav-rk4)");
}

PredictorFamily parse_predictor(std::string_view text) {
    if (text == "auto") return PredictorFamily::Auto;
    if (text == "explicit") return PredictorFamily::Explicit;
    if (text == "exponential") return PredictorFamily::Exponential;
    config_error("unknown predictor '" + std::string(text) + "' (expected auto, explicit or exponential)");
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.dt && !(*cfg.dt > 0.0)) config_error("dt must be positive");
    if (cfg.dt_exp < 0 || cfg.dt_exp > 30) config_error("dt_exp must lie in [0, 30]");
    if (cfg.periods < 1) config_error("periods must be at least 1");
    if (cfg.steps && *cfg.steps < 1) config_error("steps must be at least 1");
    if (cfg.exp_min < 0 || cfg.exp_max > 30 || cfg.exp_min >= cfg.exp_max) {
        config_error("sweep exponents must be increasing within [0, 30]");
    }
    if (cfg.stride < 1) config_error("stride must be at least 1");
    if (cfg.jobs < 1) config_error("jobs must be at least 1");
    if (cfg.problem == ProblemKind::Kdv && (cfg.grid_size < 2 || !is_power_of_two(cfg.grid_size))) {
        config_error("N must be an even power of two");
    }
    if (cfg.problem == ProblemKind::Kepler && cfg.predictor == PredictorFamily::Exponential) {
        config_error("the exponential predictors need a Fourier-diagonal splitting, which kepler does not have");
    }
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    if (key == "problem") {
        cfg.problem = parse_problem(value);
    } else if (key == "scheme") {
        cfg.scheme = parse_scheme(value);
    } else if (key == "predictor") {
        cfg.predictor = parse_predictor(value);
    } else if (key == "dt_exp") {
        cfg.dt_exp = parse_number<int>(key, value);
    } else if (key == "dt") {
        if (value == "none") cfg.dt.reset();
        else cfg.dt = parse_number<double>(key, value);
    } else if (key == "periods") {
        cfg.periods = parse_number<int>(key, value);
    } else if (key == "steps") {
        if (value == "none") cfg.steps.reset();
        else cfg.steps = parse_number<long>(key, value);
    } else if (key == "exp_min") {
        cfg.exp_min = parse_number<int>(key, value);
    } else if (key == "exp_max") {
        cfg.exp_max = parse_number<int>(key, value);
    } else if (key == "N") {
        cfg.grid_size = parse_number<std::size_t>(key, value);
    } else if (key == "a_L") {
        cfg.a_L = parse_number<double>(key, value);
    } else if (key == "a_U") {
        cfg.a_U = parse_number<double>(key, value);
    } else if (key == "stride") {
        cfg.stride = parse_number<long>(key, value);
    } else if (key == "out") {
        cfg.out = std::string(value);
    } else if (key == "jobs") {
        cfg.jobs = parse_number<int>(key, value);
    } else {
        config_error("unknown configuration key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) config_error("line " + std::to_string(line_no) + ": expected key=value");
        set_config_value(base, trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    }
    return base;
}

std::vector<std::string> config_lines(const ExperimentConfig& cfg) {
    return {
        "problem=" + std::string(to_string(cfg.problem)),
        "scheme=" + std::string(to_string(cfg.scheme)),
        "predictor=" + std::string(to_string(cfg.predictor)),
        "dt_exp=" + std::to_string(cfg.dt_exp),
        "dt=" + (cfg.dt ? format_double(*cfg.dt) : std::string("none")),
        "periods=" + std::to_string(cfg.periods),
        "steps=" + (cfg.steps ? std::to_string(*cfg.steps) : std::string("none")),
        "exp_min=" + std::to_string(cfg.exp_min),
        "exp_max=" + std::to_string(cfg.exp_max),
        "N=" + std::to_string(cfg.grid_size),
        "a_L=" + format_double(cfg.a_L),
        "a_U=" + format_double(cfg.a_U),
        "stride=" + std::to_string(cfg.stride),
        "out=" + cfg.out,
        "jobs=" + std::to_string(cfg.jobs),
    };
}

ExperimentConfig parse_metadata_header(std::string_view csv) {
    std::istringstream in{std::string(csv)};
    std::string line;
    ExperimentConfig cfg;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() != '#') break;
        if (line.rfind(kConfigPrefix, 0) != 0) continue;
        const std::string body = line.substr(kConfigPrefix.size());
        const auto eq = body.find('=');
        if (eq == std::string::npos) config_error("malformed metadata line: " + line);
        set_config_value(cfg, body.substr(0, eq), body.substr(eq + 1));
    }
    return cfg;
}

// ---------------------------------------------------------------------------

Experiment make_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.problem == ProblemKind::Kepler) {
        return {kepler_system(cfg.a_L, cfg.a_U), kepler_initial_state().pack(), kKeplerPeriod};
    }
    const CnoidalParams params;
    const KdvGrid grid(cfg.grid_size, params.spatial_period());
    return {kdv_system(grid, cfg.a_L, cfg.a_U), cnoidal(params, grid, 0.0), params.temporal_period()};
}

double resolved_dt(const ExperimentConfig& cfg, double period) {
    return cfg.dt ? *cfg.dt : std::ldexp(period, -cfg.dt_exp);
}

long resolved_steps(const ExperimentConfig& cfg, double period) {
    if (cfg.steps) return *cfg.steps;
    if (!cfg.dt) return static_cast<long>(cfg.periods) << cfg.dt_exp;
    return static_cast<long>(std::llround(cfg.periods * period / *cfg.dt));
}

RunRecord run_scheme(const Experiment& exp, const ExperimentConfig& cfg, double dt, long steps, RunOptions options) {
    const GradientSystem& sys = exp.system;
    const AugmentedState z0 = init_augmented(sys, exp.initial_state);
    const bool exponential = cfg.predictor == PredictorFamily::Exponential ||
                             (cfg.predictor == PredictorFamily::Auto && cfg.problem == ProblemKind::Kdv);
    switch (cfg.scheme) {
        case SchemeKind::SavCnExt:
            return cn_run(sys, z0, dt, steps, PredictorKind::Extrapolation, options);
        case SchemeKind::SavCnEuler:
            return cn_run(sys, z0, dt, steps,
                          exponential ? PredictorKind::HalfStepExponentialEuler : PredictorKind::HalfStepExplicitEuler,
                          options);
        case SchemeKind::SavRk4:
            return rk4_run(sys, z0, dt, steps,
                           exponential ? StagePredictorKind::Exponential : StagePredictorKind::Explicit, options);
    }
    config_error("unknown scheme");
}

double relative_solution_error(const StateVector& final_state, const StateVector& initial_state) {
    return max_abs(subtract(final_state, initial_state)) / max_abs(initial_state);
}

std::string build_id() { return SAVFLOW_BUILD_ID; }

namespace {

void write_header(std::ostream& out, std::string_view kind, const ExperimentConfig& cfg) {
    out << "# savflow " << kind << '\n';
    out << "# build=" << build_id() << '\n';
    for (const std::string& line : config_lines(cfg)) out << kConfigPrefix << line << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::ConfigError, "cannot open output file " + path.string());
    file << contents;
    if (!file) throw Error(ErrorKind::ConfigError, "failed writing " + path.string());
}

std::filesystem::path output_dir(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::ConfigError, "cannot create output directory " + dir.string());
    return dir;
}

std::string file_stem(const ExperimentConfig& cfg) {
    return std::string(to_string(cfg.problem)) + "_" + std::string(to_string(cfg.scheme));
}

}  // namespace

std::string format_run_csv(const ExperimentConfig& cfg, const Experiment& exp, const RunRecord& record) {
    std::ostringstream out;
    write_header(out, "run", cfg);
    out << "# derived.dt=" << format_double(record.dt) << '\n';
    out << "# derived.steps=" << record.steps << '\n';
    out << "# derived.period=" << format_double(exp.period) << '\n';
    out << "# derived.max_relerr_E_mod=" << format_double(record.max_rel_modified_error) << '\n';
    out << "# derived.max_relerr_E_orig=" << format_double(record.max_rel_energy_error) << '\n';

    out << "step,t,E_mod,E_orig,relerr_E_mod,relerr_E_orig";
    if (cfg.problem == ProblemKind::Kepler) {
        out << ",x,y,u,v";
    } else {
        for (std::size_t j = 0; j < exp.system.dim; ++j) out << ",u_" << j;
    }
    out << '\n';
    for (const RunRow& row : record.rows) {
        out << row.step << ',' << format_double(row.t) << ',' << format_double(row.modified_energy) << ','
            << format_double(row.energy) << ',' << format_double(row.rel_modified_error) << ','
            << format_double(row.rel_energy_error);
        if (row.state) {
            for (double v : *row.state) out << ',' << format_double(v);
        }
        out << '\n';
    }
    return out.str();
}

std::string format_orbit_csv(const ExperimentConfig& cfg, const RunRecord& record, long steps_per_period) {
    std::ostringstream out;
    write_header(out, "orbit", cfg);
    out << "t,x,y,period_marker\n";
    for (const RunRow& row : record.rows) {
        if (!row.state) continue;
        const int marker = (steps_per_period > 0 && row.step % steps_per_period == 0) ? 1 : 0;
        out << format_double(row.t) << ',' << format_double((*row.state)[0]) << ','
            << format_double((*row.state)[1]) << ',' << marker << '\n';
    }
    return out.str();
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    const Experiment exp = make_experiment(cfg);
    const double dt = resolved_dt(cfg, exp.period);
    const long steps = resolved_steps(cfg, exp.period);
    if (steps < 1) config_error("steps must be at least 1");

    RunResult result{run_scheme(exp, cfg, dt, steps, {cfg.stride, true}), {}};
    const std::filesystem::path dir = output_dir(cfg);
    const std::filesystem::path run_path = dir / (file_stem(cfg) + "_run.csv");
    write_file(run_path, format_run_csv(cfg, exp, result.record));
    result.written_files.push_back(run_path.string());

    if (cfg.problem == ProblemKind::Kepler) {
        const long steps_per_period = static_cast<long>(std::llround(exp.period / dt));
        const std::filesystem::path orbit_path = dir / (file_stem(cfg) + "_orbit.csv");
        write_file(orbit_path, format_orbit_csv(cfg, result.record, steps_per_period));
        result.written_files.push_back(orbit_path.string());
    }
    return result;
}

// ---------------------------------------------------------------------------

SlopeFit fit_convergence_slope(const std::vector<double>& dts, const std::vector<double>& errors) {
    if (dts.size() != errors.size()) throw Error(ErrorKind::DimensionMismatch, "dt and error counts differ");
    double floor = std::numeric_limits<double>::infinity();
    for (double e : errors)
        if (e > 0.0) floor = std::min(floor, e);

    SlopeFit fit;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i] > 0.0 && errors[i] > 10.0 * floor) fit.used.push_back(i);
    }
    if (fit.used.size() < 2) {
        fit.slope = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i : fit.used) {
        const double x = std::log(dts[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double count = static_cast<double>(fit.used.size());
    fit.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return fit;
}

ConvergenceTable run_convergence(const ExperimentConfig& cfg) {
    validate(cfg);
    const int count = cfg.exp_max - cfg.exp_min + 1;
    if (count < 4) config_error("a convergence sweep needs at least 4 step sizes");
    const Experiment exp = make_experiment(cfg);

    auto run_point = [&](int exponent) {
        ExperimentConfig point = cfg;
        point.dt_exp = exponent;
        point.dt.reset();
        point.steps.reset();
        point.periods = 1;
        const double dt = resolved_dt(point, exp.period);
        const long steps = resolved_steps(point, exp.period);
        const RunRecord record = run_scheme(exp, point, dt, steps, {steps, false});
        ConvergenceRow row;
        row.exponent = exponent;
        row.steps = steps;
        row.dt = dt;
        row.solution_error = relative_solution_error(record.final.u, exp.initial_state);
        row.energy_error = record.max_rel_energy_error;
        row.modified_energy_error = record.max_rel_modified_error;
        return row;
    };

    ConvergenceTable table;
    table.rows.resize(static_cast<std::size_t>(count));
    for (int start = 0; start < count; start += cfg.jobs) {
        std::vector<std::future<ConvergenceRow>> batch;
        const int stop = std::min(count, start + cfg.jobs);
        for (int i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, run_point, cfg.exp_min + i));
        for (int i = start; i < stop; ++i) table.rows[static_cast<std::size_t>(i)] = batch[i - start].get();
    }

    std::vector<double> dts, sol, energy;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const ConvergenceRow& row = table.rows[i];
        dts.push_back(row.dt);
        sol.push_back(row.solution_error);
        energy.push_back(row.energy_error);
        if (i > 0) {
            const ConvergenceRow& prev = table.rows[i - 1];
            const double ratio = std::log(prev.dt / row.dt);
            table.rows[i].local_slope_solution = std::log(prev.solution_error / row.solution_error) / ratio;
            table.rows[i].local_slope_energy = std::log(prev.energy_error / row.energy_error) / ratio;
        }
    }
    table.solution_fit = fit_convergence_slope(dts, sol);
    table.energy_fit = fit_convergence_slope(dts, energy);
    return table;
}

std::string format_convergence_csv(const ExperimentConfig& cfg, const ConvergenceTable& table) {
    std::ostringstream out;
    write_header(out, "convergence", cfg);
    out << "# derived.fitted_slope_solution=" << format_double(table.solution_fit.slope) << '\n';
    out << "# derived.fitted_slope_energy=" << format_double(table.energy_fit.slope) << '\n';
    out << "exponent,steps,dt,solution_error,energy_error,modified_energy_error,local_slope_solution,"
           "local_slope_energy\n";
    auto optional = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const ConvergenceRow& row : table.rows) {
        out << row.exponent << ',' << row.steps << ',' << format_double(row.dt) << ','
            << format_double(row.solution_error) << ',' << format_double(row.energy_error) << ','
            << format_double(row.modified_energy_error) << ',' << optional(row.local_slope_solution) << ','
            << optional(row.local_slope_energy) << '\n';
    }
    return out.str();
}

std::string write_convergence(const ExperimentConfig& cfg, const ConvergenceTable& table) {
    const std::filesystem::path path = output_dir(cfg) / (file_stem(cfg) + "_convergence.csv");
    write_file(path, format_convergence_csv(cfg, table));
    return path.string();
}

}  // namespace savflow
