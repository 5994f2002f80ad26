#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdvduo/grid.hpp"
#include "kdvduo/hum.hpp"
#include "kdvduo/params.hpp"

namespace kdvduo {

/// Experiment kinds runnable from a config.
enum class Experiment {
    Simulate,
    Adjoint,
    CriticalAtlas,
    WitnessScan,
    GramianMargin,
    Control,
    NonlinearControl,
    VerifySuite,
};

Experiment experiment_from_name(const std::string& name);
const char* experiment_name(Experiment e);

/// Specification of an initial or target state built from named shapes.
struct StateSpec {
    enum class Kind { Zero, Sine, Random };
    Kind kind = Kind::Zero;
    double amplitude = 0.0;
    int mode = 1;              // sine mode number
    std::string component = "u";  // "u", "v" or "both"
};

/// A fully-specified run. Parsed from a JSON document; every default is made
/// explicit in the manifest echo.
struct ExperimentConfig {
    SystemParams params;
    double L = 1.0, T = 1.0;
    int nx = 101, nt = 500;
    ControlConfig control;
    Experiment experiment = Experiment::Simulate;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    std::map<std::string, double> tolerances;  // named numeric options
    StateSpec initial;
    StateSpec target;
    double l_max = 20.0;       // atlas
    double p_min = 0.05, p_max = 200.0;  // witness grid
    int p_points = 80;
    int time_stride = 10;      // field dump decimation

    double tol(const std::string& name, double fallback) const;
};

/// Parses a config JSON document. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 2 no-convergence outcome
    std::map<std::string, double> metrics;
};

/// Executes one experiment: writes manifest.json, result CSVs and companion
/// gnuplot scripts into the output directory.
RunOutcome run(const ExperimentConfig& config);

/// Sweep one axis (L, T or amplitude) over the given values; one row per
/// value in sweep.csv. Points execute in a worker pool capped by
/// KDVDUO_THREADS; output order is independent of scheduling.
RunOutcome sweep(const ExperimentConfig& config, const std::string& axis,
                 const std::vector<double>& values);

/// Version string embedded in manifests.
const char* version_string();

}  // namespace kdvduo
