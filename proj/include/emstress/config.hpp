#pragma once

#include "emstress/fdm.hpp"
#include "emstress/loss.hpp"
#include "emstress/model.hpp"
#include "emstress/optim.hpp"
#include "emstress/problem.hpp"
#include "emstress/sampling.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace emstress {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OutputConfig {
    std::string dir = ".";
    std::string checkpoint = "model.ckpt";
    std::string history = "history.csv";
    std::string stress_csv = "fdm_stress.csv";
    std::string eval_csv = "eval_stress.csv";
    std::string report = "report.txt";
    std::vector<double> times{5e5, 5e6, 5e7};   ///< profile times for solve-fdm and eval, s

    /// dir joined with a relative file name.
    std::string path(const std::string& file) const;
};

struct EvalConfig {
    int points_per_segment = 101;
    double ratio = 1.0;   ///< diffusivity rescaling D_a* / D_a
};

struct CompareConfig {
    int ws_times = 10;
    double ws_t_min = 1e5;
    double ws_t_max = 1e8;
    int js_times = 101;
};

/// Complete run description; every field has a default.
struct RunConfig {
    std::vector<SegmentSpec> segments;
    double virtual_distance = 0.5e-6;   ///< m
    MaterialParams material;
    ThermalModel thermal;
    ScalingConfig scaling;
    SamplerConfig sampling;
    Architecture model;
    TrainingConfig training;
    LossWeights loss_weights;
    int chunk_size = 256;
    FdmSettings fdm;
    OutputConfig output;
    EvalConfig eval;
    CompareConfig compare;
    double t_end = 1e8;

    /// Validated tree, unfolded domain and physics.
    Problem problem() const;
    /// Architecture with the spatial dimension taken from the unfolded tree.
    Architecture architecture(const Problem& problem) const;
    /// kappa_hat of the time-averaged node diffusivity, for the anchoring term.
    double anchor_kappa_hat() const;
    FdmSettings fdm_settings() const;
};

/// Parses YAML text. Overrides are `dotted.key=value` pairs applied before
/// parsing; list elements are addressed by index (tree.segments.0.length_um).
/// Unknown keys are rejected.
RunConfig parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Documentation of every accepted key with its default.
std::string config_reference();

} // namespace emstress
