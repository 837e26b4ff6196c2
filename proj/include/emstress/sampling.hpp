#pragma once

#include "emstress/problem.hpp"

#include <random>
#include <vector>

namespace emstress {

struct SampleCounts {
    int residual = 25000;   ///< N_f
    int terminal = 1000;    ///< N_b
    int junction = 1000;    ///< N_c, junction sample times
    int initial = 500;      ///< N_0
};

struct SamplerConfig {
    SampleCounts counts;
    double log_fraction = 0.5;     ///< share of log-stratified times
    double log_min_ratio = 1e-5;   ///< log-stratified times start at this fraction of t_end
    unsigned long long seed = 1234;

    void validate() const;
};

/// One junction sample: members [first, first + count) of junction_points,
/// the group's center first.
struct JunctionBatch {
    int group = 0;
    double t = 0.0;
    std::size_t first = 0;
    std::size_t count = 0;
};

struct CollocationSet {
    std::vector<SamplePoint> residual;
    std::vector<SamplePoint> terminal;
    std::vector<SamplePoint> initial;
    std::vector<SamplePoint> junction_points;
    std::vector<JunctionBatch> junctions;
};

/// n Latin hypercube samples of [0, 1): one uniform draw per stratum, in
/// shuffled order.
std::vector<double> latin_hypercube(int n, std::mt19937_64& rng);

/// n times: the uniform share stratified on [0, t_end], the rest stratified in
/// log t on [log_min_ratio t_end, t_end], shuffled together.
std::vector<double> sample_times(int n, double t_end, const SamplerConfig& cfg, std::mt19937_64& rng);

/// Physical positions by Latin hypercube over the concatenated segment
/// lengths. Returns (segment, local) pairs.
std::vector<std::pair<int, double>> sample_positions(const InterconnectTree& tree, int n, std::mt19937_64& rng);

CollocationSet sample_collocation(const Problem& problem, const SamplerConfig& cfg);

} // namespace emstress
