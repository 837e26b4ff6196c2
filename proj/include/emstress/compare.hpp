#pragma once

#include "emstress/field.hpp"
#include "emstress/problem.hpp"
#include "emstress/stpinn_field.hpp"

#include <iosfwd>
#include <vector>

namespace emstress {

/// Uniform grid of points_per_segment positions on every segment at time t.
std::vector<StressQuery> grid_queries(const InterconnectTree& tree, int points_per_segment, double t);

/// Evaluates a field at many points; trained models take the batched path.
std::vector<double> sample_field(const StressField& field, const std::vector<StressQuery>& queries);

/// mean |sigma - sigma_ref| / max |sigma_ref| over the grid at time t. Zero
/// when the reference vanishes and the field agrees with it exactly.
double profile_error(const StressField& reference, const StressField& field, const InterconnectTree& tree, double t,
                     int points_per_segment);

/// n log-spaced times over [t_min, t_max].
std::vector<double> log_times(int n, double t_min, double t_max);

struct CompareSettings {
    int points_per_segment = 101;
    int ws_times = 10;
    double ws_t_min = 1e5;
    double ws_t_max = 1e8;    ///< clipped to t_end
    int js_times = 101;       ///< uniform over [0, t_end]
};

struct CompareReport {
    std::vector<double> ws_times;
    std::vector<double> ws_errors;
    double ws = 0.0;                     ///< mean of ws_errors
    std::vector<int> junction_nodes;
    std::vector<double> js_errors;       ///< per junction node
    double js = 0.0;                     ///< mean of js_errors; NaN without junctions
};

/// Whole-stress and junction-stress errors of `field` against `reference`.
/// The junction stress of the field is the mean over the junction group's
/// members, which straddle the virtual gaps; the reference is read at the node.
CompareReport compare_fields(const StressField& reference, const StressField& field, const Problem& problem,
                             const CompareSettings& settings);

struct JunctionCheck {
    int times = 0;
    double continuity = 0.0;   ///< max |sigma_k - sigma_c| / (G_max L_total / 2)
    double flux = 0.0;         ///< max |sum kappa (sigma_x + G) n| / (kappa_max G_max)
};

/// Junction continuity and flux balance of a trained model at random times
/// in (0, t_end]. Returns zeros for trees without junctions.
JunctionCheck junction_check(const StpinnModel& model, const Problem& problem, int times, unsigned long long seed);

} // namespace emstress
