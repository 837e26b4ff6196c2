#pragma once

#include "emstress/field.hpp"
#include "emstress/geometry.hpp"
#include "emstress/physics.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace emstress {

class ReferenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Long-time limit of the DC stress: linear on each segment with slope -G,
/// continuous at junctions and with zero tree-wide integral.
class SteadyState final : public StressField {
public:
    struct Line {
        double start = 0.0;   ///< stress at the node_a end, Pa
        double slope = 0.0;   ///< Pa/m
    };

    SteadyState(const InterconnectTree& tree, const MaterialParams& params);

    double stress(int segment, double local, double = 0.0) const override;
    const std::vector<Line>& lines() const { return lines_; }
    /// Stress at a tree node.
    double node_stress(int node) const { return nodes_.at(static_cast<std::size_t>(node)); }

private:
    std::vector<Line> lines_;
    std::vector<double> nodes_;
};

inline SteadyState steady_state(const InterconnectTree& tree, const MaterialParams& params)
{
    return SteadyState(tree, params);
}

struct SeriesValue {
    double value = 0.0;       ///< Pa
    double tail_bound = 0.0;  ///< bound on the truncated terms, Pa
};

/// Cosine eigen-series solution of a single wire with constant kappa,
/// zero-flux ends and zero initial stress. n_terms counts the odd harmonics
/// kept (n = 1, 3, ..., 2 n_terms - 1); the even coefficients vanish.
SeriesValue series_solution_single_wire(double length, double kappa_const, double force, double x, double t,
                                        int n_terms);

/// Dense samples of T'(t) = int_0^t rate(t') dt'.
class TimeTransformCurve {
public:
    TimeTransformCurve(std::vector<double> times, std::vector<double> values);

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    /// Linear interpolation between samples.
    double operator()(double t) const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

/// Classic fourth-order Runge-Kutta integration of T' = rate(t) on a uniform
/// grid of `steps` intervals over [0, t_end].
TimeTransformCurve integrate_time_transform(const std::function<double(double)>& rate, double t_end, int steps);

/// kappa(T0(t)) for the spatially uniform part of a thermal model.
double node_kappa(const ThermalModel& thermal, const MaterialParams& params, double t);

/// Time average of kappa(T0(t)) over [0, t_end].
double mean_node_kappa(const ThermalModel& thermal, const MaterialParams& params, double t_end,
                       int steps = 20000);

struct NucleationOptions {
    int points_per_segment = 201;
    int scan_points = 200;      ///< log-spaced coarse scan
    double rel_tol = 1e-3;      ///< bisection stops at this relative bracket width
};

/// Largest stress over the tree at time t, sampled on a uniform grid.
double max_tree_stress(const StressField& field, const InterconnectTree& tree, double t, int points_per_segment);

/// Earliest time at which the tree-wide maximum stress reaches the critical
/// stress, or nullopt if it never does on [0, t_max].
std::optional<double> nucleation_time(const StressField& field, const InterconnectTree& tree,
                                      const MaterialParams& params, double t_max,
                                      const NucleationOptions& options = {});

/// int sigma dx over all segments by the composite trapezoid rule.
double stress_integral(const StressField& field, const InterconnectTree& tree, double t,
                       int points_per_segment = 1001);

} // namespace emstress
