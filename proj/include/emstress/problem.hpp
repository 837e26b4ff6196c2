#pragma once

#include "emstress/geometry.hpp"
#include "emstress/model.hpp"
#include "emstress/physics.hpp"

namespace emstress {

/// Everything that defines one stress problem, independent of any solver.
struct Problem {
    InterconnectTree tree;
    UnfoldedDomain domain;
    MaterialParams material;
    ThermalModel thermal;
    ScalingConfig scaling;
    double t_end = 1e8;

    Problem(InterconnectTree tree, double virtual_distance, MaterialParams material, ThermalModel thermal,
            ScalingConfig scaling, double t_end);
};

/// A physical point with the scaled quantities the loss needs there.
struct SamplePoint {
    int segment = 0;
    double local = 0.0;       ///< m along the segment axis
    double t = 0.0;           ///< s
    Point2 coord;             ///< scaled unfolded coordinate
    Point2 dir;               ///< unit local axis
    double t_hat = 0.0;
    double g_hat = 0.0;
    double kappa_hat = 0.0;
    double kappa_x_hat = 0.0; ///< d kappa_hat / d x_hat along the axis
    int normal = 0;           ///< n_j for terminal and junction points
};

SamplePoint make_sample(const Problem& problem, int segment, double local, double t, int normal = 0);

/// Fills a model batch from sample points.
ModelBatch make_batch(const std::vector<SamplePoint>& points, int spatial_dim);

} // namespace emstress
