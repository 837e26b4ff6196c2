#pragma once

#include "emstress/field.hpp"
#include "emstress/model.hpp"
#include "emstress/problem.hpp"

#include <memory>
#include <vector>

namespace emstress {

struct StressQuery {
    int segment = 0;
    double local = 0.0;   ///< m
    double t = 0.0;       ///< s
};

/// A trained model seen as a stress field in physical units.
class StpinnField final : public StressField {
public:
    StpinnField(std::shared_ptr<const StpinnModel> model, std::shared_ptr<const Problem> problem,
                double tau_ratio = 1.0);

    double stress(int segment, double local, double t) const override;
    /// Batched evaluation; one pass through the networks.
    std::vector<double> stress(const std::vector<StressQuery>& queries) const;

    const StpinnModel& model() const { return *model_; }
    const Problem& problem() const { return *problem_; }
    std::shared_ptr<const StpinnModel> model_ptr() const { return model_; }
    std::shared_ptr<const Problem> problem_ptr() const { return problem_; }
    double tau_ratio() const { return tau_ratio_; }

private:
    void check(const StressQuery& q) const;

    std::shared_ptr<const StpinnModel> model_;
    std::shared_ptr<const Problem> problem_;
    double tau_ratio_ = 1.0;
};

/// Stress under a diffusivity D_a* = ratio D_a. Constant temperature: the
/// field at ratio * t. Time-varying temperature: a one-channel model with its
/// learned time variable stretched by ratio about its value at t = 0.
std::shared_ptr<const StressField> rescale_diffusivity(std::shared_ptr<const StressField> field, double ratio,
                                                       ThermalCase kind);

} // namespace emstress
