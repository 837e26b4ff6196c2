#pragma once

#include "emstress/model.hpp"
#include "emstress/objective.hpp"
#include "emstress/sampling.hpp"

#include <vector>

namespace emstress {

class LossError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-term weights. The defaults give the plain unweighted sum. The anchor
/// term asks F itself to solve the constant-diffusivity equation
/// F_tau = kappa0_hat F_xx in its time input, which pins the learned time
/// transform to the integral of kappa / kappa0.
struct LossWeights {
    double f = 1.0;
    double b = 1.0;
    double i = 1.0;
    double c = 1.0;
    double anchor = 0.0;
};

/// r_hat = sigma_t - [kappa_x (sigma_x + G) + kappa sigma_xx], scaled units.
double residual_from_jet(const Jet2& sigma, double kappa_hat, double kappa_x_hat, double g_hat);

/// Residual of a model at one sample point.
double residual(const StpinnModel& model, const SamplePoint& point);

/// Evaluates the composite loss and its exact parameter gradient. Points are
/// grouped into fixed chunks at construction, so results do not depend on the
/// number of worker threads.
class LossFunction {
public:
    LossFunction(const StpinnModel& model, const CollocationSet& set, LossWeights weights = {},
                 double anchor_kappa_hat = 0.0, int chunk_size = 256);

    /// Loss at the model's current parameters; adds nothing to grad if null.
    Evaluation evaluate(const StpinnModel& model, Eigen::VectorXd* grad) const;

    /// Objective over the parameter vector of `model`, which it updates.
    Objective objective(StpinnModel& model) const;

    std::size_t chunk_count() const { return chunks_.size(); }

private:
    enum class Kind { residual, terminal, initial, junction };
    struct Chunk {
        Kind kind = Kind::residual;
        ModelBatch batch;
        Eigen::VectorXd kappa, kappa_x, g, normal;
        std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;   // junction member ranges
    };

    void add_chunks(Kind kind, const std::vector<SamplePoint>& points, int spatial_dim, int chunk_size);

    std::vector<Chunk> chunks_;
    LossWeights weights_;
    double anchor_kappa_ = 0.0;
    double n_f_ = 0, n_b_ = 0, n_i_ = 0, n_c_ = 0;
};

} // namespace emstress
