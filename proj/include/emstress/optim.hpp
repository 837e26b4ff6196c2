#pragma once

#include "emstress/objective.hpp"

#include <Eigen/Core>

#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace emstress {

class OptimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrainingConfig {
    int adam_iters = 5000;
    double adam_lr = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int lbfgs_max_iters = 20000;
    int lbfgs_memory = 50;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    double grad_tol = 1e-8;
    double loss_tol = 0.0;   ///< relative change of the loss; 0 disables
    unsigned long long seed = 1234;

    void validate() const;
};

/// Xavier-uniform weights in +-sqrt(6 / (fan_in + fan_out)) and zero biases,
/// laid out per layer as W (out x in, row-major) followed by b.
Eigen::VectorXd xavier_init(const std::vector<std::pair<int, int>>& shapes, std::mt19937_64& rng);
Eigen::VectorXd xavier_init(const std::vector<std::pair<int, int>>& shapes, unsigned long long seed);

enum class Phase { adam, lbfgs };
const char* to_string(Phase p);

struct HistoryRecord {
    int iter = 0;
    Phase phase = Phase::adam;
    Evaluation eval;
    double grad_norm = 0.0;
};

using HistoryCallback = std::function<void(const HistoryRecord&)>;

enum class OptimStatus { max_iters, grad_tol, loss_tol, line_search_failed, non_finite };
const char* to_string(OptimStatus s);

struct AdamResult {
    OptimStatus status = OptimStatus::max_iters;
    int iterations = 0;
    Evaluation last;   ///< loss at the last evaluated iterate
};

/// Bias-corrected Adam with a constant learning rate. Stops early with
/// status non_finite, keeping the last finite parameters.
AdamResult adam_minimize(const Objective& objective, Eigen::VectorXd& x, const TrainingConfig& config,
                         const HistoryCallback& on_step = {});

/// Acceptance record of one line search.
struct WolfeRecord {
    double alpha = 0.0;
    double f0 = 0.0;
    double slope0 = 0.0;     ///< g0 . d
    double f = 0.0;
    double slope = 0.0;      ///< g(alpha) . d
    bool armijo = false;
    bool curvature = false;  ///< strong form |g . d| <= c2 |g0 . d|
};

struct LbfgsResult {
    OptimStatus status = OptimStatus::max_iters;
    int iterations = 0;
    int evaluations = 0;
    Evaluation last;
    double grad_norm = 0.0;
    std::vector<WolfeRecord> steps;   ///< filled when record_steps is set
};

/// Limited-memory BFGS with the two-loop recursion and a strong-Wolfe line
/// search. Curvature pairs with s.y <= 0 are skipped. A failed line search
/// stops the run and leaves x at the best iterate seen.
LbfgsResult lbfgs_minimize(const Objective& objective, Eigen::VectorXd& x, const TrainingConfig& config,
                           const HistoryCallback& on_step = {}, bool record_steps = false);

} // namespace emstress
