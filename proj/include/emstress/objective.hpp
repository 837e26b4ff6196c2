#pragma once

#include <Eigen/Core>

#include <functional>

namespace emstress {

/// Loss components in scaled units. `anchor` is the optional time-transform
/// anchoring term; it is zero unless enabled.
struct LossTerms {
    double f = 0.0;
    double b = 0.0;
    double i = 0.0;
    double c = 0.0;
    double anchor = 0.0;
};

struct Evaluation {
    double value = 0.0;
    LossTerms terms;
};

/// Returns the objective at x and writes its gradient into grad (resized by
/// the callee if needed).
using Objective = std::function<Evaluation(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Central-difference check of an objective's gradient over `samples`
/// randomly chosen coordinates. Returns the worst relative discrepancy
/// |g - g_fd| / max(|g|, |g_fd|, floor).
double grad_check(const Objective& objective, const Eigen::VectorXd& x, int samples, double step,
                  unsigned long long seed, double floor = 1e-12);

} // namespace emstress
