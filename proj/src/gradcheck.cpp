#include "emstress/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace emstress {

double grad_check(const Objective& objective, const Eigen::VectorXd& x, int samples, double step,
                  unsigned long long seed, double floor)
{
    if (!(step > 0.0))
        throw std::invalid_argument("grad_check step must be positive");
    Eigen::VectorXd grad(x.size());
    objective(x, grad);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(x.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto count = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(samples, 0)));

    double worst = 0.0;
    Eigen::VectorXd probe = x;
    Eigen::VectorXd scratch(x.size());
    for (std::size_t k = 0; k < count; ++k) {
        const Eigen::Index i = order[k];
        probe[i] = x[i] + step;
        const double up = objective(probe, scratch).value;
        probe[i] = x[i] - step;
        const double down = objective(probe, scratch).value;
        probe[i] = x[i];
        const double fd = (up - down) / (2.0 * step);
        const double scale = std::max({std::abs(grad[i]), std::abs(fd), floor});
        worst = std::max(worst, std::abs(grad[i] - fd) / scale);
    }
    return worst;
}

} // namespace emstress
