#include "emstress/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <queue>

namespace emstress {

SteadyState::SteadyState(const InterconnectTree& tree, const MaterialParams& params)
{
    const auto& segs = tree.segments();
    lines_.resize(segs.size());
    nodes_.assign(tree.nodes().size(), 0.0);
    std::vector<char> seen(tree.nodes().size(), 0);

    // Walk the tree from node 0: sigma(node_b) = sigma(node_a) - G L.
    std::queue<int> queue;
    queue.push(0);
    seen[0] = 1;
    while (!queue.empty()) {
        const int n = queue.front();
        queue.pop();
        for (const auto& inc : tree.node(n).incident) {
            const auto& s = tree.segment(inc.segment);
            const int other = inc.orientation > 0 ? s.node_b : s.node_a;
            if (seen[static_cast<std::size_t>(other)])
                continue;
            const double drop = em_driving_force(params, s.current_density) * s.length;
            nodes_[static_cast<std::size_t>(other)] =
                nodes_[static_cast<std::size_t>(n)] + (inc.orientation > 0 ? -drop : drop);
            seen[static_cast<std::size_t>(other)] = 1;
            queue.push(other);
        }
    }

    double integral = 0.0;
    for (const auto& s : segs) {
        const double g = em_driving_force(params, s.current_density);
        lines_[static_cast<std::size_t>(s.id)] = {nodes_[static_cast<std::size_t>(s.node_a)], -g};
        integral += s.length * nodes_[static_cast<std::size_t>(s.node_a)] - 0.5 * g * s.length * s.length;
    }
    const double shift = -integral / tree.total_length();
    for (auto& line : lines_)
        line.start += shift;
    for (auto& v : nodes_)
        v += shift;
}

double SteadyState::stress(int segment, double local, double) const
{
    const auto& line = lines_.at(static_cast<std::size_t>(segment));
    return line.start + line.slope * local;
}

SeriesValue series_solution_single_wire(double length, double kappa_const, double force, double x, double t,
                                        int n_terms)
{
    if (n_terms < 1)
        throw ReferenceError("series solution needs at least one term");
    if (!(length > 0.0) || !(kappa_const > 0.0))
        throw ReferenceError("series solution needs positive length and diffusivity");
    constexpr double pi = std::numbers::pi;
    double transient = 0.0;
    for (int k = 0; k < n_terms; ++k) {
        const double n = 2.0 * k + 1.0;
        const double c = 4.0 * force * length / (n * n * pi * pi);
        const double lambda = n * pi / length;
        transient += c * std::cos(lambda * x) * std::exp(-kappa_const * lambda * lambda * t);
    }
    SeriesValue out;
    out.value = force * (0.5 * length - x) - transient;
    // sum over odd n >= 2K+1 of 1/n^2 <= 1 / (2 (2K - 1))
    out.tail_bound = 4.0 * std::abs(force) * length / (pi * pi) / (2.0 * (2.0 * n_terms - 1.0));
    return out;
}

TimeTransformCurve::TimeTransformCurve(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values))
{
    if (times_.size() != values_.size() || times_.size() < 2)
        throw ReferenceError("time transform curve needs matching samples");
}

double TimeTransformCurve::operator()(double t) const
{
    if (t <= times_.front())
        return values_.front();
    if (t >= times_.back())
        return values_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const auto k = static_cast<std::size_t>(it - times_.begin());
    const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
    return (1.0 - w) * values_[k - 1] + w * values_[k];
}

TimeTransformCurve integrate_time_transform(const std::function<double(double)>& rate, double t_end, int steps)
{
    if (steps < 1)
        throw ReferenceError("time transform integration needs at least one step");
    if (!(t_end > 0.0))
        throw ReferenceError("time transform integration needs t_end > 0");
    const double h = t_end / steps;
    std::vector<double> times(static_cast<std::size_t>(steps) + 1);
    std::vector<double> values(times.size());
    double y = 0.0;
    for (int k = 0; k <= steps; ++k) {
        const double t = (k == steps) ? t_end : k * h;
        times[static_cast<std::size_t>(k)] = t;
        values[static_cast<std::size_t>(k)] = y;
        if (k == steps)
            break;
        // The right-hand side depends on t only, so k2 == k3.
        const double k1 = rate(t);
        const double k2 = rate(t + 0.5 * h);
        const double k3 = k2;
        const double k4 = rate(t + h);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(k1 > 0.0 && k2 > 0.0 && k4 > 0.0))
            throw ReferenceError("time transform rate must stay positive");
    }
    return TimeTransformCurve(std::move(times), std::move(values));
}

double node_kappa(const ThermalModel& thermal, const MaterialParams& params, double t)
{
    return kappa(params, thermal.node_temperature(t));
}

double mean_node_kappa(const ThermalModel& thermal, const MaterialParams& params, double t_end, int steps)
{
    if (thermal.kind == ThermalCase::constant || !(t_end > 0.0))
        return node_kappa(thermal, params, 0.0);
    const auto curve = integrate_time_transform(
        [&](double t) { return node_kappa(thermal, params, t); }, t_end, steps);
    return curve.values().back() / t_end;
}

double max_tree_stress(const StressField& field, const InterconnectTree& tree, double t, int points_per_segment)
{
    const int m = std::max(points_per_segment, 2);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : tree.segments()) {
        for (int i = 0; i < m; ++i) {
            const double x = (i == m - 1) ? s.length : s.length * i / (m - 1);
            best = std::max(best, field.stress(s.id, x, t));
        }
    }
    return best;
}

std::optional<double> nucleation_time(const StressField& field, const InterconnectTree& tree,
                                      const MaterialParams& params, double t_max, const NucleationOptions& options)
{
    const double crit = params.critical_stress;
    if (crit <= 0.0)
        return 0.0;
    if (!(t_max > 0.0))
        return std::nullopt;
    auto reached = [&](double t) { return max_tree_stress(field, tree, t, options.points_per_segment) >= crit; };

    const int n = std::max(options.scan_points, 2);
    const double t_min = t_max * 1e-8;
    double lo = 0.0;
    double hi = -1.0;
    for (int k = 0; k < n; ++k) {
        const double t = (k == n - 1) ? t_max : t_min * std::pow(t_max / t_min, static_cast<double>(k) / (n - 1));
        if (reached(t)) {
            hi = t;
            break;
        }
        lo = t;
    }
    if (hi < 0.0)
        return std::nullopt;
    while (hi - lo > options.rel_tol * 0.25 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (reached(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double stress_integral(const StressField& field, const InterconnectTree& tree, double t, int points_per_segment)
{
    const int m = std::max(points_per_segment, 2);
    double total = 0.0;
    for (const auto& s : tree.segments()) {
        const double h = s.length / (m - 1);
        double sum = 0.5 * (field.stress(s.id, 0.0, t) + field.stress(s.id, s.length, t));
        for (int i = 1; i < m - 1; ++i)
            sum += field.stress(s.id, i * h, t);
        total += sum * h;
    }
    return total;
}

} // namespace emstress
