#include "emstress/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace emstress {

std::vector<StressQuery> grid_queries(const InterconnectTree& tree, int points_per_segment, double t)
{
    std::vector<StressQuery> q;
    q.reserve(tree.segments().size() * static_cast<std::size_t>(points_per_segment));
    for (const auto& seg : tree.segments())
        for (int i = 0; i < points_per_segment; ++i)
            q.push_back({seg.id, seg.length * i / (points_per_segment - 1), t});
    return q;
}

std::vector<double> sample_field(const StressField& field, const std::vector<StressQuery>& queries)
{
    if (const auto* nn = dynamic_cast<const StpinnField*>(&field))
        return nn->stress(queries);
    std::vector<double> out;
    out.reserve(queries.size());
    for (const auto& q : queries)
        out.push_back(field.stress(q.segment, q.local, q.t));
    return out;
}

double profile_error(const StressField& reference, const StressField& field, const InterconnectTree& tree, double t,
                     int points_per_segment)
{
    const auto q = grid_queries(tree, points_per_segment, t);
    const auto a = sample_field(reference, q);
    const auto b = sample_field(field, q);
    double scale = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(a[i]));
        sum += std::abs(a[i] - b[i]);
    }
    const double mean = sum / static_cast<double>(a.size());
    if (scale == 0.0)
        return mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return mean / scale;
}

std::vector<double> log_times(int n, double t_min, double t_max)
{
    if (n == 1)
        return {t_max};
    std::vector<double> t(static_cast<std::size_t>(n));
    const double a = std::log10(t_min), b = std::log10(t_max);
    for (int i = 0; i < n; ++i)
        t[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
    return t;
}

CompareReport compare_fields(const StressField& reference, const StressField& field, const Problem& problem,
                             const CompareSettings& settings)
{
    CompareReport r;
    const double t_max = std::min(settings.ws_t_max, problem.t_end);
    r.ws_times = log_times(settings.ws_times, std::min(settings.ws_t_min, t_max), t_max);
    for (double t : r.ws_times)
        r.ws_errors.push_back(profile_error(reference, field, problem.tree, t, settings.points_per_segment));
    r.ws = 0.0;
    for (double e : r.ws_errors)
        r.ws += e;
    r.ws /= static_cast<double>(r.ws_errors.size());

    const auto& groups = problem.domain.junction_groups();
    if (groups.empty()) {
        r.js = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    const int nt = settings.js_times;
    std::vector<StressQuery> ref_q, nn_q;
    for (const auto& g : groups) {
        for (int k = 0; k < nt; ++k) {
            const double t = problem.t_end * k / (nt - 1);
            ref_q.push_back({g.center.segment, g.center.local, t});
            nn_q.push_back({g.center.segment, g.center.local, t});
            for (const auto& m : g.neighbors)
                nn_q.push_back({m.segment, m.local, t});
        }
    }
    const auto ref = sample_field(reference, ref_q);
    const auto nn = sample_field(field, nn_q);
    std::size_t ri = 0, ni = 0;
    double total = 0.0;
    for (const auto& g : groups) {
        const std::size_t members = g.neighbors.size() + 1;
        double scale = 0.0, sum = 0.0;
        for (int k = 0; k < nt; ++k) {
            double mean = 0.0;
            for (std::size_t m = 0; m < members; ++m)
                mean += nn[ni++];
            mean /= static_cast<double>(members);
            scale = std::max(scale, std::abs(ref[ri]));
            sum += std::abs(mean - ref[ri]);
            ++ri;
        }
        sum /= nt;
        const double e = scale > 0.0 ? sum / scale : (sum == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        r.junction_nodes.push_back(g.node);
        r.js_errors.push_back(e);
        total += e;
    }
    r.js = total / static_cast<double>(groups.size());
    return r;
}

JunctionCheck junction_check(const StpinnModel& model, const Problem& problem, int times, unsigned long long seed)
{
    JunctionCheck out;
    out.times = times;
    const auto& groups = problem.domain.junction_groups();
    if (groups.empty())
        return out;

    const auto& sc = problem.scaling;
    double g_max = 0.0;
    for (const auto& seg : problem.tree.segments())
        g_max = std::max(g_max, std::abs(em_driving_force(problem.material, seg.current_density)));
    const double g_hat_max = sc.scale_force(g_max);
    const double stress_scale = sc.scale_stress(g_max * problem.tree.total_length() / 2.0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double gap = 0.0, flux = 0.0, kappa_max = 0.0;
    for (int k = 0; k < times; ++k) {
        const double t = problem.t_end * (1.0 - u(rng));
        for (const auto& g : groups) {
            const auto eval = [&](const JunctionMember& m) {
                const auto p = make_sample(problem, m.segment, m.local, t, m.orientation);
                kappa_max = std::max(kappa_max, p.kappa_hat);
                const Jet2 s = model.forward(p.coord, p.dir, p.g_hat, p.t_hat);
                return std::pair{s.value, p.kappa_hat * (s.d_dx + p.g_hat) * p.normal};
            };
            const auto [sc_val, sc_flux] = eval(g.center);
            double net = sc_flux;
            for (const auto& m : g.neighbors) {
                const auto [v, f] = eval(m);
                gap = std::max(gap, std::abs(v - sc_val));
                net += f;
            }
            flux = std::max(flux, std::abs(net));
        }
    }
    out.continuity = stress_scale > 0.0 ? gap / stress_scale : gap;
    const double flux_scale = kappa_max * g_hat_max;
    out.flux = flux_scale > 0.0 ? flux / flux_scale : flux;
    return out;
}

} // namespace emstress
