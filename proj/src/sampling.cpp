#include "emstress/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace emstress {

void SamplerConfig::validate() const
{
    const auto& c = counts;
    if (c.residual < 1 || c.terminal < 1 || c.junction < 1 || c.initial < 1)
        throw std::invalid_argument("sample counts must be positive");
    if (!(log_fraction >= 0.0 && log_fraction <= 1.0))
        throw std::invalid_argument("log_fraction must lie in [0, 1]");
    if (!(log_min_ratio > 0.0 && log_min_ratio < 1.0))
        throw std::invalid_argument("log_min_ratio must lie in (0, 1)");
}

std::vector<double> latin_hypercube(int n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out(static_cast<std::size_t>(std::max(n, 0)));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = (i + u(rng)) / n;
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

std::vector<double> sample_times(int n, double t_end, const SamplerConfig& cfg, std::mt19937_64& rng)
{
    const int n_log = static_cast<int>(std::floor(n * cfg.log_fraction));
    const int n_uniform = n - n_log;
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(n));
    for (double u : latin_hypercube(n_uniform, rng))
        times.push_back(u * t_end);
    const double lo = std::log(cfg.log_min_ratio * t_end);
    const double hi = std::log(t_end);
    for (double u : latin_hypercube(n_log, rng))
        times.push_back(std::exp(lo + u * (hi - lo)));
    std::shuffle(times.begin(), times.end(), rng);
    return times;
}

std::vector<std::pair<int, double>> sample_positions(const InterconnectTree& tree, int n, std::mt19937_64& rng)
{
    const double total = tree.total_length();
    std::vector<std::pair<int, double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (double u : latin_hypercube(n, rng)) {
        double s = u * total;
        int id = 0;
        for (const auto& seg : tree.segments()) {
            id = seg.id;
            if (s < seg.length)
                break;
            s -= seg.length;
        }
        const double len = tree.segment(id).length;
        out.emplace_back(id, std::clamp(s, 0.0, len));
    }
    return out;
}

CollocationSet sample_collocation(const Problem& problem, const SamplerConfig& cfg)
{
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const auto& c = cfg.counts;
    CollocationSet set;

    {
        const auto pos = sample_positions(problem.tree, c.residual, rng);
        const auto times = sample_times(c.residual, problem.t_end, cfg, rng);
        set.residual.reserve(pos.size());
        for (std::size_t i = 0; i < pos.size(); ++i)
            set.residual.push_back(make_sample(problem, pos[i].first, pos[i].second, times[i]));
    }
    {
        const auto& terms = problem.domain.terminals();
        const auto times = sample_times(c.terminal, problem.t_end, cfg, rng);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto& tp = terms[i % terms.size()].point;
            set.terminal.push_back(make_sample(problem, tp.segment, tp.local, times[i], tp.orientation));
        }
    }
    {
        const auto pos = sample_positions(problem.tree, c.initial, rng);
        for (const auto& [seg, local] : pos)
            set.initial.push_back(make_sample(problem, seg, local, 0.0));
    }
    const auto& groups = problem.domain.junction_groups();
    if (!groups.empty()) {
        const auto times = sample_times(c.junction, problem.t_end, cfg, rng);
        for (double t : times) {
            for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                const auto& g = groups[gi];
                JunctionBatch b;
                b.group = static_cast<int>(gi);
                b.t = t;
                b.first = set.junction_points.size();
                set.junction_points.push_back(
                    make_sample(problem, g.center.segment, g.center.local, t, g.center.orientation));
                for (const auto& m : g.neighbors)
                    set.junction_points.push_back(make_sample(problem, m.segment, m.local, t, m.orientation));
                b.count = set.junction_points.size() - b.first;
                set.junctions.push_back(b);
            }
        }
    }
    return set;
}

} // namespace emstress
