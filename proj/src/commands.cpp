#include "emstress/commands.hpp"
#include "emstress/checkpoint.hpp"
#include "emstress/compare.hpp"
#include "emstress/fdm.hpp"
#include "emstress/reference.hpp"
#include "emstress/stpinn_field.hpp"
#include "emstress/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace emstress {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::ofstream open_output(const std::string& path)
{
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty())
        std::filesystem::create_directories(parent, ec);
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write '" + path + "'");
    return os;
}

void close_output(std::ofstream& os, const std::string& path)
{
    os.close();
    if (!os)
        throw std::runtime_error("error while writing '" + path + "'");
}

std::vector<double> sorted_unique(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

void check_times(const std::vector<double>& times, double t_end, const char* what)
{
    for (double t : times)
        if (!(t >= 0.0 && t <= t_end))
            throw ConfigError(std::string(what) + " must lie in [0, t_end]");
}

// Key/value block that closes every command summary.
class Summary {
public:
    template <class T>
    void add(const std::string& key, const T& value)
    {
        std::ostringstream os;
        os << std::setprecision(10) << value;
        items_.emplace_back(key, os.str());
    }
    void print(std::ostream& out) const
    {
        out << "# key=value\n";
        for (const auto& [k, v] : items_)
            out << k << '=' << v << '\n';
    }

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

void write_stress_rows(std::ostream& os, const std::vector<StressQuery>& q, const std::vector<double>& s)
{
    os << "segment_id,x_m,t_s,sigma_pa\n" << std::setprecision(17);
    for (std::size_t i = 0; i < q.size(); ++i)
        os << q[i].segment << ',' << q[i].local << ',' << q[i].t << ',' << s[i] << '\n';
}

std::vector<StressQuery> read_points(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open points file '" + path + "'");
    std::vector<StressQuery> q;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("segment_id", 0) == 0)
            continue;
        std::istringstream ls(line);
        StressQuery p;
        char c1 = 0, c2 = 0;
        if (!(ls >> p.segment >> c1 >> p.local >> c2 >> p.t) || c1 != ',' || c2 != ',')
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected segment_id,x_m,t_s");
        q.push_back(p);
    }
    return q;
}

struct LoadedModel {
    std::shared_ptr<const Problem> problem;
    std::shared_ptr<const StpinnModel> model;
    std::shared_ptr<const StpinnField> field;
};

LoadedModel load_model(const RunConfig& config, const std::string& checkpoint)
{
    LoadedModel m;
    m.problem = std::make_shared<const Problem>(config.problem());
    const std::string path = checkpoint.empty() ? config.output.path(config.output.checkpoint) : checkpoint;
    m.model = std::make_shared<const StpinnModel>(load_checkpoint(path));

    const Architecture want = config.architecture(*m.problem);
    const Architecture& got = m.model->architecture();
    std::ostringstream why;
    if (got.spatial_dim != want.spatial_dim)
        why << " input dimension " << got.spatial_dim << " vs " << want.spatial_dim << ";";
    if (got.channels != want.channels)
        why << " channels " << got.channels << " vs " << want.channels << ";";
    if (got.ft_hidden != want.ft_hidden || got.f_hidden != want.f_hidden)
        why << " hidden layer sizes differ;";
    if (got.g_input != want.g_input)
        why << " g_input differs;";
    if (got.activation != want.activation)
        why << " activation differs;";
    const auto& a = m.model->scaling();
    const auto& b = config.scaling;
    if (a.sigma != b.sigma || a.x != b.x || a.t != b.t)
        why << " scaling factors differ;";
    if (!why.str().empty())
        throw ConfigError("checkpoint '" + path + "' does not match the configuration:" + why.str());
    m.field = std::make_shared<const StpinnField>(m.model, m.problem);
    return m;
}

FdmSettings fdm_for(const RunConfig& config, std::vector<double> times)
{
    FdmSettings s = config.fdm_settings();
    s.output_times = sorted_unique(std::move(times));
    return s;
}

} // namespace

int cmd_solve_fdm(const RunConfig& config, std::ostream& out)
{
    const Problem problem = config.problem();
    check_times(config.output.times, config.t_end, "output.times");
    // Dense log grid so the nucleation search interpolates between close snapshots.
    std::vector<double> times = config.output.times;
    const auto dense = log_times(400, config.t_end * 1e-7, config.t_end);
    times.insert(times.end(), dense.begin(), dense.end());
    times.push_back(0.0);

    const auto start = Clock::now();
    const FdmSolution sol = fdm_solve(problem.tree, problem.thermal, problem.material, fdm_for(config, times));
    const double solve_s = seconds_since(start);

    const std::string csv = config.output.path(config.output.stress_csv);
    auto os = open_output(csv);
    sol.write_csv(os, config.output.times);
    close_output(os, csv);

    NucleationOptions opts;
    opts.points_per_segment = config.fdm.points_per_segment;
    const auto nucleation = nucleation_time(sol, problem.tree, problem.material, config.t_end, opts);
    const double peak = max_tree_stress(sol, problem.tree, config.t_end, config.fdm.points_per_segment);

    out << "solve-fdm: " << problem.tree.segments().size() << " segments, " << sol.unknowns() << " unknowns, "
        << sol.step_count() << " steps in " << std::setprecision(4) << solve_s << " s\n";
    out << "wrote " << csv << " (" << config.output.times.size() << " times)\n";
    out << "max stress at t_end: " << std::setprecision(6) << peak << " Pa\n";
    if (nucleation)
        out << "nucleation time: " << *nucleation << " s\n";
    else
        out << "immortal\n";

    Summary s;
    s.add("command", "solve-fdm");
    s.add("status", "ok");
    s.add("scheme", to_string(config.fdm.scheme));
    s.add("unknowns", sol.unknowns());
    s.add("steps", sol.step_count());
    s.add("seconds", solve_s);
    s.add("max_stress_pa", peak);
    s.add("nucleation_time_s", nucleation ? std::to_string(*nucleation) : std::string("immortal"));
    s.add("stress_csv", csv);
    s.print(out);
    return 0;
}

int cmd_train(const RunConfig& config, std::ostream& out)
{
    const Problem problem = config.problem();
    StpinnModel model(config.architecture(problem), config.scaling);
    model.initialize(config.training.seed);
    const CollocationSet set = sample_collocation(problem, config.sampling);
    const LossFunction loss(model, set, config.loss_weights, config.anchor_kappa_hat(), config.chunk_size);

    auto progress = [](const HistoryRecord& r) {
        if (r.iter % 500 == 0)
            std::cerr << to_string(r.phase) << ' ' << r.iter << " loss " << std::setprecision(6) << r.eval.value
                      << " |g| " << r.grad_norm << '\n';
    };
    const TrainResult result = train(model, loss, config.training, progress);

    const std::string history = config.output.path(config.output.history);
    auto hs = open_output(history);
    write_history_csv(hs, result.history);
    close_output(hs, history);

    const std::string ckpt = config.output.path(config.output.checkpoint);
    if (!result.aborted)
        save_checkpoint(model, ckpt);

    const auto& t = result.final.terms;
    out << "train: " << model.parameter_count() << " parameters, " << set.residual.size() << " residual points, "
        << set.junctions.size() << " junction batches\n";
    out << "adam " << result.adam.iterations << " iterations (" << to_string(result.adam.status) << "), lbfgs "
        << result.lbfgs.iterations << " iterations (" << to_string(result.lbfgs.status) << ")\n";
    out << std::setprecision(6) << "final loss " << result.final.value << " (f " << t.f << ", b " << t.b << ", i "
        << t.i << ", c " << t.c << ") in " << result.seconds << " s\n";
    if (result.aborted)
        out << "training aborted on a non-finite loss; history is partial and no checkpoint was written\n";
    else
        out << "wrote " << ckpt << " and " << history << "\n";

    Summary s;
    s.add("command", "train");
    s.add("status", result.aborted ? "aborted" : "ok");
    s.add("parameters", model.parameter_count());
    s.add("adam_iterations", result.adam.iterations);
    s.add("adam_status", to_string(result.adam.status));
    s.add("lbfgs_iterations", result.lbfgs.iterations);
    s.add("lbfgs_status", to_string(result.lbfgs.status));
    s.add("loss_total", result.final.value);
    s.add("mse_f", t.f);
    s.add("mse_b", t.b);
    s.add("mse_i", t.i);
    s.add("mse_c", t.c);
    if (config.loss_weights.anchor > 0.0)
        s.add("mse_anchor", t.anchor);
    s.add("grad_norm", result.final_grad_norm);
    s.add("seconds", result.seconds);
    s.add("history", history);
    s.add("checkpoint", result.aborted ? std::string("none") : ckpt);
    s.print(out);
    return result.aborted ? 2 : 0;
}

int cmd_eval(const RunConfig& config, const EvalOptions& options, std::ostream& out)
{
    const LoadedModel m = load_model(config, options.checkpoint);
    const double ratio = options.ratio.value_or(config.eval.ratio);

    std::vector<StressQuery> queries;
    if (!options.points_file.empty()) {
        queries = read_points(options.points_file);
    } else {
        check_times(config.output.times, config.t_end, "output.times");
        for (double t : config.output.times) {
            const auto g = grid_queries(m.problem->tree, config.eval.points_per_segment, t);
            queries.insert(queries.end(), g.begin(), g.end());
        }
    }

    std::shared_ptr<const StressField> field = m.field;
    if (ratio != 1.0)
        field = rescale_diffusivity(field, ratio, config.thermal.kind);

    const auto start = Clock::now();
    const auto sigma = sample_field(*field, queries);
    const double eval_s = seconds_since(start);

    const std::string csv = options.output.empty() ? config.output.path(config.output.eval_csv) : options.output;
    auto os = open_output(csv);
    os << "# stpinn ratio=" << std::setprecision(17) << ratio << '\n';
    write_stress_rows(os, queries, sigma);
    close_output(os, csv);

    out << "eval: " << queries.size() << " points in " << std::setprecision(4) << eval_s << " s, ratio " << ratio
        << "\nwrote " << csv << "\n";
    Summary s;
    s.add("command", "eval");
    s.add("status", "ok");
    s.add("points", queries.size());
    s.add("ratio", ratio);
    s.add("seconds", eval_s);
    s.add("eval_csv", csv);
    s.print(out);
    return 0;
}

int cmd_compare(const RunConfig& config, const CompareOptions& options, std::ostream& out)
{
    const LoadedModel m = load_model(config, options.checkpoint);
    const Problem& problem = *m.problem;

    CompareSettings cs;
    cs.points_per_segment = config.eval.points_per_segment;
    cs.ws_times = config.compare.ws_times;
    cs.ws_t_min = config.compare.ws_t_min;
    cs.ws_t_max = config.compare.ws_t_max;
    cs.js_times = config.compare.js_times;

    // Reference snapshots at every time the metrics read.
    const double ws_max = std::min(cs.ws_t_max, config.t_end);
    std::vector<double> times = log_times(cs.ws_times, std::min(cs.ws_t_min, ws_max), ws_max);
    for (int k = 0; k < cs.js_times; ++k)
        times.push_back(config.t_end * k / (cs.js_times - 1));

    auto start = Clock::now();
    const FdmSolution ref = fdm_solve(problem.tree, problem.thermal, problem.material, fdm_for(config, times));
    const double fdm_s = seconds_since(start);
    const CompareReport report = compare_fields(ref, *m.field, problem, cs);

    // Timing on arbitrary points: the model answers directly, the solver has
    // to march to the latest queried time and interpolate its snapshots.
    std::mt19937_64 rng(config.sampling.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<StressQuery> queries;
    for (int i = 0; i < options.speed_points; ++i) {
        const int seg = static_cast<int>(rng() % problem.tree.segments().size());
        queries.push_back({seg, problem.tree.segment(seg).length * u(rng), config.t_end * u(rng)});
    }
    start = Clock::now();
    const auto nn = m.field->stress(queries);
    const double model_s = seconds_since(start);
    start = Clock::now();
    FdmSettings all = config.fdm_settings();
    all.output_times.clear();
    const FdmSolution rerun = fdm_solve(problem.tree, problem.thermal, problem.material, all);
    const auto fd = sample_field(rerun, queries);
    const double rerun_s = seconds_since(start);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < nn.size(); ++i) {
        diff += std::abs(nn[i] - fd[i]);
        scale = std::max(scale, std::abs(fd[i]));
    }
    const double point_error = nn.empty() || scale == 0.0 ? 0.0 : diff / static_cast<double>(nn.size()) / scale;
    const double speedup = model_s > 0.0 ? rerun_s / model_s : 0.0;

    std::ostringstream text;
    text << std::setprecision(6);
    text << "compare: model vs finite differences (" << config.fdm.points_per_segment << " points/segment)\n";
    text << "whole stress error per time:\n";
    for (std::size_t i = 0; i < report.ws_times.size(); ++i)
        text << "  t = " << report.ws_times[i] << " s  " << 100.0 * report.ws_errors[i] << " %\n";
    text << "W.S. " << 100.0 * report.ws << " %\n";
    if (report.junction_nodes.empty()) {
        text << "J.S. n/a (no junctions)\n";
    } else {
        for (std::size_t i = 0; i < report.junction_nodes.size(); ++i)
            text << "  junction node " << report.junction_nodes[i] << "  " << 100.0 * report.js_errors[i] << " %\n";
        text << "J.S. " << 100.0 * report.js << " %\n";
    }
    text << "timing: " << queries.size() << " points, model " << model_s << " s, solver rerun " << rerun_s
         << " s, speedup " << speedup << "x, mean relative difference " << 100.0 * point_error << " %\n";

    Summary s;
    s.add("command", "compare");
    s.add("status", "ok");
    s.add("ws", report.ws);
    s.add("js", report.js);   // NaN without junctions
    for (std::size_t i = 0; i < report.ws_times.size(); ++i)
        s.add("ws_" + std::to_string(i), report.ws_errors[i]);
    s.add("fdm_seconds", fdm_s);
    s.add("speed_points", queries.size());
    s.add("model_seconds", model_s);
    s.add("rerun_seconds", rerun_s);
    s.add("speedup", speedup);
    s.add("speed_point_error", point_error);

    std::ostringstream block;
    s.print(block);
    const std::string path = config.output.path(config.output.report);
    auto os = open_output(path);
    os << text.str() << block.str();
    close_output(os, path);
    out << text.str() << "wrote " << path << "\n" << block.str();
    return 0;
}

std::string csv_schemas()
{
    return "stress (solve-fdm, eval): segment_id,x_m,t_s,sigma_pa\n"
           "  one leading '#' line describes the run; x_m is the position along the segment from node_a\n"
           "points (eval --points): segment_id,x_m,t_s\n"
           "  a header line and '#' lines are skipped\n"
           "history (train): iter,phase,total,mse_f,mse_b,mse_i,mse_c,grad_norm\n"
           "  phase is adam or lbfgs; total includes every weighted term\n"
           "summaries: text, then '# key=value' followed by one key=value per line\n";
}

} // namespace emstress
