// Acceptance runner: trains the desk-scale two-segment models and checks every
// criterion at its stated tolerance. One PASS/FAIL line per criterion.
//
// usage: acceptance <configs dir> <work dir> [criterion numbers...]

#include "checks.hpp"

#include "emstress/checkpoint.hpp"
#include "emstress/commands.hpp"
#include "emstress/compare.hpp"
#include "emstress/config.hpp"
#include "emstress/fdm.hpp"
#include "emstress/parallel.hpp"
#include "emstress/reference.hpp"
#include "emstress/stpinn_field.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace emstress;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4)
{
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

std::string pct(double v) { return fmt(100.0 * v) + "%"; }

std::map<std::string, std::string> key_values(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    bool block = false;
    while (std::getline(is, line)) {
        if (line == "# key=value") {
            block = true;
            continue;
        }
        const auto eq = line.find('=');
        if (block && eq != std::string::npos)
            kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::string read_file(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// A trained two-segment model with its configuration and compare summary.
struct Trained {
    RunConfig config;
    std::shared_ptr<const Problem> problem;
    std::shared_ptr<const StpinnModel> model;
    std::map<std::string, std::string> compare;
    double train_seconds = 0.0;
};

class Runner {
public:
    Runner(fs::path configs, fs::path work) : configs_(std::move(configs)), work_(std::move(work)) {}

    const Trained& trained(int c)
    {
        auto it = cache_.find(c);
        if (it != cache_.end())
            return it->second;
        const std::string name = "two_segment_case" + std::to_string(c) + "_desk";
        const fs::path dir = work_ / name;
        fs::create_directories(dir);
        Trained t;
        t.config = load_config((configs_ / (name + ".yaml")).string(), {"output.dir=" + dir.string()});
        std::ostringstream log;
        std::cout << "  training " << name << " ..." << std::flush;
        if (cmd_train(t.config, log) != 0)
            throw std::runtime_error(name + ": training aborted on a non-finite loss");
        const auto tkv = key_values(log.str());
        t.train_seconds = std::stod(tkv.at("seconds"));
        std::cout << " loss " << tkv.at("loss_total") << " in " << fmt(t.train_seconds) << " s\n";

        CompareOptions opt;
        std::ostringstream cmp;
        cmd_compare(t.config, opt, cmp);
        t.compare = key_values(cmp.str());
        t.problem = std::make_shared<const Problem>(t.config.problem());
        t.model = std::make_shared<const StpinnModel>(
            load_checkpoint(t.config.output.path(t.config.output.checkpoint)));
        return cache_.emplace(c, std::move(t)).first->second;
    }

    const fs::path& work() const { return work_; }

private:
    fs::path configs_;
    fs::path work_;
    std::map<int, Trained> cache_;
};

// 1 ------------------------------------------------------------------------
Outcome physics_constants(Runner&)
{
    const double k = kappa(MaterialParams{}, 350.0);
    const double rel = std::abs(k - 1.4136e-18) / 1.4136e-18;
    return {rel <= 5e-3, "kappa(350 K) = " + fmt(k, 6) + " m^2/s, " + pct(rel) + " from 1.4136e-18 (tol 0.5%)"};
}

// 2 ------------------------------------------------------------------------
Outcome autodiff_oracle(Runner&)
{
    double jet = 0.0, grad = 0.0;
    for (int hidden : {1, 4, 16, 32, 64})
        for (unsigned long long seed = 1; seed <= 20; ++seed) {
            const auto e = checks::single_layer(hidden, 1000 * seed + hidden);
            jet = std::max(jet, e.jet);
            grad = std::max(grad, e.grad);
        }
    double fd = checks::multilayer_input_fd(7);
    Architecture arch;
    arch.f_hidden = {10, 10, 10};
    fd = std::max(fd, checks::loss_gradient_fd(checks::small_problem(ThermalCase::constant), arch, 41));
    arch.channels = 1;
    arch.ft_hidden = {8};
    fd = std::max(fd, checks::loss_gradient_fd(checks::small_problem(ThermalCase::time_varying), arch, 42, 0.5));
    arch.channels = 2;
    arch.ft_hidden = {6, 6};
    fd = std::max(fd, checks::loss_gradient_fd(checks::small_problem(ThermalCase::space_time), arch, 43));
    const bool ok = jet <= 1e-12 && grad <= 1e-10 && fd <= 1e-5;
    return {ok, "single-layer derivatives " + fmt(jet, 3) + " (tol 1e-12), (d2N/dx2)^2 gradient " + fmt(grad, 3) +
                    " (tol 1e-10), multi-layer finite differences " + fmt(fd, 3) + " (tol 1e-5)"};
}

// 3 ------------------------------------------------------------------------
Outcome fdm_series(Runner&)
{
    const MaterialParams mat;
    const double L = 20e-6, j = 4e10;
    const double k = kappa(mat, 350.0), g = em_driving_force(mat, j);
    const double tc = std::pow(L / std::numbers::pi, 2) / k;
    SegmentSpec spec;
    spec.length = L;
    spec.current_density = j;
    spec.node_a = 0;
    spec.node_b = 1;
    const auto tree = InterconnectTree::build({spec});
    ThermalModel th;
    th.kind = ThermalCase::constant;

    FdmSettings s;
    s.points_per_segment = 200;
    s.t_end = 20.0 * tc;
    s.dt = 0.05 * tc;
    s.first_dt = 1.0;
    s.growth = 1.01;
    const auto sol = fdm_solve(tree, th, mat, s);
    const auto x = sol.grid(0);

    FdmSettings at = s;
    at.t_end = tc;
    at.output_times = {0.1 * tc, tc};
    const auto snap = fdm_solve(tree, th, mat, at);
    double l2 = 0.0;
    for (std::size_t kk = 0; kk < 2; ++kk) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double ref = series_solution_single_wire(L, k, g, x[i], snap.times()[kk], 4000).value;
            num += std::pow(snap.value(0, static_cast<int>(i), kk) - ref, 2);
            den += ref * ref;
        }
        l2 = std::max(l2, std::sqrt(num / den));
    }

    double steady = 0.0;
    const std::size_t last = sol.times().size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i)
        steady = std::max(steady, std::abs(sol.value(0, static_cast<int>(i), last) - g * (L / 2 - x[i])));
    steady /= g * L / 2;

    double conservation = 0.0;
    for (std::size_t kk = 1; kk < sol.times().size(); ++kk) {
        double peak = 0.0, integral = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double v = sol.value(0, static_cast<int>(i), kk);
            peak = std::max(peak, std::abs(v));
            const double w = (i == 0 || i + 1 == x.size()) ? 0.5 : 1.0;
            integral += w * v * sol.spacing(0);
        }
        conservation = std::max(conservation, std::abs(integral) / (peak * L));
    }
    const bool ok = l2 < 5e-3 && steady <= 1e-3 && conservation < 1e-3;
    return {ok, "L2 vs series " + pct(l2) + " (tol 0.5%), steady state " + pct(steady) +
                    " (tol 0.1%), max |int sigma dx| / (max|sigma| L) " + fmt(conservation, 3) + " (tol 1e-3)"};
}

// 4 ------------------------------------------------------------------------
Outcome case1_accuracy(Runner& r)
{
    const auto& t = r.trained(1);
    const std::vector<double> times{5e5, 5e6, 5e7};
    FdmSettings s = t.config.fdm_settings();
    s.output_times = times;
    const auto ref = fdm_solve(t.problem->tree, t.problem->thermal, t.problem->material, s);
    const StpinnField field(t.model, t.problem);
    std::string detail;
    double worst = 0.0;
    for (double tt : times) {
        const double e = profile_error(ref, field, t.problem->tree, tt, 101);
        worst = std::max(worst, e);
        detail += "t=" + fmt(tt, 2) + " s: " + pct(e) + ", ";
    }
    const auto& tr = t.config.training;
    detail += "training " + fmt(t.train_seconds) + " s (Adam " + std::to_string(tr.adam_iters) + " + L-BFGS <= " +
              std::to_string(tr.lbfgs_max_iters) + "), tol 2%";
    return {worst <= 0.02, detail};
}

// 5 ------------------------------------------------------------------------
Outcome time_transform(Runner& r)
{
    const auto& t = r.trained(2);
    const auto& m = *t.model;
    if (m.channels() != 1)
        return {false, "Case II model is not a one-channel model"};
    const double t_end = std::min(1e8, t.problem->t_end);
    const double k0 = mean_node_kappa(t.problem->thermal, t.problem->material, t_end);
    const auto integral = integrate_time_transform(
        [&](double s) { return node_kappa(t.problem->thermal, t.problem->material, s) / k0; }, t_end, 20000);
    const int n = 1001;
    Eigen::VectorXd th(n);
    for (int i = 0; i < n; ++i)
        th[i] = t.problem->scaling.scale_t(t_end * i / (n - 1));
    const Eigen::MatrixXd ft = m.time_transform(th);
    const double scale = t.problem->scaling.scale_t(integral(t_end));
    double worst = 0.0, worst_t = 0.0;
    for (int i = 0; i < n; ++i) {
        const double tt = t_end * i / (n - 1);
        const double d = std::abs((ft(0, i) - ft(0, 0)) - t.problem->scaling.scale_t(integral(tt)));
        if (d > worst) {
            worst = d;
            worst_t = tt;
        }
    }
    const double rel = worst / scale;
    return {rel <= 5e-3, "max |F_t - integral| / integral(t_end) = " + pct(rel) + " at t = " + fmt(worst_t, 3) +
                             " s over [0, " + fmt(t_end, 2) + "] s (tol 0.5%)"};
}

// 6 ------------------------------------------------------------------------
Outcome table_errors(Runner& r)
{
    const auto& c2 = r.trained(2).compare;
    const auto& c3 = r.trained(3).compare;
    const double ws2 = std::stod(c2.at("ws")), js2 = std::stod(c2.at("js"));
    const double ws3 = std::stod(c3.at("ws")), js3 = std::stod(c3.at("js"));
    const bool ok = ws2 <= 0.03 && js2 <= 0.01 && ws3 <= 0.025 && js3 <= 0.01;
    return {ok, "Case II W.S. " + pct(ws2) + " (tol 3%), J.S. " + pct(js2) + " (tol 1%); Case III W.S. " + pct(ws3) +
                    " (tol 2.5%), J.S. " + pct(js3) + " (tol 1%)"};
}

// 7 ------------------------------------------------------------------------
Outcome junctions(Runner& r)
{
    double cont = 0.0, flux = 0.0;
    std::string detail;
    for (int c : {1, 2, 3}) {
        const auto& t = r.trained(c);
        const auto jc = junction_check(*t.model, *t.problem, 100, 99);
        cont = std::max(cont, jc.continuity);
        flux = std::max(flux, jc.flux);
        detail += "Case " + std::string(c == 1 ? "I" : c == 2 ? "II" : "III") + ": continuity " + pct(jc.continuity) +
                  ", flux " + pct(jc.flux) + "; ";
    }
    detail += "tol 1% each, 100 random times";
    return {cont < 0.01 && flux < 0.01, detail};
}

// 8 ------------------------------------------------------------------------
Outcome rescaling(Runner& r)
{
    const double ratio = 2.0;
    // Case I: exact reindexing.
    const auto& t1 = r.trained(1);
    auto base = std::make_shared<const StpinnField>(t1.model, t1.problem);
    const auto scaled = rescale_diffusivity(base, ratio, ThermalCase::constant);
    double exact = 0.0;
    for (double tt : log_times(10, 1e5, t1.problem->t_end / ratio)) {
        const auto q = grid_queries(t1.problem->tree, 101, tt);
        auto q2 = q;
        for (auto& e : q2)
            e.t *= ratio;
        const auto a = sample_field(*scaled, q), b = sample_field(*base, q2);
        double peak = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            diff = std::max(diff, std::abs(a[i] - b[i]));
            peak = std::max(peak, std::abs(b[i]));
        }
        exact = std::max(exact, diff / peak);
    }

    // Case II: learned time variable stretched, against a solve with 2 D_a.
    const auto& t2 = r.trained(2);
    auto field2 = std::make_shared<const StpinnField>(t2.model, t2.problem);
    const auto scaled2 = rescale_diffusivity(field2, ratio, ThermalCase::time_varying);
    MaterialParams fast = t2.problem->material;
    fast.self_diffusion *= ratio;
    const auto times = log_times(10, 1e5, t2.problem->t_end / ratio);
    FdmSettings s = t2.config.fdm_settings();
    s.output_times = times;
    const auto ref = fdm_solve(t2.problem->tree, t2.problem->thermal, fast, s);
    double ws = 0.0;
    for (double tt : times)
        ws += profile_error(ref, *scaled2, t2.problem->tree, tt, 101) / static_cast<double>(times.size());
    const bool ok = exact <= 1e-9 && ws <= 0.03;
    return {ok, "Case I ratio 2 vs base field at 2t: " + fmt(exact, 3) + " (tol 1e-9); Case II ratio 2 vs FDM with " +
                    "2 D_a: " + pct(ws) + " mean over t <= t_end/2 (tol 3%)"};
}

// 9 ------------------------------------------------------------------------
Outcome speedup(Runner& r)
{
    std::string detail;
    bool ok = true;
    for (int c : {2, 3}) {
        const auto& kv = r.trained(c).compare;
        const double sp = std::stod(kv.at("speedup"));
        ok = ok && sp >= 10.0;
        detail += "Case " + std::string(c == 2 ? "II" : "III") + ": " + fmt(sp, 3) + "x (model " +
                  fmt(std::stod(kv.at("model_seconds")), 3) + " s, solver " + fmt(std::stod(kv.at("rerun_seconds")), 3) +
                  " s, mean difference " + pct(std::stod(kv.at("speed_point_error"))) + "); ";
    }
    detail += std::to_string(10000) + " points, tol >= 10x";
    return {ok, detail};
}

// 10 -----------------------------------------------------------------------
Outcome determinism(Runner& r)
{
    const auto run = [&](const std::string& name) {
        const fs::path dir = r.work() / name;
        fs::remove_all(dir);
        fs::create_directories(dir);
        const std::string yaml = "t_end: 1.0e8\n"
                                 "tree:\n"
                                 "  segments:\n"
                                 "    - {length_um: 20, current_density: 4.0e10, node_a: 0, node_b: 1}\n"
                                 "    - {length_um: 30, current_density: -1.0e10, node_a: 1, node_b: 2}\n"
                                 "thermal: {case: III}\n"
                                 "sampling: {residual: 800, terminal: 100, junction: 100, initial: 100, seed: 17}\n"
                                 "model: {ft_hidden: [16], f_hidden: [16, 16, 16]}\n"
                                 "training: {adam_iters: 300, lbfgs_max_iters: 300, seed: 17, chunk_size: 64}\n"
                                 "output: {dir: " + dir.string() + "}\n";
        const RunConfig cfg = parse_config(yaml);
        std::ostringstream sink;
        cmd_train(cfg, sink);
        cmd_eval(cfg, {}, sink);
        return std::make_pair(read_file(cfg.output.path(cfg.output.checkpoint)),
                              read_file(cfg.output.path(cfg.output.eval_csv)));
    };
    const int before = thread_count();
    set_thread_count(2);
    const auto a = run("determinism_a");
    const auto b = run("determinism_b");
    set_thread_count(before);
    const bool ok = !a.first.empty() && a.first == b.first && a.second == b.second;
    return {ok, std::string("two seeded train+eval runs at 2 threads: checkpoints ") +
                    (a.first == b.first ? "identical" : "differ") + ", eval CSVs " +
                    (a.second == b.second ? "identical" : "differ") + " (" + std::to_string(a.first.size()) + " and " +
                    std::to_string(a.second.size()) + " bytes)"};
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 3) {
        std::cerr << "usage: acceptance <configs dir> <work dir> [criterion...]\n";
        return 2;
    }
    Runner runner(argv[1], argv[2]);
    fs::create_directories(argv[2]);
    std::set<int> only;
    for (int i = 3; i < argc; ++i)
        only.insert(std::stoi(argv[i]));

    const std::vector<std::pair<std::string, Outcome (*)(Runner&)>> criteria{
        {"physics constants", physics_constants},
        {"autodiff oracle", autodiff_oracle},
        {"FDM vs analytic series", fdm_series},
        {"Case I accuracy", case1_accuracy},
        {"one-channel time transform", time_transform},
        {"Case II/III error targets", table_errors},
        {"junction constraints", junctions},
        {"diffusivity rescaling", rescaling},
        {"speedup", speedup},
        {"determinism", determinism},
    };

    int failed = 0, run = 0;
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(number))
            continue;
        ++run;
        Outcome o;
        try {
            o = criteria[i].second(runner);
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::ostringstream line;
        line << "criterion " << number << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL") << "  "
             << o.detail;
        std::cout << line.str() << std::endl;
        lines.push_back(line.str());
    }
    std::cout << "\nsummary\n";
    for (const auto& l : lines)
        std::cout << l << "\n";
    std::cout << run - failed << "/" << run << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
