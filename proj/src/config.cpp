#include "emstress/config.hpp"
#include "emstress/reference.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace emstress {

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool is_index(const std::string& s)
{
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

void set_path(YAML::Node node, const std::vector<std::string>& parts, std::size_t i, const YAML::Node& value,
              const std::string& full)
{
    const std::string& key = parts[i];
    const bool last = i + 1 == parts.size();
    if (node.IsSequence()) {
        if (!is_index(key))
            throw ConfigError("override '" + full + "': '" + key + "' must be a list index");
        const auto idx = std::stoul(key);
        if (idx >= node.size())
            throw ConfigError("override '" + full + "': index " + key + " is out of range");
        if (last) {
            node[idx] = value;
            return;
        }
        set_path(node[idx], parts, i + 1, value, full);
        return;
    }
    if (!node.IsMap() && !node.IsNull())
        throw ConfigError("override '" + full + "': '" + key + "' is inside a scalar");
    if (last) {
        node[key] = value;
        return;
    }
    YAML::Node child = node[key];
    if (!child.IsDefined() || child.IsNull()) {
        node[key] = YAML::Node(YAML::NodeType::Map);
        child = node[key];
    }
    set_path(child, parts, i + 1, value, full);
}

void apply_override(YAML::Node& root, const std::string& item)
{
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + item + "' must look like key=value");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    YAML::Node value;
    try {
        value = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError("override '" + item + "': " + e.what());
    }
    set_path(root, split(key, '.'), 0, value, item);
}

class Section {
public:
    Section(const YAML::Node& node, std::string where, std::set<std::string> allowed)
        : node_(node), where_(std::move(where))
    {
        if (!node_.IsDefined() || node_.IsNull())
            return;
        if (!node_.IsMap())
            throw ConfigError(label() + " must be a mapping");
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key))
                throw ConfigError("unknown key '" + qualified(key) + "'");
        }
    }

    bool has(const std::string& key) const { return node_.IsMap() && node_[key].IsDefined() && !node_[key].IsNull(); }
    YAML::Node child(const std::string& key) const { return has(key) ? node_[key] : YAML::Node(); }
    std::string qualified(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

    template <class T>
    void get(const std::string& key, T& out) const
    {
        if (!has(key))
            return;
        try {
            out = node_[key].as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError("'" + qualified(key) + "' has the wrong type");
        }
    }

    /// Value given in micrometres, stored in metres.
    void get_um(const std::string& key, double& meters) const
    {
        double um = meters * 1e6;
        get(key, um);
        meters = um * 1e-6;
    }

private:
    std::string label() const { return where_.empty() ? "configuration" : "'" + where_ + "'"; }

    YAML::Node node_;
    std::string where_;
};

SegmentSpec parse_segment(const YAML::Node& n, std::size_t index)
{
    const std::string where = "tree.segments." + std::to_string(index);
    Section s(n, where,
              {"id", "length_um", "current_density", "node_a", "node_b", "width_um", "spacing_um", "direction_deg"});
    SegmentSpec seg;
    seg.id = static_cast<int>(index);
    s.get("id", seg.id);
    for (const char* required : {"length_um", "node_a", "node_b"})
        if (!s.has(required))
            throw ConfigError("'" + where + "." + required + "' is required");
    double length_um = 0.0;
    s.get("length_um", length_um);
    seg.length = length_um * 1e-6;
    s.get("current_density", seg.current_density);
    s.get("node_a", seg.node_a);
    s.get("node_b", seg.node_b);
    s.get_um("width_um", seg.width);
    s.get_um("spacing_um", seg.spacing);
    if (s.has("direction_deg")) {
        double deg = 0.0;
        s.get("direction_deg", deg);
        seg.direction_deg = deg;
    }
    return seg;
}

} // namespace

std::string OutputConfig::path(const std::string& file) const
{
    if (file.empty() || file.front() == '/' || dir.empty() || dir == ".")
        return file;
    return dir + "/" + file;
}

RunConfig parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides)
{
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("cannot parse configuration: ") + e.what());
    }
    if (root.IsNull() || !root.IsDefined())
        root = YAML::Node(YAML::NodeType::Map);
    for (const auto& o : overrides)
        apply_override(root, o);

    const Section top(root, "",
                      {"t_end", "tree", "material", "thermal", "scaling", "sampling", "model", "training", "fdm",
                       "output", "eval", "compare"});
    RunConfig cfg;
    top.get("t_end", cfg.t_end);

    {
        const Section tree(top.child("tree"), "tree", {"virtual_distance_um", "segments"});
        tree.get_um("virtual_distance_um", cfg.virtual_distance);
        const YAML::Node segs = tree.child("segments");
        if (!segs.IsDefined() || !segs.IsSequence() || segs.size() == 0)
            throw ConfigError("'tree.segments' must be a non-empty list");
        for (std::size_t i = 0; i < segs.size(); ++i)
            cfg.segments.push_back(parse_segment(segs[i], i));
    }
    {
        const Section m(top.child("material"), "material",
                        {"boltzmann", "charge", "effective_valence", "activation_energy_ev", "bulk_modulus",
                         "self_diffusion", "resistivity", "atomic_volume", "critical_stress", "atoms_per_volume"});
        auto& p = cfg.material;
        m.get("boltzmann", p.boltzmann);
        m.get("charge", p.charge);
        m.get("effective_valence", p.effective_valence);
        m.get("activation_energy_ev", p.activation_energy_ev);
        m.get("bulk_modulus", p.bulk_modulus);
        m.get("self_diffusion", p.self_diffusion);
        m.get("resistivity", p.resistivity);
        m.get("atomic_volume", p.atomic_volume);
        m.get("critical_stress", p.critical_stress);
        m.get("atoms_per_volume", p.atoms_per_volume);
    }
    {
        const Section t(top.child("thermal"), "thermal", {"case", "constant_k", "t0", "joule"});
        auto& th = cfg.thermal;
        if (t.has("case")) {
            std::string c;
            t.get("case", c);
            th.kind = thermal_case_from_string(c);
        }
        t.get("constant_k", th.constant_k);
        const Section t0(t.child("t0"), "thermal.t0", {"mean_k", "amplitude_k", "omega"});
        t0.get("mean_k", th.t0.mean_k);
        t0.get("amplitude_k", th.t0.amplitude_k);
        t0.get("omega", th.t0.omega);
        const Section j(t.child("joule"), "thermal.joule", {"k_m", "k_ild", "t_ild_um", "h_ild_um"});
        j.get("k_m", th.joule.k_metal);
        j.get("k_ild", th.joule.k_ild);
        j.get_um("t_ild_um", th.joule.t_ild);
        j.get_um("h_ild_um", th.joule.h_ild);
    }
    {
        const Section s(top.child("scaling"), "scaling", {"sigma", "x", "t"});
        s.get("sigma", cfg.scaling.sigma);
        s.get("x", cfg.scaling.x);
        s.get("t", cfg.scaling.t);
    }
    {
        const Section s(top.child("sampling"), "sampling",
                        {"residual", "terminal", "junction", "initial", "log_fraction", "log_min_ratio", "seed"});
        auto& sc = cfg.sampling;
        s.get("residual", sc.counts.residual);
        s.get("terminal", sc.counts.terminal);
        s.get("junction", sc.counts.junction);
        s.get("initial", sc.counts.initial);
        s.get("log_fraction", sc.log_fraction);
        s.get("log_min_ratio", sc.log_min_ratio);
        s.get("seed", sc.seed);
    }
    {
        const Section m(top.child("model"), "model", {"channels", "ft_hidden", "f_hidden", "g_input", "activation"});
        cfg.model = Architecture::default_for(cfg.thermal.kind);
        m.get("channels", cfg.model.channels);
        if (cfg.model.channels == 0)
            cfg.model.ft_hidden.clear();
        m.get("ft_hidden", cfg.model.ft_hidden);
        m.get("f_hidden", cfg.model.f_hidden);
        m.get("g_input", cfg.model.g_input);
        if (m.has("activation")) {
            std::string a;
            m.get("activation", a);
            cfg.model.activation = activation_from_string(a);
        }
    }
    {
        const Section t(top.child("training"), "training",
                        {"adam_iters", "adam_lr", "adam_beta1", "adam_beta2", "adam_eps", "lbfgs_max_iters",
                         "lbfgs_memory", "wolfe_c1", "wolfe_c2", "grad_tol", "loss_tol", "seed", "chunk_size",
                         "loss_weights"});
        auto& tc = cfg.training;
        t.get("adam_iters", tc.adam_iters);
        t.get("adam_lr", tc.adam_lr);
        t.get("adam_beta1", tc.adam_beta1);
        t.get("adam_beta2", tc.adam_beta2);
        t.get("adam_eps", tc.adam_eps);
        t.get("lbfgs_max_iters", tc.lbfgs_max_iters);
        t.get("lbfgs_memory", tc.lbfgs_memory);
        t.get("wolfe_c1", tc.wolfe_c1);
        t.get("wolfe_c2", tc.wolfe_c2);
        t.get("grad_tol", tc.grad_tol);
        t.get("loss_tol", tc.loss_tol);
        t.get("seed", tc.seed);
        t.get("chunk_size", cfg.chunk_size);
        const Section w(t.child("loss_weights"), "training.loss_weights", {"f", "b", "i", "c", "anchor"});
        w.get("f", cfg.loss_weights.f);
        w.get("b", cfg.loss_weights.b);
        w.get("i", cfg.loss_weights.i);
        w.get("c", cfg.loss_weights.c);
        w.get("anchor", cfg.loss_weights.anchor);
    }
    {
        const Section f(top.child("fdm"), "fdm", {"points_per_segment", "dt", "first_dt", "growth", "scheme"});
        f.get("points_per_segment", cfg.fdm.points_per_segment);
        f.get("dt", cfg.fdm.dt);
        f.get("first_dt", cfg.fdm.first_dt);
        f.get("growth", cfg.fdm.growth);
        if (f.has("scheme")) {
            std::string s;
            f.get("scheme", s);
            cfg.fdm.scheme = fdm_scheme_from_string(s);
        }
    }
    {
        const Section o(top.child("output"), "output",
                        {"dir", "checkpoint", "history", "stress_csv", "eval_csv", "report", "times"});
        auto& out = cfg.output;
        o.get("dir", out.dir);
        o.get("checkpoint", out.checkpoint);
        o.get("history", out.history);
        o.get("stress_csv", out.stress_csv);
        o.get("eval_csv", out.eval_csv);
        o.get("report", out.report);
        o.get("times", out.times);
    }
    {
        const Section e(top.child("eval"), "eval", {"points_per_segment", "ratio"});
        e.get("points_per_segment", cfg.eval.points_per_segment);
        e.get("ratio", cfg.eval.ratio);
    }
    {
        const Section c(top.child("compare"), "compare", {"ws_times", "ws_t_min", "ws_t_max", "js_times"});
        c.get("ws_times", cfg.compare.ws_times);
        c.get("ws_t_min", cfg.compare.ws_t_min);
        c.get("ws_t_max", cfg.compare.ws_t_max);
        c.get("js_times", cfg.compare.js_times);
    }

    if (!(cfg.t_end > 0.0))
        throw ConfigError("'t_end' must be positive");
    if (cfg.chunk_size < 1)
        throw ConfigError("'training.chunk_size' must be positive");
    if (cfg.eval.points_per_segment < 2)
        throw ConfigError("'eval.points_per_segment' must be at least 2");
    if (cfg.compare.ws_times < 1 || cfg.compare.js_times < 2)
        throw ConfigError("compare time counts are too small");
    cfg.sampling.validate();
    cfg.training.validate();
    cfg.model.validate();
    return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot open configuration '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), overrides);
}

Problem RunConfig::problem() const
{
    return Problem(InterconnectTree::build(segments), virtual_distance, material, thermal, scaling, t_end);
}

Architecture RunConfig::architecture(const Problem& problem) const
{
    Architecture a = model;
    a.spatial_dim = problem.domain.dimension();
    return a;
}

double RunConfig::anchor_kappa_hat() const
{
    return scaling.scale_kappa(mean_node_kappa(thermal, material, t_end));
}

FdmSettings RunConfig::fdm_settings() const
{
    FdmSettings s = fdm;
    s.t_end = t_end;
    return s;
}

std::string config_reference()
{
    return R"(t_end: 1.0e8                      # s
tree:
  virtual_distance_um: 0.5
  segments:                         # required, one entry per segment
    - id: 0                         # defaults to the list position
      length_um: 20                 # required
      current_density: 4.0e10       # A/m^2, signed along node_a -> node_b
      node_a: 0                     # required
      node_b: 1                     # required
      width_um: 0.3
      spacing_um: 0.3
      direction_deg: 0              # required for trees that are not a straight path
material:
  boltzmann: 1.38e-23
  charge: 1.6e-19
  effective_valence: 10
  activation_energy_ev: 1.1
  bulk_modulus: 1.0e11
  self_diffusion: 5.2e-5
  resistivity: 3.0e-8
  atomic_volume: 8.78e-30
  critical_stress: 4.0e8
  atoms_per_volume: 1
thermal:
  case: I                           # I, II or III
  constant_k: 350
  t0: {mean_k: 350, amplitude_k: 30, omega: 1.2566370614359173e-7}
  joule: {k_m: 400, k_ild: 1.2, t_ild_um: 0.8, h_ild_um: 0.8}
scaling: {sigma: 1.0e-9, x: 1.0e5, t: 1.0e-7}
sampling:
  residual: 25000
  terminal: 1000
  junction: 1000
  initial: 500
  log_fraction: 0.5
  log_min_ratio: 1.0e-5
  seed: 1234
model:                              # defaults depend on thermal.case
  channels: 0
  ft_hidden: []
  f_hidden: [40, 40, 40, 40, 40, 40, 40, 40, 40, 40]
  g_input: false
  activation: tanh                  # tanh or sigmoid
training:
  adam_iters: 5000
  adam_lr: 1.0e-3
  adam_beta1: 0.9
  adam_beta2: 0.999
  adam_eps: 1.0e-8
  lbfgs_max_iters: 20000
  lbfgs_memory: 50
  wolfe_c1: 1.0e-4
  wolfe_c2: 0.9
  grad_tol: 1.0e-8
  loss_tol: 0
  seed: 1234
  chunk_size: 256
  loss_weights: {f: 1, b: 1, i: 1, c: 1, anchor: 0}
fdm:
  points_per_segment: 201
  dt: 1.0e4
  first_dt: 0                       # > 0 enables geometric step growth
  growth: 1.02
  scheme: implicit                  # implicit or explicit
output:
  dir: .
  checkpoint: model.ckpt
  history: history.csv
  stress_csv: fdm_stress.csv
  eval_csv: eval_stress.csv
  report: report.txt
  times: [5.0e5, 5.0e6, 5.0e7]
eval: {points_per_segment: 101, ratio: 1}
compare: {ws_times: 10, ws_t_min: 1.0e5, ws_t_max: 1.0e8, js_times: 101}
)";
}

} // namespace emstress
