#include "emstress/loss.hpp"
#include "emstress/parallel.hpp"

#include <algorithm>

namespace emstress {

double residual_from_jet(const Jet2& s, double kappa_hat, double kappa_x_hat, double g_hat)
{
    return s.d_dt - (kappa_x_hat * (s.d_dx + g_hat) + kappa_hat * s.d2_dx2);
}

double residual(const StpinnModel& model, const SamplePoint& p)
{
    const Jet2 s = model.forward(p.coord, p.dir, p.g_hat, p.t_hat);
    return residual_from_jet(s, p.kappa_hat, p.kappa_x_hat, p.g_hat);
}

void LossFunction::add_chunks(Kind kind, const std::vector<SamplePoint>& points, int dim, int chunk_size)
{
    for (std::size_t start = 0; start < points.size(); start += static_cast<std::size_t>(chunk_size)) {
        const std::size_t end = std::min(points.size(), start + static_cast<std::size_t>(chunk_size));
        const std::vector<SamplePoint> part(points.begin() + static_cast<std::ptrdiff_t>(start),
                                            points.begin() + static_cast<std::ptrdiff_t>(end));
        Chunk c;
        c.kind = kind;
        c.batch = make_batch(part, dim);
        const auto n = static_cast<Eigen::Index>(part.size());
        c.kappa.resize(n);
        c.kappa_x.resize(n);
        c.g.resize(n);
        c.normal.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& p = part[static_cast<std::size_t>(i)];
            c.kappa[i] = p.kappa_hat;
            c.kappa_x[i] = p.kappa_x_hat;
            c.g[i] = p.g_hat;
            c.normal[i] = p.normal;
        }
        chunks_.push_back(std::move(c));
    }
}

LossFunction::LossFunction(const StpinnModel& model, const CollocationSet& set, LossWeights weights,
                           double anchor_kappa_hat, int chunk_size)
    : weights_(weights), anchor_kappa_(anchor_kappa_hat)
{
    if (set.residual.empty() || set.terminal.empty() || set.initial.empty())
        throw LossError("collocation set has an empty residual, terminal or initial category");
    if (chunk_size < 1)
        throw LossError("chunk size must be positive");
    if (weights.anchor != 0.0 && model.channels() == 0)
        throw LossError("the anchoring term needs a time transform network");
    const int dim = model.architecture().spatial_dim;
    n_f_ = static_cast<double>(set.residual.size());
    n_b_ = static_cast<double>(set.terminal.size());
    n_i_ = static_cast<double>(set.initial.size());
    n_c_ = static_cast<double>(set.junctions.size());
    add_chunks(Kind::residual, set.residual, dim, chunk_size);
    add_chunks(Kind::terminal, set.terminal, dim, chunk_size);
    add_chunks(Kind::initial, set.initial, dim, chunk_size);

    // Junction chunks hold whole batches.
    std::size_t j = 0;
    while (j < set.junctions.size()) {
        std::vector<SamplePoint> part;
        std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges;
        while (j < set.junctions.size() &&
               (part.empty() || part.size() + set.junctions[j].count <= static_cast<std::size_t>(chunk_size))) {
            const auto& b = set.junctions[j];
            ranges.emplace_back(static_cast<Eigen::Index>(part.size()), static_cast<Eigen::Index>(b.count));
            for (std::size_t m = 0; m < b.count; ++m)
                part.push_back(set.junction_points[b.first + m]);
            ++j;
        }
        add_chunks(Kind::junction, part, dim, static_cast<int>(part.size()));
        chunks_.back().groups = std::move(ranges);
    }
}

Evaluation LossFunction::evaluate(const StpinnModel& model, Eigen::VectorXd* grad) const
{
    const Eigen::Index np = model.parameter_count();
    const int n = model.channels();
    const bool anchor = weights_.anchor != 0.0 && n > 0;
    std::vector<LossTerms> parts(chunks_.size());
    std::vector<Eigen::VectorXd> grads(grad ? chunks_.size() : 0);

    parallel_for(chunks_.size(), [&](std::size_t ci) {
        const Chunk& c = chunks_[ci];
        ModelJets jets;
        model.forward_jets(c.batch, jets);
        const Eigen::Index P = jets.points;
        const auto& s = jets.sigma;
        Eigen::MatrixXd sbar = Eigen::MatrixXd::Zero(4, P);
        Eigen::MatrixXd fbar;
        LossTerms& t = parts[ci];

        switch (c.kind) {
        case Kind::residual: {
            const Eigen::ArrayXd r = s.row(jet_dt).transpose().array() -
                                     (c.kappa_x.array() * (s.row(jet_dx).transpose().array() + c.g.array()) +
                                      c.kappa.array() * s.row(jet_dxx).transpose().array());
            t.f = r.square().sum() / n_f_;
            const Eigen::ArrayXd rbar = 2.0 * weights_.f / n_f_ * r;
            sbar.row(jet_dt) = rbar.matrix().transpose();
            sbar.row(jet_dx) = (-rbar * c.kappa_x.array()).matrix().transpose();
            sbar.row(jet_dxx) = (-rbar * c.kappa.array()).matrix().transpose();
            if (anchor) {
                const Eigen::Index cols = n * P;
                fbar = Eigen::MatrixXd::Zero(1, 4 * cols);
                const double scale = 1.0 / (n_f_ * n);
                for (int k = 0; k < n; ++k) {
                    for (Eigen::Index p = 0; p < P; ++p) {
                        const double a = jets.f_out(jet_dt, k, p) - anchor_kappa_ * jets.f_out(jet_dxx, k, p);
                        t.anchor += a * a * scale;
                        const double abar = 2.0 * weights_.anchor * scale * a;
                        fbar(0, jet_dt * cols + k * P + p) += abar;
                        fbar(0, jet_dxx * cols + k * P + p) -= anchor_kappa_ * abar;
                    }
                }
            }
            break;
        }
        case Kind::terminal: {
            const Eigen::ArrayXd q = c.kappa.array() * (s.row(jet_dx).transpose().array() + c.g.array());
            t.b = q.square().sum() / n_b_;
            sbar.row(jet_dx) = (2.0 * weights_.b / n_b_ * q * c.kappa.array()).matrix().transpose();
            break;
        }
        case Kind::initial: {
            t.i = s.row(jet_value).squaredNorm() / n_i_;
            sbar.row(jet_value) = 2.0 * weights_.i / n_i_ * s.row(jet_value);
            break;
        }
        case Kind::junction: {
            const double w = 2.0 * weights_.c / n_c_;
            for (const auto& [first, count] : c.groups) {
                const double center = s(jet_value, first);
                double cont = 0.0;
                double flux = 0.0;
                for (Eigen::Index m = first; m < first + count; ++m)
                    flux += c.kappa[m] * (s(jet_dx, m) + c.g[m]) * c.normal[m];
                for (Eigen::Index m = first + 1; m < first + count; ++m) {
                    const double d = s(jet_value, m) - center;
                    cont += d * d;
                    sbar(jet_value, m) += w * d;
                    sbar(jet_value, first) -= w * d;
                }
                for (Eigen::Index m = first; m < first + count; ++m)
                    sbar(jet_dx, m) += w * flux * c.kappa[m] * c.normal[m];
                t.c += (cont + flux * flux) / n_c_;
            }
            break;
        }
        }

        if (grad) {
            grads[ci] = Eigen::VectorXd::Zero(np);
            model.backward_jets(jets, sbar, anchor && c.kind == Kind::residual ? &fbar : nullptr,
                                grads[ci].data());
        }
    });

    Evaluation e;
    for (const auto& p : parts) {
        e.terms.f += p.f;
        e.terms.b += p.b;
        e.terms.i += p.i;
        e.terms.c += p.c;
        e.terms.anchor += p.anchor;
    }
    const auto& w = weights_;
    e.value = w.f * e.terms.f + w.b * e.terms.b + w.i * e.terms.i + w.c * e.terms.c;
    if (anchor)
        e.value += w.anchor * e.terms.anchor;
    if (grad) {
        grad->setZero(np);
        for (const auto& g : grads)
            *grad += g;
    }
    return e;
}

Objective LossFunction::objective(StpinnModel& model) const
{
    return [this, &model](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        model.set_parameters(x);
        return evaluate(model, &grad);
    };
}

} // namespace emstress
