#include "emstress/stpinn_field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace emstress {

StpinnField::StpinnField(std::shared_ptr<const StpinnModel> model, std::shared_ptr<const Problem> problem,
                         double tau_ratio)
    : model_(std::move(model)), problem_(std::move(problem)), tau_ratio_(tau_ratio)
{
    if (!model_ || !problem_)
        throw ModelError("stress field needs a model and a problem");
    if (model_->architecture().spatial_dim != problem_->domain.dimension())
        throw ModelError("model input dimension does not match the unfolded tree");
    if (!(tau_ratio_ > 0.0))
        throw ModelError("diffusivity ratio must be positive");
}

void StpinnField::check(const StressQuery& q) const
{
    const auto& tree = problem_->tree;
    if (q.segment < 0 || q.segment >= static_cast<int>(tree.segments().size()))
        throw ModelError("query references unknown segment " + std::to_string(q.segment));
    const double len = tree.segment(q.segment).length;
    if (q.local < -1e-12 * len || q.local > len * (1.0 + 1e-12))
        throw ModelError("query position outside segment " + std::to_string(q.segment));
    if (q.t < 0.0 || q.t > problem_->t_end * (1.0 + 1e-12))
        throw ModelError("query time outside [0, t_end]");
}

double StpinnField::stress(int segment, double local, double t) const
{
    return stress(std::vector<StressQuery>{{segment, local, t}}).front();
}

std::vector<double> StpinnField::stress(const std::vector<StressQuery>& queries) const
{
    std::vector<SamplePoint> pts;
    pts.reserve(queries.size());
    for (const auto& q : queries) {
        check(q);
        // Only geometry and force are needed; skip the diffusivity lookup.
        const auto& seg = problem_->tree.segment(q.segment);
        const auto& sc = problem_->scaling;
        SamplePoint p;
        const Point2 c = problem_->domain.point(q.segment, q.local);
        p.coord = {sc.scale_x(c.x), sc.scale_x(c.y)};
        p.dir = problem_->domain.interval(q.segment).direction;
        p.t_hat = sc.scale_t(q.t);
        p.g_hat = sc.scale_force(em_driving_force(problem_->material, seg.current_density));
        pts.push_back(p);
    }
    const ModelBatch batch = make_batch(pts, model_->architecture().spatial_dim);
    const Eigen::VectorXd s = model_->evaluate(batch, tau_ratio_);
    std::vector<double> out(queries.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = model_->scaling().unscale_stress(s[static_cast<Eigen::Index>(i)]);
    return out;
}

std::shared_ptr<const StressField> rescale_diffusivity(std::shared_ptr<const StressField> field, double ratio,
                                                       ThermalCase kind)
{
    if (!(ratio > 0.0))
        throw std::invalid_argument("diffusivity ratio must be positive");
    switch (kind) {
    case ThermalCase::constant:
        return std::make_shared<TimeRescaledField>(std::move(field), ratio);
    case ThermalCase::time_varying: {
        const auto net = std::dynamic_pointer_cast<const StpinnField>(field);
        if (!net || net->model().channels() != 1)
            throw std::invalid_argument(
                "time-varying temperature rescaling needs a one-channel model with a time transform");
        return std::make_shared<StpinnField>(net->model_ptr(), net->problem_ptr(), net->tau_ratio() * ratio);
    }
    case ThermalCase::space_time: break;
    }
    throw std::invalid_argument("no diffusivity rescaling identity exists for space-time varying temperature");
}

} // namespace emstress
