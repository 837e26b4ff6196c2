#include "emstress/problem.hpp"

namespace emstress {

Problem::Problem(InterconnectTree tree_, double virtual_distance, MaterialParams material_, ThermalModel thermal_,
                 ScalingConfig scaling_, double t_end_)
    : tree(std::move(tree_)),
      domain(tree, virtual_distance),
      material(material_),
      thermal(thermal_),
      scaling(scaling_),
      t_end(t_end_)
{
    material.validate();
    thermal.validate();
    scaling.validate();
    if (!(t_end > 0.0))
        throw PhysicsError("t_end must be positive");
}

SamplePoint make_sample(const Problem& problem, int segment, double local, double t, int normal)
{
    const auto& seg = problem.tree.segment(segment);
    const auto& sc = problem.scaling;
    SamplePoint p;
    p.segment = segment;
    p.local = local;
    p.t = t;
    const Point2 c = problem.domain.point(segment, local);
    p.coord = {sc.scale_x(c.x), sc.scale_x(c.y)};
    p.dir = problem.domain.interval(segment).direction;
    p.t_hat = sc.scale_t(t);
    p.g_hat = sc.scale_force(em_driving_force(problem.material, seg.current_density));
    const auto k = kappa_and_gradient(problem.thermal, problem.material, seg, local - 0.5 * seg.length, t);
    p.kappa_hat = sc.scale_kappa(k.value);
    p.kappa_x_hat = sc.scale_kappa_gradient(k.gradient);
    p.normal = normal;
    return p;
}

ModelBatch make_batch(const std::vector<SamplePoint>& points, int spatial_dim)
{
    ModelBatch b;
    const auto n = static_cast<Eigen::Index>(points.size());
    b.resize(spatial_dim, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        b.coord(0, i) = p.coord.x;
        b.dir(0, i) = p.dir.x;
        if (spatial_dim == 2) {
            b.coord(1, i) = p.coord.y;
            b.dir(1, i) = p.dir.y;
        }
        b.g[i] = p.g_hat;
        b.t[i] = p.t_hat;
    }
    return b;
}

} // namespace emstress
