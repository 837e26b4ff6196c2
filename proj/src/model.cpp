#include "emstress/model.hpp"
#include "emstress/optim.hpp"

#include <cmath>

namespace emstress {

void ScalingConfig::validate() const
{
    if (!(sigma > 0.0 && x > 0.0 && t > 0.0) || !std::isfinite(sigma * x * t))
        throw ModelError("scaling factors must be finite and positive");
}

void Architecture::validate() const
{
    if (channels < 0)
        throw ModelError("channel count must be non-negative");
    if (spatial_dim != 1 && spatial_dim != 2)
        throw ModelError("spatial dimension must be 1 or 2");
    for (int h : ft_hidden)
        if (h < 1)
            throw ModelError("F_t hidden sizes must be positive");
    for (int h : f_hidden)
        if (h < 1)
            throw ModelError("F hidden sizes must be positive");
    if (activation == Activation::relu)
        throw ModelError("the residual needs second derivatives; relu is not allowed");
}

std::vector<int> Architecture::ft_sizes() const
{
    if (channels == 0)
        return {};
    std::vector<int> s{1};
    s.insert(s.end(), ft_hidden.begin(), ft_hidden.end());
    s.push_back(channels);
    return s;
}

std::vector<int> Architecture::f_sizes() const
{
    std::vector<int> s{f_time_row() + 1};
    s.insert(s.end(), f_hidden.begin(), f_hidden.end());
    s.push_back(1);
    return s;
}

Architecture Architecture::default_for(ThermalCase c)
{
    Architecture a;
    switch (c) {
    case ThermalCase::constant: break;
    case ThermalCase::time_varying:
        a.channels = 1;
        a.ft_hidden = {100};
        break;
    case ThermalCase::space_time:
        a.channels = 2;
        a.ft_hidden = {50, 50};
        break;
    }
    return a;
}

void ModelBatch::resize(int dim, Eigen::Index p)
{
    coord.setZero(dim, p);
    dir.setZero(dim, p);
    g.setZero(p);
    t.setZero(p);
}

StpinnModel::StpinnModel(Architecture arch, ScalingConfig scaling) : arch_(std::move(arch)), scaling_(scaling)
{
    arch_.validate();
    scaling_.validate();
    if (arch_.channels > 0)
        ft_ = Mlp(arch_.ft_sizes(), arch_.activation);
    f_ = Mlp(arch_.f_sizes(), arch_.activation);
    params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(theta_offset()) + arch_.channels);
}

void StpinnModel::set_parameters(const Eigen::VectorXd& p)
{
    if (p.size() != params_.size())
        throw ModelError("parameter vector length does not match the architecture");
    params_ = p;
}

void StpinnModel::initialize(unsigned long long seed)
{
    std::mt19937_64 rng(seed);
    if (arch_.channels > 0)
        params_.segment(0, static_cast<Eigen::Index>(ft_.parameter_count())) = xavier_init(ft_.shapes(), rng);
    params_.segment(static_cast<Eigen::Index>(f_offset()), static_cast<Eigen::Index>(f_.parameter_count())) =
        xavier_init(f_.shapes(), rng);
    for (int k = 0; k < arch_.channels; ++k)
        params_[static_cast<Eigen::Index>(theta_offset()) + k] = 1.0 / arch_.channels;
}

void StpinnModel::forward_jets(const ModelBatch& batch, ModelJets& jets) const
{
    const Eigen::Index P = batch.size();
    const int n = arch_.channels;
    const int nc = std::max(n, 1);
    const int dim = arch_.spatial_dim;
    const int trow = arch_.f_time_row();
    const double* p = params_.data();
    jets.points = P;
    jets.channels_or_one = nc;

    if (n > 0) {
        Eigen::MatrixXd in = Eigen::MatrixXd::Zero(1, 4 * P);
        in.leftCols(P) = batch.t.transpose();
        in.middleCols(jet_dt * P, P).setOnes();
        ft_.forward_jet(p + ft_offset(), in, jets.ft_cache);
    }

    const Eigen::Index cols = nc * P;
    Eigen::MatrixXd in = Eigen::MatrixXd::Zero(f_.inputs(), 4 * cols);
    for (int k = 0; k < nc; ++k) {
        in.block(0, k * P, dim, P) = batch.coord;
        in.block(0, jet_dx * cols + k * P, dim, P) = batch.dir;
        if (arch_.g_input)
            in.block(dim, k * P, 1, P) = batch.g.transpose();
        if (n > 0)
            in.block(trow, k * P, 1, P) = jets.ft_cache.output().block(k, 0, 1, P);
        else
            in.block(trow, 0, 1, P) = batch.t.transpose();
        in.block(trow, jet_dt * cols + k * P, 1, P).setOnes();
    }
    f_.forward_jet(p + f_offset(), in, jets.f_cache);

    const auto& out = jets.f_cache.output();
    jets.sigma.resize(4, P);
    if (n == 0) {
        for (int b = 0; b < 4; ++b)
            jets.sigma.row(b) = out.row(0).segment(b * P, P);
        return;
    }
    jets.sigma.setZero();
    const auto& tau = jets.ft_cache.output();
    for (int k = 0; k < n; ++k) {
        const double th = theta(k);
        for (int b : {jet_value, jet_dx, jet_dxx})
            jets.sigma.row(b) += th * out.row(0).segment(b * cols + k * P, P);
        jets.sigma.row(jet_dt) +=
            th * out.row(0).segment(jet_dt * cols + k * P, P).cwiseProduct(tau.row(k).segment(jet_dt * P, P));
    }
}

void StpinnModel::backward_jets(const ModelJets& jets, const Eigen::MatrixXd& sigma_adjoint,
                                const Eigen::MatrixXd* f_adjoint, double* grad) const
{
    const Eigen::Index P = jets.points;
    const int n = arch_.channels;
    const int nc = std::max(n, 1);
    const Eigen::Index cols = nc * P;
    const double* p = params_.data();

    Eigen::MatrixXd fbar = f_adjoint ? *f_adjoint : Eigen::MatrixXd::Zero(1, 4 * cols);
    if (n == 0) {
        for (int b = 0; b < 4; ++b)
            fbar.block(0, b * P, 1, P) += sigma_adjoint.row(b);
        f_.backward_jet(p + f_offset(), jets.f_cache, fbar, grad + f_offset());
        return;
    }

    const auto& out = jets.f_cache.output();
    const auto& tau = jets.ft_cache.output();
    Eigen::MatrixXd taubar = Eigen::MatrixXd::Zero(n, 4 * P);
    for (int k = 0; k < n; ++k) {
        const double th = theta(k);
        double dtheta = 0.0;
        for (int b : {jet_value, jet_dx, jet_dxx}) {
            fbar.block(0, b * cols + k * P, 1, P) += th * sigma_adjoint.row(b);
            dtheta += out.row(0).segment(b * cols + k * P, P).dot(sigma_adjoint.row(b));
        }
        const auto ftau = out.row(0).segment(jet_dt * cols + k * P, P);
        const auto rate = tau.row(k).segment(jet_dt * P, P);
        const auto sbar_t = sigma_adjoint.row(jet_dt);
        fbar.block(0, jet_dt * cols + k * P, 1, P) += th * rate.cwiseProduct(sbar_t);
        dtheta += ftau.cwiseProduct(rate).dot(sbar_t);
        taubar.block(k, jet_dt * P, 1, P) = th * ftau.cwiseProduct(sbar_t);
        grad[theta_offset() + static_cast<std::size_t>(k)] += dtheta;
    }

    Eigen::MatrixXd in_adj;
    f_.backward_jet(p + f_offset(), jets.f_cache, fbar, grad + f_offset(), &in_adj);
    const int trow = arch_.f_time_row();
    for (int k = 0; k < n; ++k)
        taubar.block(k, 0, 1, P) = in_adj.block(trow, k * P, 1, P);
    ft_.backward_jet(p + ft_offset(), jets.ft_cache, taubar, grad + ft_offset());
}

Jet2 StpinnModel::forward(Point2 coord, Point2 dir, double g_hat, double t_hat) const
{
    ModelBatch batch;
    batch.resize(arch_.spatial_dim, 1);
    batch.coord(0, 0) = coord.x;
    batch.dir(0, 0) = dir.x;
    if (arch_.spatial_dim == 2) {
        batch.coord(1, 0) = coord.y;
        batch.dir(1, 0) = dir.y;
    }
    batch.g[0] = g_hat;
    batch.t[0] = t_hat;
    ModelJets jets;
    forward_jets(batch, jets);
    return {jets.sigma(0, 0), jets.sigma(1, 0), jets.sigma(2, 0), jets.sigma(3, 0)};
}

Eigen::MatrixXd StpinnModel::time_transform(const Eigen::VectorXd& t_hat) const
{
    if (arch_.channels == 0)
        throw ModelError("a plain PINN has no time transform network");
    return ft_.forward_value(params_.data() + ft_offset(), t_hat.transpose());
}

Eigen::VectorXd StpinnModel::evaluate(const ModelBatch& batch, double tau_ratio) const
{
    const Eigen::Index P = batch.size();
    const int n = arch_.channels;
    const int nc = std::max(n, 1);
    const int dim = arch_.spatial_dim;
    const int trow = arch_.f_time_row();

    Eigen::MatrixXd in(f_.inputs(), nc * P);
    Eigen::MatrixXd tau;
    if (n > 0) {
        tau = time_transform(batch.t);
        if (tau_ratio != 1.0) {
            const Eigen::MatrixXd tau0 = time_transform(Eigen::VectorXd::Zero(1));
            for (int k = 0; k < n; ++k)
                tau.row(k) = (tau0(k, 0) + tau_ratio * (tau.row(k).array() - tau0(k, 0))).matrix();
        }
    }
    for (int k = 0; k < nc; ++k) {
        in.block(0, k * P, dim, P) = batch.coord;
        if (arch_.g_input)
            in.block(dim, k * P, 1, P) = batch.g.transpose();
        if (n > 0)
            in.block(trow, k * P, 1, P) = tau.row(k);
        else
            in.block(trow, 0, 1, P) = tau_ratio * batch.t.transpose();
    }
    const Eigen::MatrixXd out = f_.forward_value(params_.data() + f_offset(), in);
    if (n == 0)
        return out.row(0).transpose();
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(P);
    for (int k = 0; k < n; ++k)
        sigma += theta(k) * out.row(0).segment(k * P, P).transpose();
    return sigma;
}

} // namespace emstress
