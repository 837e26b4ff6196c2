#pragma once

// Numerical checks shared by the unit tests and the acceptance runner.

#include "emstress/loss.hpp"
#include "emstress/mlp.hpp"
#include "emstress/model.hpp"
#include "emstress/objective.hpp"
#include "emstress/problem.hpp"
#include "emstress/sampling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace checks {

struct SingleLayerErrors {
    double jet = 0.0;    ///< worst derivative error, relative to the sum of |terms|
    double grad = 0.0;   ///< worst gradient error, relative to the largest component
};

/// One hidden tanh layer, inputs (x, t). Compares the jet derivatives with
/// d^k N / d a_j^k = sum_i v_i w_ij^k o_i^(k), and the parameter gradient of
/// L = (d2N/dx2)^2 with the expressions built from the derivative chain.
inline SingleLayerErrors single_layer(int hidden, unsigned long long seed)
{
    using namespace emstress;
    const Mlp net({2, hidden, 1});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd p(static_cast<Eigen::Index>(net.parameter_count()));
    for (Eigen::Index k = 0; k < p.size(); ++k)
        p[k] = u(rng);
    const double a[2] = {u(rng), u(rng)};

    const auto w = [&](int i, int j) { return p[static_cast<Eigen::Index>(net.weight_offset(0)) + 2 * i + j]; };
    const auto bias = [&](int i) { return p[static_cast<Eigen::Index>(net.bias_offset(0)) + i]; };
    const auto v = [&](int i) { return p[static_cast<Eigen::Index>(net.weight_offset(1)) + i]; };

    double n1x = 0, n1t = 0, n2x = 0, s1x = 0, s1t = 0, s2x = 0;
    std::vector<double> o2(hidden), o3(hidden);
    for (int i = 0; i < hidden; ++i) {
        const double h = std::tanh(w(i, 0) * a[0] + w(i, 1) * a[1] + bias(i));
        const double d1 = 1.0 - h * h;
        o2[i] = -2.0 * h * d1;
        o3[i] = d1 * (6.0 * h * h - 2.0);
        n1x += v(i) * w(i, 0) * d1;
        n1t += v(i) * w(i, 1) * d1;
        n2x += v(i) * w(i, 0) * w(i, 0) * o2[i];
        s1x += std::abs(v(i) * w(i, 0) * d1);
        s1t += std::abs(v(i) * w(i, 1) * d1);
        s2x += std::abs(v(i) * w(i, 0) * w(i, 0) * o2[i]);
    }

    SingleLayerErrors out;
    const auto jet = net.forward_jet(p.data(), {Jet2::variable_x(a[0]), Jet2::variable_t(a[1])}).front();
    out.jet = std::max({std::abs(jet.d_dx - n1x) / s1x, std::abs(jet.d_dt - n1t) / s1t,
                        std::abs(jet.d2_dx2 - n2x) / s2x});

    Eigen::MatrixXd input = Eigen::MatrixXd::Zero(2, 4);
    input(0, jet_value) = a[0];
    input(1, jet_value) = a[1];
    input(0, jet_dx) = 1.0;
    input(1, jet_dt) = 1.0;
    JetCache cache;
    net.forward_jet(p.data(), input, cache);
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(1, 4);
    adj(0, jet_dxx) = 2.0 * cache.output()(0, jet_dxx);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.size());
    net.backward_jet(p.data(), cache, adj, grad.data());

    Eigen::VectorXd expected = Eigen::VectorXd::Zero(p.size());
    const double d2 = 2.0 * n2x;
    for (int i = 0; i < hidden; ++i) {
        const double wi0 = w(i, 0);
        expected[static_cast<Eigen::Index>(net.weight_offset(1)) + i] = d2 * wi0 * wi0 * o2[i];
        expected[static_cast<Eigen::Index>(net.bias_offset(0)) + i] = d2 * v(i) * wi0 * wi0 * o3[i];
        for (int j = 0; j < 2; ++j)
            expected[static_cast<Eigen::Index>(net.weight_offset(0)) + 2 * i + j] =
                d2 * v(i) * ((j == 0 ? 2.0 * wi0 * o2[i] : 0.0) + wi0 * wi0 * o3[i] * a[j]);
    }
    out.grad = (grad - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff();
    return out;
}

/// Input derivatives of a random deep net against central differences.
inline double multilayer_input_fd(unsigned long long seed)
{
    using namespace emstress;
    const Mlp net({2, 12, 10, 8, 1});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd p(static_cast<Eigen::Index>(net.parameter_count()));
    for (Eigen::Index k = 0; k < p.size(); ++k)
        p[k] = 0.8 * u(rng);
    double worst = 0.0;
    const double h = 1e-4;
    for (int trial = 0; trial < 20; ++trial) {
        const double x = u(rng), t = u(rng);
        const auto jet = net.forward_jet(p.data(), {Jet2::variable_x(x), Jet2::variable_t(t)}).front();
        const auto f = [&](double xx, double tt) {
            Eigen::MatrixXd in(2, 1);
            in << xx, tt;
            return net.forward_value(p.data(), in)(0, 0);
        };
        const double f0 = f(x, t), fxp = f(x + h, t), fxm = f(x - h, t);
        const double dx = (fxp - fxm) / (2 * h);
        const double dt = (f(x, t + h) - f(x, t - h)) / (2 * h);
        const double dxx = (fxp - 2 * f0 + fxm) / (h * h);
        const double scale = std::max({std::abs(jet.d_dx), std::abs(jet.d_dt), std::abs(jet.d2_dx2), 1e-3});
        worst = std::max({worst, std::abs(jet.value - f0) / std::max(std::abs(f0), 1e-3),
                          std::abs(jet.d_dx - dx) / scale, std::abs(jet.d_dt - dt) / scale,
                          std::abs(jet.d2_dx2 - dxx) / scale});
    }
    return worst;
}

/// Small problem for loss-level checks: two segments or a cross, Case III
/// when channels == 2 so every physics term is live.
inline emstress::Problem small_problem(emstress::ThermalCase c, bool cross = false)
{
    using namespace emstress;
    std::vector<SegmentSpec> specs;
    const auto seg = [](int id, double l, double j, int a, int b, double dir) {
        SegmentSpec s;
        s.id = id;
        s.length = l;
        s.current_density = j;
        s.node_a = a;
        s.node_b = b;
        s.direction_deg = dir;
        return s;
    };
    if (cross)
        specs = {seg(0, 20e-6, 1e10, 0, 1, 0), seg(1, 30e-6, 2e10, 0, 2, 90), seg(2, 10e-6, -3e10, 0, 3, 180),
                 seg(3, 20e-6, 4e10, 0, 4, 270)};
    else
        specs = {seg(0, 20e-6, 4e10, 0, 1, 0), seg(1, 30e-6, -1e10, 1, 2, 0)};
    ThermalModel th;
    th.kind = c;
    return Problem(InterconnectTree::build(specs), 0.5e-6, MaterialParams{}, th, ScalingConfig{}, 1e8);
}

/// Worst per-component discrepancy between the loss gradient and central
/// differences over every parameter, for a randomly perturbed model.
/// Components are compared relative to max(|g|, |fd|, floor * max|g|).
inline double loss_gradient_fd(const emstress::Problem& problem, emstress::Architecture arch,
                               unsigned long long seed, double anchor_weight = 0.0, double floor = 1e-4,
                               double step = 1e-5)
{
    using namespace emstress;
    arch.spatial_dim = problem.domain.dimension();
    StpinnModel model(arch, problem.scaling);
    model.initialize(seed);
    std::mt19937_64 rng(seed + 1);
    std::normal_distribution<double> n(0.0, 0.1);
    Eigen::VectorXd x = model.parameters();
    for (Eigen::Index k = 0; k < x.size(); ++k)
        x[k] += n(rng);
    model.set_parameters(x);

    SamplerConfig cfg;
    cfg.counts = {10, 4, 4, 4};
    cfg.seed = seed;
    const auto set = sample_collocation(problem, cfg);
    LossWeights weights;
    weights.anchor = anchor_weight;
    const LossFunction loss(model, set, weights, 0.1414, 3);
    const auto obj = loss.objective(model);
    Eigen::VectorXd g(x.size());
    obj(x, g);
    return grad_check(obj, x, static_cast<int>(x.size()), step, seed, floor * g.cwiseAbs().maxCoeff());
}

} // namespace checks
