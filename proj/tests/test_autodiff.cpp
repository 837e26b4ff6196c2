#include "doctest.h"
#include "checks.hpp"

#include "emstress/jet.hpp"
#include "emstress/loss.hpp"
#include "emstress/mlp.hpp"
#include "emstress/parallel.hpp"

#include <cmath>
#include <cstring>

using namespace emstress;

TEST_CASE("jet arithmetic")
{
    const Jet2 x = Jet2::variable_x(0.7);
    const Jet2 t = Jet2::variable_t(-0.2);
    const Jet2 c = Jet2::constant(3.0);
    CHECK(c.d_dx == 0.0);
    CHECK(c.d_dt == 0.0);
    CHECK(c.d2_dx2 == 0.0);

    const Jet2 f = x * x * t;   // x^2 t
    CHECK(f.value == doctest::Approx(0.49 * -0.2));
    CHECK(f.d_dx == doctest::Approx(2 * 0.7 * -0.2));
    CHECK(f.d_dt == doctest::Approx(0.49));
    CHECK(f.d2_dx2 == doctest::Approx(2 * -0.2));

    const Jet2 g = exp(x) + t;
    const double alpha = 1.7, beta = -0.4;
    const Jet2 lin = alpha * f + beta * g;
    CHECK(lin.value == doctest::Approx(alpha * f.value + beta * g.value).epsilon(1e-15));
    CHECK(lin.d_dx == doctest::Approx(alpha * f.d_dx + beta * g.d_dx).epsilon(1e-15));
    CHECK(lin.d_dt == doctest::Approx(alpha * f.d_dt + beta * g.d_dt).epsilon(1e-15));
    CHECK(lin.d2_dx2 == doctest::Approx(alpha * f.d2_dx2 + beta * g.d2_dx2).epsilon(1e-15));
}

TEST_CASE("tanh chain rule")
{
    for (double a : {-2.5, 0.3, 1.0, 4.0})
        for (double b : {-1.0, 0.0, 0.6})
            for (double x : {-0.8, 0.1, 0.9}) {
                const Jet2 j = tanh(a * Jet2::variable_x(x) + b);
                const double h = std::tanh(a * x + b);
                const double d2 = -2.0 * a * a * h * (1.0 - h * h);
                CHECK(j.d_dx == doctest::Approx(a * (1.0 - h * h)).epsilon(1e-12));
                CHECK(j.d2_dx2 == doctest::Approx(d2).epsilon(1e-12));
            }
}

TEST_CASE("identity network passes the input jet through")
{
    const Mlp net({1, 1});
    const double p[2] = {1.0, 0.0};
    const auto out = net.forward_jet(p, {Jet2::variable_x(0.37)}).front();
    CHECK(out.value == 0.37);
    CHECK(out.d_dx == 1.0);
    CHECK(out.d_dt == 0.0);
    CHECK(out.d2_dx2 == 0.0);
}

TEST_CASE("single hidden layer matches the closed forms")
{
    for (int hidden : {1, 5, 17, 40, 64})
        for (unsigned long long seed = 1; seed <= 10; ++seed) {
            const auto e = checks::single_layer(hidden, seed * 97 + hidden);
            CHECK(e.jet < 1e-12);
            CHECK(e.grad < 1e-10);
        }
}

TEST_CASE("deep network input derivatives match finite differences")
{
    for (unsigned long long seed : {3ULL, 4ULL, 5ULL})
        CHECK(checks::multilayer_input_fd(seed) < 1e-5);
}

TEST_CASE("zero output layer gives zero loss and zero gradient")
{
    const Mlp net({2, 6, 1});
    std::vector<double> p(net.parameter_count(), 0.3);
    for (std::size_t k = net.weight_offset(1); k < p.size(); ++k)
        p[k] = 0.0;
    Eigen::MatrixXd in = Eigen::MatrixXd::Zero(2, 4);
    in(0, 0) = 0.2;
    in(1, 0) = -0.1;
    in(0, 1) = 1.0;
    in(1, 2) = 1.0;
    JetCache cache;
    net.forward_jet(p.data(), in, cache);
    const double d2 = cache.output()(0, jet_dxx);
    CHECK(d2 == 0.0);
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(1, 4);
    adj(0, jet_dxx) = 2.0 * d2;
    std::vector<double> grad(p.size(), 0.0);
    net.backward_jet(p.data(), cache, adj, grad.data());
    for (double g : grad)
        CHECK(g == 0.0);
}

TEST_CASE("non-smooth activation is refused for jets")
{
    const Mlp net({1, 3, 1}, Activation::relu);
    std::vector<double> p(net.parameter_count(), 0.1);
    CHECK_THROWS_AS(net.forward_jet(p.data(), {Jet2::variable_x(0.1)}), MlpError);
    CHECK_NOTHROW(net.forward_value(p.data(), Eigen::MatrixXd::Constant(1, 1, 0.1)));
}

TEST_CASE("full loss gradient matches finite differences")
{
    Architecture small;
    small.f_hidden = {8, 8};

    SUBCASE("plain network, Case I")
    {
        CHECK(checks::loss_gradient_fd(checks::small_problem(ThermalCase::constant), small, 21) < 1e-5);
    }
    SUBCASE("one channel with the anchor term, Case II")
    {
        auto arch = small;
        arch.channels = 1;
        arch.ft_hidden = {6};
        CHECK(checks::loss_gradient_fd(checks::small_problem(ThermalCase::time_varying), arch, 22, 0.7) < 1e-5);
    }
    SUBCASE("two channels, Case III")
    {
        auto arch = small;
        arch.channels = 2;
        arch.ft_hidden = {5, 5};
        CHECK(checks::loss_gradient_fd(checks::small_problem(ThermalCase::space_time), arch, 23) < 1e-5);
    }
    SUBCASE("cross tree with the force input")
    {
        auto arch = small;
        arch.g_input = true;
        CHECK(checks::loss_gradient_fd(checks::small_problem(ThermalCase::constant, true), arch, 24) < 1e-5);
    }
}

TEST_CASE("loss gradients are bitwise reproducible across thread counts")
{
    const auto problem = checks::small_problem(ThermalCase::space_time);
    Architecture arch;
    arch.channels = 2;
    arch.ft_hidden = {5};
    arch.f_hidden = {8, 8};
    StpinnModel model(arch, problem.scaling);
    model.initialize(5);
    SamplerConfig cfg;
    cfg.counts = {300, 20, 20, 20};
    const auto set = sample_collocation(problem, cfg);
    const LossFunction loss(model, set, {}, 0.0, 32);
    CHECK(loss.chunk_count() > 4);

    const int before = thread_count();
    Eigen::VectorXd g1 = Eigen::VectorXd::Zero(model.parameter_count());
    Eigen::VectorXd g2 = g1, g3 = g1;
    set_thread_count(1);
    const auto e1 = loss.evaluate(model, &g1);
    const auto e2 = loss.evaluate(model, &g2);
    set_thread_count(4);
    const auto e3 = loss.evaluate(model, &g3);
    set_thread_count(before);
    CHECK(e1.value == e2.value);
    CHECK(e1.value == e3.value);
    CHECK(std::memcmp(g1.data(), g2.data(), sizeof(double) * static_cast<std::size_t>(g1.size())) == 0);
    CHECK(std::memcmp(g1.data(), g3.data(), sizeof(double) * static_cast<std::size_t>(g1.size())) == 0);
}

TEST_CASE("grad_check diagnostic")
{
    // f(x) = sum sin(x_k): exact gradient cos(x_k).
    const Objective obj = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = x.array().cos();
        return Evaluation{x.array().sin().sum(), {}};
    };
    Eigen::VectorXd x(6);
    x << 0.1, 0.5, 1.0, -0.3, 2.0, -1.4;
    CHECK(grad_check(obj, x, 6, 1e-5, 7) < 1e-8);
    // A huge step spoils the difference quotient and the check must say so.
    CHECK(grad_check(obj, x, 6, 1.0, 7) > 0.1);
    CHECK(grad_check(obj, x, 3, 1e-5, 9) == grad_check(obj, x, 3, 1e-5, 9));
    CHECK_THROWS(grad_check(obj, x, 3, 0.0, 9));

    const auto problem = checks::small_problem(ThermalCase::constant);
    Architecture arch;
    arch.f_hidden = {10, 10};
    CHECK(checks::loss_gradient_fd(problem, arch, 31) < 1e-5);
}
