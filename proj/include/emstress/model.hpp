#pragma once

#include "emstress/geometry.hpp"
#include "emstress/jet.hpp"
#include "emstress/mlp.hpp"
#include "emstress/physics.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

namespace emstress {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// sigma_hat = w_sigma sigma, x_hat = w_x x, t_hat = w_t t.
struct ScalingConfig {
    double sigma = 1e-9;  ///< 1/Pa
    double x = 1e5;       ///< 1/m
    double t = 1e-7;      ///< 1/s

    void validate() const;

    double scale_x(double meters) const { return x * meters; }
    double scale_t(double seconds) const { return t * seconds; }
    double unscale_t(double t_hat) const { return t_hat / t; }
    double scale_stress(double pa) const { return sigma * pa; }
    double unscale_stress(double s_hat) const { return s_hat / sigma; }
    /// G_hat = (w_sigma / w_x) G
    double scale_force(double g) const { return g * sigma / x; }
    /// kappa_hat = (w_x^2 / w_t) kappa
    double scale_kappa(double k) const { return k * x * x / t; }
    /// d kappa_hat / d x_hat = (w_x / w_t) d kappa / dx
    double scale_kappa_gradient(double kx) const { return kx * x / t; }
    /// r_hat = (w_sigma / w_t) R for a physical residual R in Pa/s.
    double residual_factor() const { return sigma / t; }
};

/// Layer layout of the network stack. channels = 0 is a plain PINN whose F
/// takes the scaled time directly.
struct Architecture {
    int channels = 0;
    std::vector<int> ft_hidden;
    std::vector<int> f_hidden = std::vector<int>(10, 40);
    int spatial_dim = 1;
    bool g_input = false;
    Activation activation = Activation::tanh;

    void validate() const;
    /// {1, hidden..., channels}; empty when channels == 0.
    std::vector<int> ft_sizes() const;
    /// {spatial_dim [+1], hidden..., 1} with the time channel as last input.
    std::vector<int> f_sizes() const;
    int f_time_row() const { return spatial_dim + (g_input ? 1 : 0); }

    static Architecture default_for(ThermalCase c);
};

/// Inputs for a batch of P points. The unit direction is the segment's local
/// axis; derivatives are taken along it.
struct ModelBatch {
    Eigen::MatrixXd coord;   ///< spatial_dim x P, scaled
    Eigen::MatrixXd dir;     ///< spatial_dim x P
    Eigen::VectorXd g;       ///< P, scaled force (used when g_input)
    Eigen::VectorXd t;       ///< P, scaled time

    Eigen::Index size() const { return t.size(); }
    void resize(int dim, Eigen::Index p);
};

/// Forward state of a batch. sigma holds rows value, d/dx, d/dt, d2/dx2.
struct ModelJets {
    Eigen::Index points = 0;
    Eigen::MatrixXd sigma;   ///< 4 x P
    JetCache ft_cache;
    JetCache f_cache;

    /// Raw F output jet of channel k at point p, component b (JetBlock). The
    /// d/dt component is with respect to F's own time input.
    double f_out(int block, int k, Eigen::Index p) const
    {
        return f_cache.output()(0, (block * channels_or_one + k) * points + p);
    }
    int channels_or_one = 1;
};

/// F_t, F and the channel weights theta, with all trainable values in one
/// flat vector laid out as [F_t | F | theta].
class StpinnModel {
public:
    StpinnModel(Architecture arch, ScalingConfig scaling);

    const Architecture& architecture() const { return arch_; }
    const ScalingConfig& scaling() const { return scaling_; }
    const Mlp& ft() const { return ft_; }
    const Mlp& f() const { return f_; }
    int channels() const { return arch_.channels; }

    Eigen::VectorXd& parameters() { return params_; }
    const Eigen::VectorXd& parameters() const { return params_; }
    void set_parameters(const Eigen::VectorXd& p);
    Eigen::Index parameter_count() const { return params_.size(); }
    std::size_t ft_offset() const { return 0; }
    std::size_t f_offset() const { return ft_.parameter_count(); }
    std::size_t theta_offset() const { return ft_.parameter_count() + f_.parameter_count(); }
    double theta(int k) const { return params_[static_cast<Eigen::Index>(theta_offset()) + k]; }

    /// Xavier weights, zero biases, theta_k = 1/n.
    void initialize(unsigned long long seed);

    /// Batched jets and their reverse pass. f_adjoint, if given, is an extra
    /// adjoint on F's raw output jet (1 x 4 n P), used by the anchoring term.
    void forward_jets(const ModelBatch& batch, ModelJets& jets) const;
    void backward_jets(const ModelJets& jets, const Eigen::MatrixXd& sigma_adjoint,
                       const Eigen::MatrixXd* f_adjoint, double* grad) const;

    /// Single point jet. d_dx is along dir.
    Jet2 forward(Point2 coord, Point2 dir, double g_hat, double t_hat) const;

    /// Values only. tau_ratio rescales the learned time variables about their
    /// value at t = 0 (diffusivity rescaling); 1 leaves them unchanged.
    Eigen::VectorXd evaluate(const ModelBatch& batch, double tau_ratio = 1.0) const;

    /// F_t(t_hat), channels x N. Requires channels > 0.
    Eigen::MatrixXd time_transform(const Eigen::VectorXd& t_hat) const;

private:
    Architecture arch_;
    ScalingConfig scaling_;
    Mlp ft_;
    Mlp f_;
    Eigen::VectorXd params_;
};

} // namespace emstress
