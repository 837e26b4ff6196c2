#pragma once

#include "emstress/jet.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emstress {

class MlpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Activation { tanh, sigmoid, relu };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Elementwise tanh through the vectorized exponential.
Eigen::ArrayXXd fast_tanh(const Eigen::ArrayXXd& z);

/// Batches of jets are stored as rows x 4N matrices whose column blocks hold
/// value | d/dx | d/dt | d2/dx2 for N points.
enum JetBlock { jet_value = 0, jet_dx = 1, jet_dt = 2, jet_dxx = 3 };

struct JetCache {
    Eigen::Index points = 0;
    std::vector<Eigen::MatrixXd> activations;   ///< [0] is the input, back() the output
    std::vector<Eigen::MatrixXd> preactivations; ///< hidden layers only

    const Eigen::MatrixXd& output() const { return activations.back(); }
};

/// Fully connected network with a linear output layer. Parameters live in an
/// external flat vector: per layer, W (out x in, row-major) then b.
class Mlp {
public:
    Mlp() = default;
    /// sizes = {inputs, hidden..., outputs}
    explicit Mlp(std::vector<int> sizes, Activation activation = Activation::tanh);

    const std::vector<int>& sizes() const { return sizes_; }
    int inputs() const { return sizes_.front(); }
    int outputs() const { return sizes_.back(); }
    int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }
    Activation activation() const { return activation_; }
    /// (fan_in, fan_out) per layer
    std::vector<std::pair<int, int>> shapes() const;
    std::size_t parameter_count() const { return count_; }
    std::size_t weight_offset(int layer) const { return offsets_.at(static_cast<std::size_t>(layer)); }
    std::size_t bias_offset(int layer) const;

    /// Values only: x is inputs x N, returns outputs x N.
    Eigen::MatrixXd forward_value(const double* params, const Eigen::MatrixXd& x) const;

    /// Propagates input jets (inputs x 4N) and keeps what the reverse pass needs.
    void forward_jet(const double* params, const Eigen::MatrixXd& input, JetCache& cache) const;

    /// Reverse pass over forward_jet. output_adjoint has the output jet's shape.
    /// Adds parameter gradients into grad; writes input jet adjoints if asked.
    void backward_jet(const double* params, const JetCache& cache, const Eigen::MatrixXd& output_adjoint,
                      double* grad, Eigen::MatrixXd* input_adjoint = nullptr) const;

    /// Single point convenience wrapper around forward_jet.
    std::vector<Jet2> forward_jet(const double* params, const std::vector<Jet2>& inputs) const;

private:
    std::vector<int> sizes_;
    std::vector<std::size_t> offsets_;
    std::size_t count_ = 0;
    Activation activation_ = Activation::tanh;
};

} // namespace emstress
