#include "emstress/mlp.hpp"

namespace emstress {

namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorOut = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// First two derivatives of the activation expressed through its value h.
struct TanhDerivs {
    static void at(double h, double& s, double& s1, double& s2)
    {
        s = 1.0 - h * h;
        s1 = -2.0 * h * s;
        s2 = -2.0 * s * s + 4.0 * h * h * s;
    }
};

struct SigmoidDerivs {
    static void at(double h, double& s, double& s1, double& s2)
    {
        s = h * (1.0 - h);
        s1 = s * (1.0 - 2.0 * h);
        s2 = s1 * (1.0 - 2.0 * h) - 2.0 * s * s;
    }
};

// a = act(z) as a jet; h already holds act(z_value). Blocks are contiguous
// runs of len = rows * n values.
template <class D>
void activation_forward(const double* z, double* a, Eigen::Index len)
{
    const double* zdx = z + len;
    const double* zdt = z + 2 * len;
    const double* zdxx = z + 3 * len;
    const double* h = a;
    double* adx = a + len;
    double* adt = a + 2 * len;
    double* adxx = a + 3 * len;
    for (Eigen::Index i = 0; i < len; ++i) {
        double s, s1, s2;
        D::at(h[i], s, s1, s2);
        adx[i] = s * zdx[i];
        adt[i] = s * zdt[i];
        adxx[i] = s * zdxx[i] + s1 * zdx[i] * zdx[i];
    }
}

// Adjoint of the activation jet: ga (adjoint of a) -> gz (adjoint of z).
template <class D>
void activation_backward(const double* z, const double* h, const double* ga, double* gz, Eigen::Index len)
{
    const double* zdx = z + len;
    const double* zdt = z + 2 * len;
    const double* zdxx = z + 3 * len;
    for (Eigen::Index i = 0; i < len; ++i) {
        double s, s1, s2;
        D::at(h[i], s, s1, s2);
        const double av = ga[i], adx = ga[len + i], adt = ga[2 * len + i], adxx = ga[3 * len + i];
        gz[i] = av * s + s1 * (adx * zdx[i] + adt * zdt[i] + adxx * zdxx[i]) + adxx * s2 * zdx[i] * zdx[i];
        gz[len + i] = adx * s + 2.0 * adxx * s1 * zdx[i];
        gz[2 * len + i] = adt * s;
        gz[3 * len + i] = adxx * s;
    }
}

Eigen::ArrayXXd activation_value(Activation a, const Eigen::ArrayXXd& z)
{
    switch (a) {
    case Activation::tanh: return fast_tanh(z);
    case Activation::sigmoid: return 1.0 / (1.0 + (-z).exp());
    case Activation::relu: return z.max(0.0);
    }
    return z;
}

} // namespace

const char* to_string(Activation a)
{
    switch (a) {
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::relu: return "relu";
    }
    return "?";
}

Activation activation_from_string(const std::string& s)
{
    if (s == "tanh")
        return Activation::tanh;
    if (s == "sigmoid")
        return Activation::sigmoid;
    if (s == "relu")
        return Activation::relu;
    throw MlpError("unknown activation '" + s + "'");
}

Eigen::ArrayXXd fast_tanh(const Eigen::ArrayXXd& z)
{
    return 1.0 - 2.0 / ((2.0 * z).exp() + 1.0);
}

Mlp::Mlp(std::vector<int> sizes, Activation activation) : sizes_(std::move(sizes)), activation_(activation)
{
    if (sizes_.size() < 2)
        throw MlpError("a network needs at least an input and an output size");
    for (int n : sizes_)
        if (n < 1)
            throw MlpError("layer sizes must be positive");
    for (int l = 0; l < layer_count(); ++l) {
        offsets_.push_back(count_);
        count_ += static_cast<std::size_t>(sizes_[l + 1]) * static_cast<std::size_t>(sizes_[l] + 1);
    }
}

std::vector<std::pair<int, int>> Mlp::shapes() const
{
    std::vector<std::pair<int, int>> out;
    for (int l = 0; l < layer_count(); ++l)
        out.emplace_back(sizes_[static_cast<std::size_t>(l)], sizes_[static_cast<std::size_t>(l) + 1]);
    return out;
}

std::size_t Mlp::bias_offset(int layer) const
{
    const auto l = static_cast<std::size_t>(layer);
    return offsets_.at(l) + static_cast<std::size_t>(sizes_[l + 1]) * static_cast<std::size_t>(sizes_[l]);
}

Eigen::MatrixXd Mlp::forward_value(const double* params, const Eigen::MatrixXd& x) const
{
    if (x.rows() != inputs())
        throw MlpError("input row count does not match the network");
    Eigen::MatrixXd a = x;
    for (int l = 0; l < layer_count(); ++l) {
        const auto l_ = static_cast<std::size_t>(l);
        const RowMajorMap W(params + offsets_[l_], sizes_[l_ + 1], sizes_[l_]);
        const Eigen::Map<const Eigen::VectorXd> b(params + bias_offset(l), sizes_[l_ + 1]);
        Eigen::MatrixXd z(W.rows(), a.cols());
        z.noalias() = W * a;
        z.colwise() += b;
        if (l + 1 < layer_count())
            a = activation_value(activation_, z.array()).matrix();
        else
            a = std::move(z);
    }
    return a;
}

void Mlp::forward_jet(const double* params, const Eigen::MatrixXd& input, JetCache& cache) const
{
    if (input.rows() != inputs() || input.cols() % 4 != 0)
        throw MlpError("jet input must be inputs x 4N");
    if (activation_ == Activation::relu)
        throw MlpError("relu has no second derivative; jets need a smooth activation");
    const Eigen::Index n = input.cols() / 4;
    cache.points = n;
    cache.activations.resize(static_cast<std::size_t>(layer_count()) + 1);
    cache.preactivations.resize(static_cast<std::size_t>(layer_count()) - 1);
    cache.activations[0] = input;

    for (int l = 0; l < layer_count(); ++l) {
        const auto l_ = static_cast<std::size_t>(l);
        const RowMajorMap W(params + offsets_[l_], sizes_[l_ + 1], sizes_[l_]);
        const Eigen::Map<const Eigen::VectorXd> b(params + bias_offset(l), sizes_[l_ + 1]);
        const bool hidden = l + 1 < layer_count();
        Eigen::MatrixXd& z = hidden ? cache.preactivations[l_] : cache.activations[l_ + 1];
        z.resize(W.rows(), 4 * n);
        z.noalias() = W * cache.activations[l_];
        z.leftCols(n).colwise() += b;
        if (!hidden)
            break;

        Eigen::MatrixXd& a = cache.activations[l_ + 1];
        a.resize(z.rows(), 4 * n);
        a.leftCols(n) = activation_value(activation_, z.leftCols(n).array()).matrix();
        if (activation_ == Activation::tanh)
            activation_forward<TanhDerivs>(z.data(), a.data(), z.rows() * n);
        else
            activation_forward<SigmoidDerivs>(z.data(), a.data(), z.rows() * n);
    }
}

void Mlp::backward_jet(const double* params, const JetCache& cache, const Eigen::MatrixXd& output_adjoint,
                       double* grad, Eigen::MatrixXd* input_adjoint) const
{
    const Eigen::Index n = cache.points;
    if (output_adjoint.rows() != outputs() || output_adjoint.cols() != 4 * n)
        throw MlpError("output adjoint shape does not match the cached forward pass");

    Eigen::MatrixXd gz = output_adjoint;
    Eigen::MatrixXd ga;
    for (int l = layer_count() - 1; l >= 0; --l) {
        const auto l_ = static_cast<std::size_t>(l);
        const RowMajorMap W(params + offsets_[l_], sizes_[l_ + 1], sizes_[l_]);
        RowMajorOut gW(grad + offsets_[l_], sizes_[l_ + 1], sizes_[l_]);
        Eigen::Map<Eigen::VectorXd> gb(grad + bias_offset(l), sizes_[l_ + 1]);
        gW.noalias() += gz * cache.activations[l_].transpose();
        gb += gz.leftCols(n).rowwise().sum();

        if (l == 0) {
            if (input_adjoint)
                input_adjoint->noalias() = W.transpose() * gz;
            break;
        }
        ga.noalias() = W.transpose() * gz;

        // Adjoint of the activation jet of layer l-1.
        const Eigen::MatrixXd& z = cache.preactivations[l_ - 1];
        const double* h = cache.activations[l_].data();
        gz.resize(z.rows(), 4 * n);
        if (activation_ == Activation::tanh)
            activation_backward<TanhDerivs>(z.data(), h, ga.data(), gz.data(), z.rows() * n);
        else
            activation_backward<SigmoidDerivs>(z.data(), h, ga.data(), gz.data(), z.rows() * n);
    }
}

std::vector<Jet2> Mlp::forward_jet(const double* params, const std::vector<Jet2>& inputs) const
{
    if (static_cast<int>(inputs.size()) != this->inputs())
        throw MlpError("input count does not match the network");
    Eigen::MatrixXd in(this->inputs(), 4);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        in(r, 0) = inputs[i].value;
        in(r, 1) = inputs[i].d_dx;
        in(r, 2) = inputs[i].d_dt;
        in(r, 3) = inputs[i].d2_dx2;
    }
    JetCache cache;
    forward_jet(params, in, cache);
    const auto& out = cache.output();
    std::vector<Jet2> result(static_cast<std::size_t>(outputs()));
    for (int k = 0; k < outputs(); ++k)
        result[static_cast<std::size_t>(k)] = {out(k, 0), out(k, 1), out(k, 2), out(k, 3)};
    return result;
}

} // namespace emstress
