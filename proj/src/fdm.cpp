#include "emstress/fdm.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace emstress {

const char* to_string(FdmScheme s)
{
    return s == FdmScheme::explicit_euler ? "explicit" : "implicit";
}

FdmScheme fdm_scheme_from_string(const std::string& s)
{
    if (s == "explicit")
        return FdmScheme::explicit_euler;
    if (s == "implicit")
        return FdmScheme::implicit_euler;
    throw FdmError("unknown FDM scheme '" + s + "' (expected explicit or implicit)");
}

namespace {

struct Face {
    int left = 0;      // dof at the lower local coordinate
    int right = 0;
    int segment = 0;
    int index = 0;     // grid point index of the left dof
};

class Discretization {
public:
    Discretization(const InterconnectTree& tree, const ThermalModel& thermal, const MaterialParams& params,
                   int points)
        : tree_(tree), thermal_(thermal), params_(params)
    {
        const int n_nodes = static_cast<int>(tree.nodes().size());
        int next = n_nodes;
        for (const auto& s : tree.segments()) {
            std::vector<int> dofs(static_cast<std::size_t>(points));
            dofs.front() = s.node_a;
            dofs.back() = s.node_b;
            for (int i = 1; i + 1 < points; ++i)
                dofs[static_cast<std::size_t>(i)] = next++;
            dofs_.push_back(std::move(dofs));
            const double h = s.length / (points - 1);
            spacing_.push_back(h);
            force_.push_back(em_driving_force(params, s.current_density));
            for (int i = 0; i + 1 < points; ++i)
                faces_.push_back({dofs_.back()[static_cast<std::size_t>(i)],
                                  dofs_.back()[static_cast<std::size_t>(i + 1)], s.id, i});
        }
        unknowns_ = next;
        volume_.assign(static_cast<std::size_t>(unknowns_), 0.0);
        for (const auto& s : tree.segments()) {
            const double h = spacing_[static_cast<std::size_t>(s.id)];
            const auto& dofs = dofs_[static_cast<std::size_t>(s.id)];
            for (std::size_t i = 0; i < dofs.size(); ++i)
                volume_[static_cast<std::size_t>(dofs[i])] += (i == 0 || i + 1 == dofs.size()) ? 0.5 * h : h;
        }
        face_kappa_.resize(faces_.size());
        time_dependent_ = thermal.kind != ThermalCase::constant;
    }

    int unknowns() const { return unknowns_; }
    const std::vector<std::vector<int>>& dofs() const { return dofs_; }
    const std::vector<double>& spacing() const { return spacing_; }
    const std::vector<double>& volume() const { return volume_; }
    bool time_dependent() const { return time_dependent_; }

    /// Face diffusivities at time t (arithmetic mean of the adjacent nodes).
    void update(double t)
    {
        max_kappa_ = 0.0;
        std::size_t f = 0;
        for (const auto& s : tree_.segments()) {
            const int points = static_cast<int>(dofs_[static_cast<std::size_t>(s.id)].size());
            const double h = spacing_[static_cast<std::size_t>(s.id)];
            double left = node_kappa(s, 0.0, t);
            for (int i = 0; i + 1 < points; ++i) {
                const double x = (i + 1 == points - 1) ? s.length : (i + 1) * h;
                const double right = node_kappa(s, x, t);
                face_kappa_[f++] = 0.5 * (left + right);
                max_kappa_ = std::max({max_kappa_, left, right});
                left = right;
            }
        }
    }

    double max_kappa() const { return max_kappa_; }

    /// K sigma + f, the right-hand side of V dsigma/dt.
    void apply(const Eigen::VectorXd& sigma, Eigen::VectorXd& out) const
    {
        out.setZero(unknowns_);
        for (std::size_t k = 0; k < faces_.size(); ++k) {
            const auto& face = faces_[k];
            const auto sid = static_cast<std::size_t>(face.segment);
            const double flux =
                face_kappa_[k] * ((sigma[face.right] - sigma[face.left]) / spacing_[sid] + force_[sid]);
            out[face.left] += flux;
            out[face.right] -= flux;
        }
    }

    /// Assembles V/dt - K and the forcing vector f.
    void assemble(double dt, Eigen::SparseMatrix<double>& A, Eigen::VectorXd& forcing) const
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(unknowns_) + 4 * faces_.size());
        for (int i = 0; i < unknowns_; ++i)
            trip.emplace_back(i, i, volume_[static_cast<std::size_t>(i)] / dt);
        forcing.setZero(unknowns_);
        for (std::size_t k = 0; k < faces_.size(); ++k) {
            const auto& face = faces_[k];
            const auto sid = static_cast<std::size_t>(face.segment);
            const double a = face_kappa_[k] / spacing_[sid];
            trip.emplace_back(face.left, face.left, a);
            trip.emplace_back(face.right, face.right, a);
            trip.emplace_back(face.left, face.right, -a);
            trip.emplace_back(face.right, face.left, -a);
            forcing[face.left] += face_kappa_[k] * force_[sid];
            forcing[face.right] -= face_kappa_[k] * force_[sid];
        }
        A.resize(unknowns_, unknowns_);
        A.setFromTriplets(trip.begin(), trip.end());
    }

private:
    double node_kappa(const Segment& s, double x, double t) const
    {
        return kappa(params_, temperature(thermal_, params_, s, x - 0.5 * s.length, t));
    }

    const InterconnectTree& tree_;
    const ThermalModel& thermal_;
    const MaterialParams& params_;
    std::vector<std::vector<int>> dofs_;
    std::vector<double> spacing_;
    std::vector<double> force_;
    std::vector<double> volume_;
    std::vector<Face> faces_;
    std::vector<double> face_kappa_;
    double max_kappa_ = 0.0;
    int unknowns_ = 0;
    bool time_dependent_ = false;
};

} // namespace

FdmSolution fdm_solve(const InterconnectTree& tree, const ThermalModel& thermal, const MaterialParams& params,
                      const FdmSettings& settings)
{
    if (settings.points_per_segment < 2)
        throw FdmError("each segment needs at least 2 grid points");
    if (!(settings.dt > 0.0) || !(settings.t_end >= 0.0))
        throw FdmError("dt must be positive and t_end non-negative");
    if (settings.first_dt > 0.0 && !(settings.growth >= 1.0))
        throw FdmError("geometric step growth must be >= 1");
    params.validate();
    thermal.validate();

    Discretization disc(tree, thermal, params, settings.points_per_segment);
    const int n = disc.unknowns();
    double h_min = disc.spacing().front();
    for (double h : disc.spacing())
        h_min = std::min(h_min, h);

    std::vector<double> outputs = settings.output_times;
    std::sort(outputs.begin(), outputs.end());
    outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
    for (double t : outputs)
        if (t < 0.0 || t > settings.t_end)
            throw FdmError("output time outside [0, t_end]");
    const bool store_all = outputs.empty();

    FdmSolution sol;
    sol.settings_ = settings;
    sol.segment_dofs_ = disc.dofs();
    sol.spacing_ = disc.spacing();
    sol.unknowns_ = static_cast<std::size_t>(n);

    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(n);
    std::size_t next_output = 0;
    auto record = [&](double t) {
        sol.times_.push_back(t);
        sol.values_.emplace_back(sigma.data(), sigma.data() + n);
    };
    if (store_all || (!outputs.empty() && outputs.front() == 0.0)) {
        record(0.0);
        if (!store_all)
            ++next_output;
    }

    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd forcing(n), rhs(n), work(n);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool pattern_ready = false;
    double factored_dt = -1.0;
    Eigen::Map<const Eigen::VectorXd> volume(disc.volume().data(), n);

    double t = 0.0;
    double step = settings.first_dt > 0.0 ? std::min(settings.first_dt, settings.dt) : settings.dt;
    const double eps = 1e-12 * std::max(1.0, settings.t_end);
    while (t < settings.t_end - eps) {
        double target = settings.t_end;
        if (!store_all && next_output < outputs.size())
            target = outputs[next_output];
        double dt = std::min(step, target - t);
        // Avoid a sliver step right before an output time.
        if (target - (t + dt) < 1e-6 * dt)
            dt = target - t;
        const double t_next = (target - (t + dt) <= eps) ? target : t + dt;
        dt = t_next - t;

        if (settings.scheme == FdmScheme::explicit_euler) {
            disc.update(t);
            const double ratio = disc.max_kappa() * dt / (h_min * h_min);
            if (ratio > 0.5) {
                std::ostringstream msg;
                msg << "explicit scheme unstable: kappa_max*dt/h^2 = " << ratio
                    << " exceeds the bound 0.5 (kappa_max = " << disc.max_kappa() << " m^2/s, dt = " << dt
                    << " s, h = " << h_min << " m; need dt <= " << 0.5 * h_min * h_min / disc.max_kappa()
                    << " s)";
                throw FdmError(msg.str());
            }
            disc.apply(sigma, work);
            sigma.array() += dt * work.array() / volume.array();
        } else {
            const bool refactor = disc.time_dependent() || dt != factored_dt || !pattern_ready;
            if (refactor) {
                disc.update(t_next);
                disc.assemble(dt, A, forcing);
                if (!pattern_ready) {
                    lu.analyzePattern(A);
                    pattern_ready = true;
                }
                lu.factorize(A);
                if (lu.info() != Eigen::Success)
                    throw FdmError("singular linear system in implicit step");
                factored_dt = dt;
            }
            rhs = volume.cwiseProduct(sigma) / dt + forcing;
            sigma = lu.solve(rhs);
        }
        if (!sigma.allFinite())
            throw FdmError("non-finite stress encountered");
        t = t_next;
        ++sol.steps_;
        if (settings.first_dt > 0.0)
            step = std::min(step * settings.growth, settings.dt);

        if (store_all) {
            record(t);
        } else if (next_output < outputs.size() && t >= outputs[next_output] - eps) {
            record(outputs[next_output]);
            ++next_output;
        }
    }
    while (!store_all && next_output < outputs.size()) {
        record(outputs[next_output]);
        ++next_output;
    }
    return sol;
}

std::vector<double> FdmSolution::grid(int segment) const
{
    const auto& dofs = segment_dofs_.at(static_cast<std::size_t>(segment));
    const double h = spacing_[static_cast<std::size_t>(segment)];
    std::vector<double> x(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i)
        x[i] = static_cast<double>(i) * h;
    x.back() = h * static_cast<double>(dofs.size() - 1);
    return x;
}

double FdmSolution::value(int segment, int i, std::size_t k) const
{
    const auto& dofs = segment_dofs_.at(static_cast<std::size_t>(segment));
    return values_.at(k)[static_cast<std::size_t>(dofs.at(static_cast<std::size_t>(i)))];
}

double FdmSolution::node_value(int node, std::size_t k) const
{
    return values_.at(k).at(static_cast<std::size_t>(node));
}

double FdmSolution::stress(int segment, double local, double t) const
{
    if (times_.empty())
        throw FdmError("empty FDM solution");
    const double tol = 1e-9 * std::max(1.0, times_.back());
    if (t < times_.front() - tol || t > times_.back() + tol)
        throw FdmError("query time outside the stored FDM time range");

    const auto& dofs = segment_dofs_.at(static_cast<std::size_t>(segment));
    const double h = spacing_[static_cast<std::size_t>(segment)];
    const int last = static_cast<int>(dofs.size()) - 1;
    const double u = std::clamp(local / h, 0.0, static_cast<double>(last));
    const int i = std::min(static_cast<int>(u), last - 1);
    const double wx = u - i;

    auto at = [&](std::size_t k) {
        const auto& v = values_[k];
        return (1.0 - wx) * v[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])] +
               wx * v[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i + 1)])];
    };

    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.end())
        return at(times_.size() - 1);
    std::size_t k1 = static_cast<std::size_t>(it - times_.begin());
    if (*it == t || k1 == 0)
        return at(k1);
    const std::size_t k0 = k1 - 1;
    const double w = (t - times_[k0]) / (times_[k1] - times_[k0]);
    return (1.0 - w) * at(k0) + w * at(k1);
}

void FdmSolution::write_csv(std::ostream& os) const
{
    write_csv(os, times_);
}

void FdmSolution::write_csv(std::ostream& os, const std::vector<double>& times) const
{
    os << "# fdm scheme=" << to_string(settings_.scheme) << " mesh=" << settings_.points_per_segment
       << " dt=" << settings_.dt << " first_dt=" << settings_.first_dt << " growth=" << settings_.growth
       << " steps=" << steps_ << "\n";
    os << "segment_id,x_m,t_s,sigma_pa\n";
    os << std::setprecision(17);
    for (double want : times) {
        const auto it = std::find_if(times_.begin(), times_.end(), [&](double t) {
            return std::abs(t - want) <= 1e-12 * std::max(1.0, std::abs(want));
        });
        if (it == times_.end())
            throw FdmError("time " + std::to_string(want) + " s was not stored by the solver");
        const auto k = static_cast<std::size_t>(it - times_.begin());
        for (int s = 0; s < segment_count(); ++s) {
            const auto x = grid(s);
            for (std::size_t i = 0; i < x.size(); ++i)
                os << s << ',' << x[i] << ',' << times_[k] << ',' << value(s, static_cast<int>(i), k) << '\n';
        }
    }
}

} // namespace emstress
