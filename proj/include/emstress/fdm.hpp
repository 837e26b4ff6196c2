#pragma once

#include "emstress/field.hpp"
#include "emstress/geometry.hpp"
#include "emstress/physics.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace emstress {

class FdmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class FdmScheme { explicit_euler, implicit_euler };

const char* to_string(FdmScheme s);
FdmScheme fdm_scheme_from_string(const std::string& s);

struct FdmSettings {
    int points_per_segment = 201;
    double dt = 1e4;             ///< largest time step, s
    double first_dt = 0.0;       ///< > 0 enables geometric growth from this step up to dt
    double growth = 1.02;        ///< step ratio for geometric refinement
    double t_end = 1e8;
    FdmScheme scheme = FdmScheme::implicit_euler;
    /// Times at which the solution is stored. Empty stores every step.
    std::vector<double> output_times;
};

/// Finite-volume solution of the tree stress equations. Junction nodes are a
/// single shared unknown; terminal and junction control volumes are half cells.
class FdmSolution final : public StressField {
public:
    double stress(int segment, double local, double t) const override;

    int segment_count() const { return static_cast<int>(segment_dofs_.size()); }
    /// Local coordinates of the grid of one segment.
    std::vector<double> grid(int segment) const;
    double spacing(int segment) const { return spacing_.at(static_cast<std::size_t>(segment)); }
    const std::vector<double>& times() const { return times_; }
    /// Stress at grid point i of a segment, stored time index k.
    double value(int segment, int i, std::size_t k) const;
    /// Stress at a tree node, stored time index k.
    double node_value(int node, std::size_t k) const;

    const FdmSettings& settings() const { return settings_; }
    std::size_t step_count() const { return steps_; }
    std::size_t unknowns() const { return unknowns_; }

    /// Writes `segment_id,x_m,t_s,sigma_pa` rows preceded by a provenance line.
    void write_csv(std::ostream& os) const;
    /// Only the listed times, each of which must have been stored.
    void write_csv(std::ostream& os, const std::vector<double>& times) const;

private:
    friend FdmSolution fdm_solve(const InterconnectTree&, const ThermalModel&, const MaterialParams&,
                                 const FdmSettings&);

    FdmSettings settings_;
    std::vector<std::vector<int>> segment_dofs_;
    std::vector<double> spacing_;
    std::vector<double> times_;
    std::vector<std::vector<double>> values_;
    std::size_t steps_ = 0;
    std::size_t unknowns_ = 0;
};

FdmSolution fdm_solve(const InterconnectTree& tree, const ThermalModel& thermal, const MaterialParams& params,
                      const FdmSettings& settings);

} // namespace emstress
