#pragma once

#include "emstress/geometry.hpp"

#include <numbers>
#include <stdexcept>

namespace emstress {

class PhysicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Copper interconnect constants. Defaults are the usual Cu/SiO2 values used
/// throughout the configs.
struct MaterialParams {
    double boltzmann = 1.38e-23;          ///< J/K
    double charge = 1.6e-19;              ///< C
    double effective_valence = 10.0;      ///< |Z*|
    double activation_energy_ev = 1.1;    ///< eV
    double bulk_modulus = 1e11;           ///< Pa
    double self_diffusion = 5.2e-5;       ///< D0, m^2/s
    double resistivity = 3e-8;            ///< Ohm m
    double atomic_volume = 8.78e-30;      ///< m^3
    double critical_stress = 4e8;         ///< Pa
    double atoms_per_volume = 1.0;        ///< C; cancels from every boundary condition

    /// E_a in joules, converted with the configured elementary charge.
    double activation_energy() const { return activation_energy_ev * charge; }
    void validate() const;
};

enum class ThermalCase { constant, time_varying, space_time };

const char* to_string(ThermalCase c);
ThermalCase thermal_case_from_string(const std::string& s);

/// T0(t) = mean + amplitude sin(omega t)
struct Oscillation {
    double mean_k = 350.0;
    double amplitude_k = 30.0;
    double omega = 4e-8 * std::numbers::pi;  ///< rad/s

    double at(double t) const;
    double derivative(double t) const;
};

/// Joule heating with via heat sinking.
struct JouleParams {
    double k_metal = 400.0;     ///< W/(m K)
    double k_ild = 1.2;         ///< W/(m K)
    double t_ild = 0.8e-6;      ///< m
    double h_ild = 0.8e-6;      ///< m
};

struct ThermalModel {
    ThermalCase kind = ThermalCase::constant;
    double constant_k = 350.0;
    Oscillation t0;
    JouleParams joule;

    /// Temperature at the wire nodes (and everywhere for cases I and II).
    double node_temperature(double t) const;
    void validate() const;
};

/// G = |Z*| e rho j / Omega, sign following j.
double em_driving_force(const MaterialParams& p, double current_density);

/// D_a = D0 exp(-E_a / kT)
double arrhenius_diffusion(const MaterialParams& p, double temperature);

/// kappa = D_a B Omega / (kT)
double kappa(const MaterialParams& p, double temperature);

/// d kappa / dT
double kappa_temperature_slope(const MaterialParams& p, double temperature);

/// Heat spreading factor s of a line with the given width and spacing.
double spreading_factor(const JouleParams& joule, double width, double spacing);

/// Healing length L_H. Only defined for the space-time thermal case.
double healing_length(const ThermalModel& thermal, const Segment& segment);

/// Temperature at a segment-centered coordinate x in [-L/2, L/2].
double temperature(const ThermalModel& thermal, const MaterialParams& p, const Segment& segment,
                   double x_centered, double t);

/// dT/dx at a segment-centered coordinate.
double temperature_gradient(const ThermalModel& thermal, const MaterialParams& p, const Segment& segment,
                            double x_centered, double t);

struct KappaSample {
    double value = 0.0;     ///< m^2/s
    double gradient = 0.0;  ///< d kappa / dx along the segment axis, m/s
};

KappaSample kappa_and_gradient(const ThermalModel& thermal, const MaterialParams& p, const Segment& segment,
                               double x_centered, double t);

/// J = (D_a C Omega / kT)(d sigma/dx + G) = (C / B) kappa (d sigma/dx + G)
double atomic_flux(const MaterialParams& p, double kappa_value, double stress_gradient, double driving_force);

} // namespace emstress
