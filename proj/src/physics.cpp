#include "emstress/physics.hpp"

#include <cmath>
#include <string>

namespace emstress {

void MaterialParams::validate() const
{
    const double all[] = {boltzmann,     charge,        effective_valence, activation_energy_ev, bulk_modulus,
                          self_diffusion, resistivity,  atomic_volume,     critical_stress,      atoms_per_volume};
    for (double v : all)
        if (!(v > 0.0) || !std::isfinite(v))
            throw PhysicsError("material parameters must be finite and strictly positive");
}

const char* to_string(ThermalCase c)
{
    switch (c) {
    case ThermalCase::constant: return "I";
    case ThermalCase::time_varying: return "II";
    case ThermalCase::space_time: return "III";
    }
    return "?";
}

ThermalCase thermal_case_from_string(const std::string& s)
{
    if (s == "I" || s == "1")
        return ThermalCase::constant;
    if (s == "II" || s == "2")
        return ThermalCase::time_varying;
    if (s == "III" || s == "3")
        return ThermalCase::space_time;
    throw PhysicsError("unknown thermal case '" + s + "' (expected I, II or III)");
}

double Oscillation::at(double t) const { return mean_k + amplitude_k * std::sin(omega * t); }
double Oscillation::derivative(double t) const { return amplitude_k * omega * std::cos(omega * t); }

double ThermalModel::node_temperature(double t) const
{
    return kind == ThermalCase::constant ? constant_k : t0.at(t);
}

void ThermalModel::validate() const
{
    if (kind == ThermalCase::constant) {
        if (!(constant_k > 0.0))
            throw PhysicsError("constant temperature must be positive");
        return;
    }
    if (!(t0.mean_k - std::abs(t0.amplitude_k) > 0.0))
        throw PhysicsError("T0(t) = mean + amplitude sin(omega t) must stay positive");
    if (kind == ThermalCase::space_time) {
        const auto& j = joule;
        if (!(j.k_metal > 0.0 && j.k_ild > 0.0 && j.t_ild > 0.0 && j.h_ild > 0.0))
            throw PhysicsError("Joule heating parameters must be positive");
    }
}

double em_driving_force(const MaterialParams& p, double current_density)
{
    return std::abs(p.effective_valence) * p.charge * p.resistivity * current_density / p.atomic_volume;
}

double arrhenius_diffusion(const MaterialParams& p, double temperature)
{
    if (!(temperature > 0.0))
        throw PhysicsError("temperature must be positive");
    return p.self_diffusion * std::exp(-p.activation_energy() / (p.boltzmann * temperature));
}

double kappa(const MaterialParams& p, double temperature)
{
    return arrhenius_diffusion(p, temperature) * p.bulk_modulus * p.atomic_volume / (p.boltzmann * temperature);
}

double kappa_temperature_slope(const MaterialParams& p, double temperature)
{
    const double k = kappa(p, temperature);
    return k * (p.activation_energy() / (p.boltzmann * temperature * temperature) - 1.0 / temperature);
}

double spreading_factor(const JouleParams& joule, double width, double spacing)
{
    const double w = width;
    const double d = spacing;
    const double bracket = 0.5 * std::log((w + d) / w) + (joule.t_ild - 0.5 * d) / (w + d);
    return 1.0 / (w / joule.t_ild * bracket);
}

double healing_length(const ThermalModel& thermal, const Segment& segment)
{
    if (thermal.kind != ThermalCase::space_time)
        throw PhysicsError("healing length requires the Joule heating (case III) thermal model");
    const auto& j = thermal.joule;
    const double s = spreading_factor(j, segment.width, segment.spacing);
    return std::sqrt(j.k_metal * j.h_ild / (j.k_ild * s));
}

namespace {

// Amplitude j^2 rho L_H^2 / k_M of the Joule temperature bump.
double joule_amplitude(const ThermalModel& thermal, const MaterialParams& p, const Segment& segment, double lh)
{
    const double j = std::abs(segment.current_density);
    return j * j * p.resistivity * lh * lh / thermal.joule.k_metal;
}

} // namespace

double temperature(const ThermalModel& thermal, const MaterialParams& p, const Segment& segment,
                   double x_centered, double t)
{
    double T = thermal.node_temperature(t);
    if (thermal.kind == ThermalCase::space_time) {
        const double lh = healing_length(thermal, segment);
        // 1 - cosh(a)/cosh(b) as a product; the direct form cancels badly when x << L_H.
        const double a = x_centered / lh, b = segment.length / (2.0 * lh);
        const double bump = 2.0 * std::sinh(0.5 * (b + a)) * std::sinh(0.5 * (b - a)) / std::cosh(b);
        T += joule_amplitude(thermal, p, segment, lh) * bump;
    }
    if (!(T > 0.0))
        throw PhysicsError("temperature is not positive");
    return T;
}

double temperature_gradient(const ThermalModel& thermal, const MaterialParams& p, const Segment& segment,
                            double x_centered, double)
{
    if (thermal.kind != ThermalCase::space_time)
        return 0.0;
    const double lh = healing_length(thermal, segment);
    const double j = std::abs(segment.current_density);
    return -(j * j * p.resistivity * lh / thermal.joule.k_metal) * std::sinh(x_centered / lh) /
           std::cosh(segment.length / (2.0 * lh));
}

KappaSample kappa_and_gradient(const ThermalModel& thermal, const MaterialParams& p, const Segment& segment,
                               double x_centered, double t)
{
    const double T = temperature(thermal, p, segment, x_centered, t);
    KappaSample out;
    out.value = kappa(p, T);
    if (thermal.kind == ThermalCase::space_time)
        out.gradient = kappa_temperature_slope(p, T) * temperature_gradient(thermal, p, segment, x_centered, t);
    return out;
}

double atomic_flux(const MaterialParams& p, double kappa_value, double stress_gradient, double driving_force)
{
    return p.atoms_per_volume / p.bulk_modulus * kappa_value * (stress_gradient + driving_force);
}

} // namespace emstress
