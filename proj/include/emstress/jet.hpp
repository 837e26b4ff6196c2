#pragma once

#include <cmath>

namespace emstress {

/// Truncated Taylor jet of a function of (x, t): value, d/dx, d/dt, d2/dx2.
/// Mixed and d2/dt2 terms are not carried.
struct Jet2 {
    double value = 0.0;
    double d_dx = 0.0;
    double d_dt = 0.0;
    double d2_dx2 = 0.0;

    static Jet2 constant(double v) { return {v, 0.0, 0.0, 0.0}; }
    static Jet2 variable_x(double v) { return {v, 1.0, 0.0, 0.0}; }
    static Jet2 variable_t(double v) { return {v, 0.0, 1.0, 0.0}; }

    bool finite() const
    {
        return std::isfinite(value) && std::isfinite(d_dx) && std::isfinite(d_dt) && std::isfinite(d2_dx2);
    }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b)
{
    return {a.value + b.value, a.d_dx + b.d_dx, a.d_dt + b.d_dt, a.d2_dx2 + b.d2_dx2};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b)
{
    return {a.value - b.value, a.d_dx - b.d_dx, a.d_dt - b.d_dt, a.d2_dx2 - b.d2_dx2};
}

inline Jet2 operator-(const Jet2& a) { return {-a.value, -a.d_dx, -a.d_dt, -a.d2_dx2}; }

inline Jet2 operator*(double s, const Jet2& a) { return {s * a.value, s * a.d_dx, s * a.d_dt, s * a.d2_dx2}; }
inline Jet2 operator*(const Jet2& a, double s) { return s * a; }
inline Jet2 operator+(const Jet2& a, double s) { return {a.value + s, a.d_dx, a.d_dt, a.d2_dx2}; }

inline Jet2 operator*(const Jet2& a, const Jet2& b)
{
    return {a.value * b.value, a.d_dx * b.value + a.value * b.d_dx, a.d_dt * b.value + a.value * b.d_dt,
            a.d2_dx2 * b.value + 2.0 * a.d_dx * b.d_dx + a.value * b.d2_dx2};
}

/// Composition with a scalar function given its first two derivatives at a.value.
inline Jet2 compose(const Jet2& a, double f, double f1, double f2)
{
    return {f, f1 * a.d_dx, f1 * a.d_dt, f1 * a.d2_dx2 + f2 * a.d_dx * a.d_dx};
}

inline Jet2 tanh(const Jet2& a)
{
    const double h = std::tanh(a.value);
    const double s = 1.0 - h * h;
    return compose(a, h, s, -2.0 * h * s);
}

inline Jet2 exp(const Jet2& a)
{
    const double e = std::exp(a.value);
    return compose(a, e, e, e);
}

} // namespace emstress
