#pragma once

#include <functional>
#include <memory>

namespace emstress {

/// Queryable stress solution sigma(segment, local position, t) in Pa.
class StressField {
public:
    virtual ~StressField() = default;
    virtual double stress(int segment, double local, double t) const = 0;
};

/// sigma*(x, t) = sigma(x, ratio t). Exact for constant temperature, where a
/// change of D_a only rescales time.
class TimeRescaledField final : public StressField {
public:
    TimeRescaledField(std::shared_ptr<const StressField> base, double ratio);
    double stress(int segment, double local, double t) const override;

private:
    std::shared_ptr<const StressField> base_;
    double ratio_;
};

/// Adapts any callable to the StressField interface.
class FunctionField final : public StressField {
public:
    using Fn = std::function<double(int, double, double)>;
    explicit FunctionField(Fn fn) : fn_(std::move(fn)) {}
    double stress(int segment, double local, double t) const override { return fn_(segment, local, t); }

private:
    Fn fn_;
};

} // namespace emstress
