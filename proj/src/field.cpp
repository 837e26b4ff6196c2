#include "emstress/field.hpp"

#include <stdexcept>

namespace emstress {

TimeRescaledField::TimeRescaledField(std::shared_ptr<const StressField> base, double ratio)
    : base_(std::move(base)), ratio_(ratio)
{
    if (!base_)
        throw std::invalid_argument("rescaled field needs a base field");
    if (!(ratio_ > 0.0))
        throw std::invalid_argument("diffusivity ratio must be positive");
}

double TimeRescaledField::stress(int segment, double local, double t) const
{
    return base_->stress(segment, local, ratio_ * t);
}

} // namespace emstress
