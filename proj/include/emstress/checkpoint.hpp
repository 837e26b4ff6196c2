#pragma once

#include "emstress/model.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace emstress {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text format: a `stpinn-v1` header with the architecture, theta and the
/// scaling factors, then every F_t and F weight in layer order (W row-major,
/// then b), one per line with 17 significant digits.
void save_checkpoint(const StpinnModel& model, std::ostream& os);
void save_checkpoint(const StpinnModel& model, const std::string& path);

StpinnModel load_checkpoint(std::istream& is);
StpinnModel load_checkpoint(const std::string& path);

} // namespace emstress
