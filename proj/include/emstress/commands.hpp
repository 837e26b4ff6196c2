#pragma once

#include "emstress/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace emstress {

struct EvalOptions {
    std::string checkpoint;              ///< empty: output.checkpoint
    std::string points_file;             ///< CSV `segment_id,x_m,t_s`; empty: grid at output.times
    std::optional<double> ratio;         ///< overrides eval.ratio
    std::string output;                  ///< empty: output.eval_csv
};

struct CompareOptions {
    std::string checkpoint;              ///< empty: output.checkpoint
    int speed_points = 10000;            ///< random queries for the timing comparison
};

/// Each command writes its files, prints a text summary followed by a
/// `key=value` block to `out`, and returns the process exit status. Errors
/// are thrown; partial outputs are reported in the summary.
int cmd_solve_fdm(const RunConfig& config, std::ostream& out);
int cmd_train(const RunConfig& config, std::ostream& out);
int cmd_eval(const RunConfig& config, const EvalOptions& options, std::ostream& out);
int cmd_compare(const RunConfig& config, const CompareOptions& options, std::ostream& out);

/// Column layouts of every CSV the tool reads or writes.
std::string csv_schemas();

} // namespace emstress
