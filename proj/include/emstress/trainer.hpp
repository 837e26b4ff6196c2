#pragma once

#include "emstress/loss.hpp"
#include "emstress/optim.hpp"

#include <iosfwd>
#include <vector>

namespace emstress {

struct TrainResult {
    Evaluation final;
    double final_grad_norm = 0.0;
    AdamResult adam;
    LbfgsResult lbfgs;
    bool aborted = false;     ///< a non-finite loss stopped training
    double seconds = 0.0;
    std::vector<HistoryRecord> history;
};

/// Adam warm-up followed by L-BFGS on the model's parameters.
TrainResult train(StpinnModel& model, const LossFunction& loss, const TrainingConfig& config,
                  const HistoryCallback& on_step = {});

/// `iter,phase,total,mse_f,mse_b,mse_i,mse_c,grad_norm`
void write_history_csv(std::ostream& os, const std::vector<HistoryRecord>& history);

} // namespace emstress
