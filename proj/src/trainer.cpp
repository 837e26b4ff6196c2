#include "emstress/trainer.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace emstress {

TrainResult train(StpinnModel& model, const LossFunction& loss, const TrainingConfig& config,
                  const HistoryCallback& on_step)
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    TrainResult result;
    auto record = [&](const HistoryRecord& r) {
        result.history.push_back(r);
        if (on_step)
            on_step(r);
    };
    const Objective objective = loss.objective(model);
    Eigen::VectorXd x = model.parameters();

    result.adam = adam_minimize(objective, x, config, record);
    if (result.adam.status == OptimStatus::non_finite) {
        result.aborted = true;
    } else {
        result.lbfgs = lbfgs_minimize(objective, x, config, record);
        result.aborted = result.lbfgs.status == OptimStatus::non_finite;
    }
    model.set_parameters(x);
    Eigen::VectorXd g(x.size());
    result.final = loss.evaluate(model, &g);
    result.final_grad_norm = g.norm();
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

void write_history_csv(std::ostream& os, const std::vector<HistoryRecord>& history)
{
    os << "iter,phase,total,mse_f,mse_b,mse_i,mse_c,grad_norm\n";
    os << std::setprecision(10);
    for (const auto& r : history) {
        const auto& t = r.eval.terms;
        os << r.iter << ',' << to_string(r.phase) << ',' << r.eval.value << ',' << t.f << ',' << t.b << ',' << t.i
           << ',' << t.c << ',' << r.grad_norm << '\n';
    }
}

} // namespace emstress
