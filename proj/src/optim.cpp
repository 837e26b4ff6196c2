#include "emstress/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace emstress {

void TrainingConfig::validate() const
{
    if (adam_iters < 0 || lbfgs_max_iters < 0)
        throw OptimError("iteration counts must be non-negative");
    if (!(adam_lr > 0.0))
        throw OptimError("adam_lr must be positive");
    if (!(0.0 < adam_beta1 && adam_beta1 < adam_beta2 && adam_beta2 < 1.0))
        throw OptimError("Adam betas must satisfy 0 < beta1 < beta2 < 1");
    if (!(adam_eps > 0.0))
        throw OptimError("adam_eps must be positive");
    if (lbfgs_memory < 1)
        throw OptimError("lbfgs_memory must be at least 1");
    if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
        throw OptimError("Wolfe constants must satisfy 0 < c1 < c2 < 1");
    if (grad_tol < 0.0 || loss_tol < 0.0)
        throw OptimError("tolerances must be non-negative");
}

Eigen::VectorXd xavier_init(const std::vector<std::pair<int, int>>& shapes, std::mt19937_64& rng)
{
    std::size_t count = 0;
    for (const auto& [in, out] : shapes)
        count += static_cast<std::size_t>(out) * static_cast<std::size_t>(in + 1);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
    Eigen::Index k = 0;
    for (const auto& [in, out] : shapes) {
        const double bound = std::sqrt(6.0 / (in + out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (int i = 0; i < in * out; ++i)
            w[k++] = dist(rng);
        k += out;
    }
    return w;
}

Eigen::VectorXd xavier_init(const std::vector<std::pair<int, int>>& shapes, unsigned long long seed)
{
    std::mt19937_64 rng(seed);
    return xavier_init(shapes, rng);
}

const char* to_string(Phase p) { return p == Phase::adam ? "adam" : "lbfgs"; }

const char* to_string(OptimStatus s)
{
    switch (s) {
    case OptimStatus::max_iters: return "max_iters";
    case OptimStatus::grad_tol: return "grad_tol";
    case OptimStatus::loss_tol: return "loss_tol";
    case OptimStatus::line_search_failed: return "line_search_failed";
    case OptimStatus::non_finite: return "non_finite";
    }
    return "?";
}

AdamResult adam_minimize(const Objective& objective, Eigen::VectorXd& x, const TrainingConfig& config,
                         const HistoryCallback& on_step)
{
    config.validate();
    AdamResult result;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(x.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
    Eigen::VectorXd g(x.size());
    double b1t = 1.0;
    double b2t = 1.0;
    Eigen::VectorXd previous = x;
    for (int it = 0; it < config.adam_iters; ++it) {
        const Evaluation e = objective(x, g);
        if (!std::isfinite(e.value) || !g.allFinite()) {
            result.status = OptimStatus::non_finite;
            x = previous;
            return result;
        }
        previous = x;
        result.last = e;
        result.iterations = it + 1;
        if (on_step)
            on_step({it, Phase::adam, e, g.norm()});

        b1t *= config.adam_beta1;
        b2t *= config.adam_beta2;
        m = config.adam_beta1 * m + (1.0 - config.adam_beta1) * g;
        v = config.adam_beta2 * v + (1.0 - config.adam_beta2) * g.cwiseProduct(g);
        const double lr = config.adam_lr;
        x.array() -= lr * (m.array() / (1.0 - b1t)) / ((v.array() / (1.0 - b2t)).sqrt() + config.adam_eps);
    }
    return result;
}

namespace {

struct Probe {
    double alpha = 0.0;
    double f = 0.0;
    double slope = 0.0;
};

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), safeguarded to
// stay inside the interval; falls back to bisection.
double cubic_step(const Probe& a, const Probe& b)
{
    const double lo = std::min(a.alpha, b.alpha);
    const double hi = std::max(a.alpha, b.alpha);
    const double margin = 0.1 * (hi - lo);
    double t = 0.5 * (a.alpha + b.alpha);
    if (std::isfinite(a.f) && std::isfinite(b.f) && std::isfinite(a.slope) && std::isfinite(b.slope)) {
        const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
        const double disc = d1 * d1 - a.slope * b.slope;
        if (disc >= 0.0) {
            const double sign = b.alpha > a.alpha ? 1.0 : -1.0;
            const double d2 = sign * std::sqrt(disc);
            const double denom = b.slope - a.slope + 2.0 * d2;
            if (denom != 0.0) {
                const double c = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
                if (std::isfinite(c))
                    t = c;
            }
        }
    }
    return std::clamp(t, lo + margin, hi - margin);
}

} // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, Eigen::VectorXd& x, const TrainingConfig& config,
                           const HistoryCallback& on_step, bool record_steps)
{
    config.validate();
    LbfgsResult result;
    if (config.lbfgs_max_iters == 0)
        return result;

    const Eigen::Index n = x.size();
    Eigen::VectorXd g(n);
    Evaluation e = objective(x, g);
    ++result.evaluations;
    if (!std::isfinite(e.value) || !g.allFinite()) {
        result.status = OptimStatus::non_finite;
        return result;
    }
    result.last = e;
    result.grad_norm = g.norm();

    std::deque<Eigen::VectorXd> S, Y;
    std::deque<double> rho;
    Eigen::VectorXd d(n), q(n), x_new(n), g_new(n), best_x(n), best_g(n);
    std::vector<double> alpha_buf;

    const double c1 = config.wolfe_c1;
    const double c2 = config.wolfe_c2;
    constexpr int max_line_evals = 30;

    for (int it = 0; it < config.lbfgs_max_iters; ++it) {
        const double gnorm = g.norm();
        result.grad_norm = gnorm;
        if (gnorm <= config.grad_tol) {
            result.status = OptimStatus::grad_tol;
            return result;
        }

        // Two-loop recursion.
        q = g;
        alpha_buf.assign(S.size(), 0.0);
        for (std::size_t k = S.size(); k-- > 0;) {
            alpha_buf[k] = rho[k] * S[k].dot(q);
            q -= alpha_buf[k] * Y[k];
        }
        if (!S.empty())
            q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
        for (std::size_t k = 0; k < S.size(); ++k) {
            const double beta = rho[k] * Y[k].dot(q);
            q += (alpha_buf[k] - beta) * S[k];
        }
        d = -q;
        double slope0 = g.dot(d);
        if (!(slope0 < 0.0) || !std::isfinite(slope0)) {
            S.clear();
            Y.clear();
            rho.clear();
            d = -g;
            slope0 = -gnorm * gnorm;
        }
        const double alpha0 = S.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;

        // Strong-Wolfe line search.
        const double f0 = e.value;
        Evaluation e_new;
        Evaluation best_e = e;
        double best_alpha = 0.0;
        int evals = 0;
        auto probe = [&](double alpha) {
            x_new = x + alpha * d;
            e_new = objective(x_new, g_new);
            ++evals;
            ++result.evaluations;
            Probe p{alpha, e_new.value, g_new.dot(d)};
            if (!std::isfinite(p.f) || !g_new.allFinite()) {
                p.f = std::numeric_limits<double>::infinity();
                p.slope = std::numeric_limits<double>::quiet_NaN();
            } else if (p.f < best_e.value) {
                best_e = e_new;
                best_alpha = alpha;
                best_x = x_new;
                best_g = g_new;
            }
            return p;
        };
        auto armijo = [&](const Probe& p) { return p.f <= f0 + c1 * p.alpha * slope0; };
        auto curvature = [&](const Probe& p) { return std::abs(p.slope) <= -c2 * slope0; };

        bool found = false;
        Probe accepted;
        auto zoom = [&](Probe lo, Probe hi) {
            while (evals < max_line_evals) {
                const Probe p = probe(cubic_step(lo, hi));
                if (!armijo(p) || p.f >= lo.f) {
                    hi = p;
                } else {
                    if (curvature(p)) {
                        accepted = p;
                        return true;
                    }
                    if (p.slope * (hi.alpha - lo.alpha) >= 0.0)
                        hi = lo;
                    lo = p;
                }
                if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, lo.alpha))
                    return false;
            }
            return false;
        };

        Probe prev{0.0, f0, slope0};
        double alpha = alpha0;
        for (int i = 0; evals < max_line_evals; ++i) {
            const Probe p = probe(alpha);
            if (!armijo(p) || (i > 0 && p.f >= prev.f)) {
                found = zoom(prev, p);
                break;
            }
            if (curvature(p)) {
                accepted = p;
                found = true;
                break;
            }
            if (p.slope >= 0.0) {
                found = zoom(p, prev);
                break;
            }
            prev = p;
            alpha *= 2.0;
        }

        if (!found) {
            if (best_alpha > 0.0) {
                x = best_x;
                g = best_g;
                result.last = best_e;
                result.grad_norm = g.norm();
            }
            result.status = OptimStatus::line_search_failed;
            return result;
        }

        // The accepted probe is not necessarily the most recent evaluation.
        if (accepted.alpha != best_alpha) {
            x_new = x + accepted.alpha * d;
            e_new = objective(x_new, g_new);
            ++result.evaluations;
        } else {
            x_new = best_x;
            g_new = best_g;
            e_new = best_e;
        }
        if (record_steps) {
            WolfeRecord w;
            w.alpha = accepted.alpha;
            w.f0 = f0;
            w.slope0 = slope0;
            w.f = e_new.value;
            w.slope = g_new.dot(d);
            w.armijo = w.f <= f0 + c1 * w.alpha * slope0;
            w.curvature = std::abs(w.slope) <= -c2 * slope0;
            result.steps.push_back(w);
        }

        Eigen::VectorXd s = x_new - x;
        Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 0.0) {
            S.push_back(std::move(s));
            Y.push_back(std::move(y));
            rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > config.lbfgs_memory) {
                S.pop_front();
                Y.pop_front();
                rho.pop_front();
            }
        }

        const double f_old = e.value;
        x = x_new;
        g = g_new;
        e = e_new;
        result.last = e;
        result.iterations = it + 1;
        result.grad_norm = g.norm();
        if (on_step)
            on_step({it, Phase::lbfgs, e, result.grad_norm});

        if (config.loss_tol > 0.0 &&
            std::abs(f_old - e.value) <= config.loss_tol * std::max({1.0, std::abs(f_old), std::abs(e.value)})) {
            result.status = OptimStatus::loss_tol;
            return result;
        }
    }
    if (result.grad_norm <= config.grad_tol)
        result.status = OptimStatus::grad_tol;
    return result;
}

} // namespace emstress
