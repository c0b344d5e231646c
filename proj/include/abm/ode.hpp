#pragma once

// Explicit integrators for continuous dynamics coupled to a model.
//
// Fixed step: forward Euler, y_{k+1} = y_k + dt * f(t_k, y_k), with a final partial step when dt
// does not divide the interval.
//
// Adaptive: Dormand-Prince 5(4) with FSAL. Butcher tableau:
//
//   0     |
//   1/5   | 1/5
//   3/10  | 3/40        9/40
//   4/5   | 44/45      -56/15       32/9
//   8/9   | 19372/6561 -25360/2187  64448/6561  -212/729
//   1     | 9017/3168  -355/33      46732/5247   49/176   -5103/18656
//   1     | 35/384      0           500/1113     125/192  -2187/6784    11/84
//   ------+------------------------------------------------------------------------------
//   y5    | 35/384      0           500/1113     125/192  -2187/6784    11/84     0
//   y4    | 5179/57600  0           7571/16695   393/640  -92097/339200 187/2100  1/40
//
// The step is advanced with the 5th-order weights. The error estimate err = h * sum (b5 - b4)_j k_j
// is accepted when max_i |err_i| / (abs_tol + rel_tol * max(|y_i|, |y_new_i|)) <= 1. The next step
// is h * clamp(0.9 * norm^(-1/5), 0.2, 5.0), never growing right after a rejection.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "abm/errors.hpp"

namespace abm::ode {

template <class Scalar = double, int Dim = Eigen::Dynamic>
struct Problem {
  using State = Eigen::Matrix<Scalar, Dim, 1>;
  using Params = std::map<std::string, Scalar, std::less<>>;
  using Rhs = std::function<State(Scalar t, const State& y, const Params& params)>;

  Rhs rhs;
  Scalar t0{0};
  Scalar t1{0};
  State y0;
  Params params;
};

enum class Method { euler, rk45_adaptive };

struct IntegratorConfig {
  Method method = Method::rk45_adaptive;
  double dt = 1.0;
  double abs_tol = 1e-6;
  double rel_tol = 1e-6;
  std::size_t max_steps = 1'000'000;
};

/// Sampled solution: time points, states, and the derivative at each point (for dense output).
template <class Scalar = double, int Dim = Eigen::Dynamic>
struct Trajectory {
  using State = Eigen::Matrix<Scalar, Dim, 1>;

  std::vector<Scalar> t;
  std::vector<State> y;
  std::vector<State> dy;
  std::size_t rhs_evaluations = 0;

  [[nodiscard]] const State& back() const { return y.back(); }

  /// Cubic Hermite interpolation between the bracketing samples.
  [[nodiscard]] State at(Scalar time) const {
    if (t.empty()) throw ContractViolation("empty trajectory");
    if (time <= t.front()) return y.front();
    if (time >= t.back()) return y.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), time) - t.begin());
    const std::size_t lo = hi - 1;
    const Scalar h = t[hi] - t[lo];
    const Scalar s = (time - t[lo]) / h;
    const Scalar s2 = s * s;
    const Scalar s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y[lo] + (s3 - 2 * s2 + s) * h * dy[lo] + (-2 * s3 + 3 * s2) * y[hi] +
           (s3 - s2) * h * dy[hi];
  }
};

namespace detail {

template <class State>
void require_finite(const State& y, const char* where) {
  if (!y.allFinite()) throw NumericalBlowup(std::string("non-finite state in ") + where);
}

}  // namespace detail

template <class Scalar, int Dim>
Trajectory<Scalar, Dim> integrate_euler(const Problem<Scalar, Dim>& problem, Scalar dt) {
  if (!(dt > 0)) throw ContractViolation("euler step must be positive");
  if (problem.t1 < problem.t0) throw ContractViolation("t1 must not precede t0");
  Trajectory<Scalar, Dim> out;
  auto y = problem.y0;
  const Scalar span = problem.t1 - problem.t0;
  const Scalar slack = Scalar(1e-12) * std::max(Scalar(1), std::abs(span));
  std::size_t k = 0;
  Scalar t = problem.t0;
  auto f = problem.rhs(t, y, problem.params);
  ++out.rhs_evaluations;
  out.t.push_back(t);
  out.y.push_back(y);
  out.dy.push_back(f);
  while (problem.t1 - t > slack) {
    const Scalar next = std::min(problem.t0 + static_cast<Scalar>(k + 1) * dt, problem.t1);
    const Scalar h = (problem.t1 - next <= slack) ? problem.t1 - t : next - t;
    y = y + h * f;
    detail::require_finite(y, "euler integration");
    ++k;
    t = (problem.t1 - next <= slack) ? problem.t1 : next;
    f = problem.rhs(t, y, problem.params);
    ++out.rhs_evaluations;
    out.t.push_back(t);
    out.y.push_back(y);
    out.dy.push_back(f);
  }
  return out;
}

/// Stateful Dormand-Prince integrator. step_to() lands exactly on the requested time, so a model can
/// advance the continuous state one model-time unit per step and change params in between.
template <class Scalar = double, int Dim = Eigen::Dynamic>
class AdaptiveIntegrator {
 public:
  using ProblemT = Problem<Scalar, Dim>;
  using State = typename ProblemT::State;
  using Params = typename ProblemT::Params;

  AdaptiveIntegrator(typename ProblemT::Rhs rhs, Params params, Scalar t0, State y0, IntegratorConfig config,
                     Scalar initial_step = 0)
      : rhs_(std::move(rhs)), params_(std::move(params)), config_(config), t_(t0), y_(std::move(y0)) {
    if (!(config_.abs_tol > 0) || !(config_.rel_tol > 0)) throw ContractViolation("tolerances must be positive");
    detail::require_finite(y_, "initial state");
    k1_ = eval(t_, y_);
    h_ = initial_step > 0 ? initial_step : initial_step_size();
  }

  [[nodiscard]] Scalar time() const noexcept { return t_; }
  [[nodiscard]] const State& state() const noexcept { return y_; }
  [[nodiscard]] const State& derivative() const noexcept { return k1_; }
  [[nodiscard]] Scalar proposed_step() const noexcept { return h_; }
  [[nodiscard]] std::size_t rhs_evaluations() const noexcept { return evaluations_; }
  [[nodiscard]] std::size_t accepted_steps() const noexcept { return accepted_; }
  [[nodiscard]] std::size_t rejected_steps() const noexcept { return rejected_; }

  /// Replaces the parameters (piecewise-constant coupling); the cached derivative is refreshed.
  void set_params(Params params) {
    params_ = std::move(params);
    k1_ = eval(t_, y_);
  }

  /// Advances to t_target. `on_accept(t, y, dy)` sees every accepted step.
  template <class OnAccept>
  void step_to(Scalar t_target, OnAccept&& on_accept) {
    if (t_target < t_) throw ContractViolation("step_to target precedes the current time");
    while (t_ < t_target) {
      Scalar h = h_;
      bool lands = false;
      if (t_ + h >= t_target || t_target - (t_ + h) <= Scalar(1e-12) * std::max(Scalar(1), std::abs(t_target))) {
        h = t_target - t_;
        lands = true;
      }
      bool rejected_before = false;
      while (true) {
        if (++steps_ > config_.max_steps) throw StepBudgetExceeded("adaptive integrator exceeded max_steps");
        const auto [y_new, k7, err] = attempt(h);
        if (err <= 1) {
          ++accepted_;
          Scalar factor = err == 0 ? Scalar(5) : std::clamp(Scalar(0.9) * std::pow(err, Scalar(-0.2)), Scalar(0.2), Scalar(5));
          if (rejected_before) factor = std::min(factor, Scalar(1));
          const Scalar proposed = h * factor;
          t_ = lands ? t_target : t_ + h;
          y_ = y_new;
          k1_ = k7;
          h_ = lands ? std::max(h_, proposed) : proposed;
          on_accept(t_, y_, k1_);
          break;
        }
        ++rejected_;
        rejected_before = true;
        h *= std::clamp(Scalar(0.9) * std::pow(err, Scalar(-0.2)), Scalar(0.2), Scalar(1));
        lands = false;
        if (!(h > 0) || t_ + h == t_) throw NumericalBlowup("adaptive step size underflow");
      }
    }
  }

  void step_to(Scalar t_target) {
    step_to(t_target, [](Scalar, const State&, const State&) {});
  }

 private:
  struct Attempt {
    State y;
    State k7;
    Scalar err;
  };

  State eval(Scalar t, const State& y) {
    ++evaluations_;
    State f = rhs_(t, y, params_);
    detail::require_finite(f, "right-hand side");
    return f;
  }

  Attempt attempt(Scalar h) {
    const State& k1 = k1_;
    const State k2 = eval(t_ + h / 5, y_ + h * (Scalar(1) / 5 * k1));
    const State k3 = eval(t_ + 3 * h / 10, y_ + h * (Scalar(3) / 40 * k1 + Scalar(9) / 40 * k2));
    const State k4 = eval(t_ + 4 * h / 5, y_ + h * (Scalar(44) / 45 * k1 - Scalar(56) / 15 * k2 + Scalar(32) / 9 * k3));
    const State k5 = eval(t_ + 8 * h / 9, y_ + h * (Scalar(19372) / 6561 * k1 - Scalar(25360) / 2187 * k2 +
                                                    Scalar(64448) / 6561 * k3 - Scalar(212) / 729 * k4));
    const State k6 = eval(t_ + h, y_ + h * (Scalar(9017) / 3168 * k1 - Scalar(355) / 33 * k2 + Scalar(46732) / 5247 * k3 +
                                            Scalar(49) / 176 * k4 - Scalar(5103) / 18656 * k5));
    State y_new = y_ + h * (Scalar(35) / 384 * k1 + Scalar(500) / 1113 * k3 + Scalar(125) / 192 * k4 -
                            Scalar(2187) / 6784 * k5 + Scalar(11) / 84 * k6);
    detail::require_finite(y_new, "adaptive integration");
    const State k7 = eval(t_ + h, y_new);
    const State e = h * (Scalar(71) / 57600 * k1 - Scalar(71) / 16695 * k3 + Scalar(71) / 1920 * k4 -
                         Scalar(17253) / 339200 * k5 + Scalar(22) / 525 * k6 - Scalar(1) / 40 * k7);
    Scalar err = 0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      const Scalar scale = Scalar(config_.abs_tol) + Scalar(config_.rel_tol) * std::max(std::abs(y_[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(e[i]) / scale);
    }
    return {std::move(y_new), k7, err};
  }

  // Hairer, Norsett & Wanner starting step heuristic.
  Scalar initial_step_size() {
    auto scaled_rms = [&](const State& v) {
      Scalar s = 0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Scalar sc = Scalar(config_.abs_tol) + Scalar(config_.rel_tol) * std::abs(y_[i]);
        s += (v[i] / sc) * (v[i] / sc);
      }
      return std::sqrt(s / std::max<Scalar>(1, static_cast<Scalar>(v.size())));
    };
    const Scalar d0 = scaled_rms(y_);
    const Scalar d1 = scaled_rms(k1_);
    const Scalar h0 = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1;
    const State f1 = eval(t_ + h0, y_ + h0 * k1_);
    const Scalar d2 = scaled_rms(State(f1 - k1_)) / h0;
    const Scalar dm = std::max(d1, d2);
    const Scalar h1 = dm <= Scalar(1e-15) ? std::max(Scalar(1e-6), h0 * Scalar(1e-3)) : std::pow(Scalar(0.01) / dm, Scalar(0.2));
    return std::min(Scalar(100) * h0, h1);
  }

  typename ProblemT::Rhs rhs_;
  Params params_;
  IntegratorConfig config_;
  Scalar t_;
  State y_;
  State k1_;
  Scalar h_ = 0;
  std::size_t evaluations_ = 0;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  std::size_t steps_ = 0;
};

/// Integrates over [t0, t1], recording every accepted step.
template <class Scalar, int Dim>
Trajectory<Scalar, Dim> integrate_adaptive(const Problem<Scalar, Dim>& problem, const IntegratorConfig& config) {
  if (problem.t1 < problem.t0) throw ContractViolation("t1 must not precede t0");
  AdaptiveIntegrator<Scalar, Dim> integrator(problem.rhs, problem.params, problem.t0, problem.y0, config);
  Trajectory<Scalar, Dim> out;
  out.t.push_back(problem.t0);
  out.y.push_back(problem.y0);
  out.dy.push_back(integrator.derivative());
  integrator.step_to(problem.t1, [&](Scalar t, const auto& y, const auto& dy) {
    out.t.push_back(t);
    out.y.push_back(y);
    out.dy.push_back(dy);
  });
  out.rhs_evaluations = integrator.rhs_evaluations();
  return out;
}

/// Dispatches on config.method.
template <class Scalar, int Dim>
Trajectory<Scalar, Dim> integrate(const Problem<Scalar, Dim>& problem, const IntegratorConfig& config) {
  return config.method == Method::euler ? integrate_euler(problem, static_cast<Scalar>(config.dt))
                                        : integrate_adaptive(problem, config);
}

}  // namespace abm::ode
