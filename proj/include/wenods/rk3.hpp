#pragma once

// Third-order TVD Runge-Kutta stepping and the fixed/adaptive time drivers.

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wenods/autodiff.hpp"

namespace wenods {

/// Non-finite values or a rejected state during a run.
class solver_error : public std::runtime_error {
 public:
  solver_error(const std::string& what, int step, int location = -1)
      : std::runtime_error(what), step_(step), location_(location) {}
  int step() const { return step_; }
  int location() const { return location_; }

 private:
  int step_;
  int location_;
};

/// u1 = u + dt L(u); u2 = 3/4 u + 1/4 u1 + 1/4 dt L(u1); u^{n+1} = 1/3 u + 2/3 u2 + 2/3 dt L(u2).
template <class T, class Rhs>
std::vector<T> rk3_step(std::span<const T> u, double dt, Rhs&& rhs) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk3_step: dt must be positive");
  const std::size_t n = u.size();
  std::vector<T> l0 = rhs(u);
  std::vector<T> u1(n);
  for (std::size_t i = 0; i < n; ++i) u1[i] = u[i] + dt * l0[i];
  std::vector<T> l1 = rhs(std::span<const T>(u1));
  std::vector<T> u2(n);
  for (std::size_t i = 0; i < n; ++i) u2[i] = 0.75 * u[i] + 0.25 * u1[i] + 0.25 * dt * l1[i];
  std::vector<T> l2 = rhs(std::span<const T>(u2));
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (1.0 / 3.0) * u[i] + (2.0 / 3.0) * u2[i] + (2.0 / 3.0) * dt * l2[i];
  return out;
}

struct StepPlan {
  enum class Mode { FixedCount, AdaptiveCfl };
  Mode mode = Mode::FixedCount;
  int n_steps = 1;
  double cfl = 0.9;
  double t_final = 1.0;

  static StepPlan fixed(int n_steps, double t_final) { return {Mode::FixedCount, n_steps, 0.9, t_final}; }
  static StepPlan adaptive(double t_final, double cfl = 0.9) { return {Mode::AdaptiveCfl, 1, cfl, t_final}; }

  void validate() const {
    if (!(t_final > 0.0)) throw std::invalid_argument("StepPlan: final time must be positive");
    if (mode == Mode::FixedCount && n_steps < 1) throw std::invalid_argument("StepPlan: need at least one step");
    if (mode == Mode::AdaptiveCfl && !(cfl > 0.0 && cfl <= 1.0))
      throw std::invalid_argument("StepPlan: cfl must lie in (0, 1]");
  }
};

/// Hooks for a time-stepped run.
struct RunHooks {
  /// Adaptive mode: dx / max signal speed, scaled by cfl inside the driver.
  std::function<double(std::span<const double>)> stable_dt;
  /// Throws (typically solver_error) when the accepted state is unacceptable.
  std::function<void(std::span<const double>, int step)> check;
  /// Called after each accepted step with (step index, time, state).
  std::function<void(int, double, std::span<const double>)> observe;
};

struct RunResult {
  std::vector<double> state;
  std::vector<double> times;  // accepted times, starting with 0
};

/// Advances `state` to plan.t_final. Fixed plans use dt = T / n_steps; adaptive
/// plans use cfl * stable_dt(u) and clip the last step onto T.
template <class Rhs>
RunResult run(std::vector<double> state, const StepPlan& plan, Rhs&& rhs, const RunHooks& hooks = {}) {
  plan.validate();
  RunResult result;
  result.times.push_back(0.0);
  double t = 0.0;
  int step = 0;
  while (true) {
    double dt;
    bool last;
    if (plan.mode == StepPlan::Mode::FixedCount) {
      if (step == plan.n_steps) break;
      dt = plan.t_final / plan.n_steps;
      last = step + 1 == plan.n_steps;
    } else {
      if (t >= plan.t_final) break;
      if (!hooks.stable_dt) throw std::invalid_argument("run: adaptive plan needs a stable_dt hook");
      dt = plan.cfl * hooks.stable_dt(state);
      if (!(dt > 0.0) || !std::isfinite(dt)) throw solver_error("run: invalid adaptive time step", step);
      last = t + dt >= plan.t_final;
      if (last) dt = plan.t_final - t;
    }
    state = rk3_step(std::span<const double>(state), dt, rhs);
    for (std::size_t i = 0; i < state.size(); ++i)
      if (!std::isfinite(state[i]))
        throw solver_error("run: non-finite value at step " + std::to_string(step), step, static_cast<int>(i));
    t = last ? plan.t_final : t + dt;
    if (hooks.check) hooks.check(state, step);
    result.times.push_back(t);
    if (hooks.observe) hooks.observe(step, t, state);
    ++step;
  }
  result.state = std::move(state);
  return result;
}

}  // namespace wenods
