#pragma once

// Whole-run drivers for the scalar problems and the Euler shock tubes.

#include <span>
#include <stdexcept>
#include <vector>

#include "wenods/cnn.hpp"
#include "wenods/euler.hpp"
#include "wenods/flux.hpp"
#include "wenods/rk3.hpp"

namespace wenods {

/// Scheme configuration for a weighting; DS picks up C from the model.
inline SchemeConfig scheme_config(Weighting w, const DsModel* model = nullptr) {
  SchemeConfig cfg;
  cfg.weighting = w;
  if (w == Weighting::DS) {
    if (model == nullptr) throw std::invalid_argument("scheme_config: DS needs a model");
    cfg.C = model->C;
  }
  cfg.validate();
  return cfg;
}

/// Runs a scalar problem on n_intervals to plan.t_final. DS requires `model`.
inline RunResult solve_scalar(const ScalarProblem& problem, int n_intervals, const StepPlan& plan,
                              const SchemeConfig& cfg, const DsModel* model = nullptr, RunHooks hooks = {}) {
  SolutionField field = problem.initial_field(n_intervals);
  const Grid1D grid = field.grid;
  MultiplierSource<double> source;
  const MultiplierSource<double>* src = nullptr;
  if (cfg.weighting == Weighting::DS) {
    if (model == nullptr) throw std::invalid_argument("solve_scalar: DS needs a model");
    source = net_multipliers(*model);
    src = &source;
  }
  auto rhs = [&](std::span<const double> u) {
    return semidiscrete_rhs<double>(u, grid, problem.boundary, problem.flux, cfg, src);
  };
  if (!hooks.stable_dt) {
    hooks.stable_dt = [&](std::span<const double> u) {
      double s = problem.flux.max_speed(u);
      return s > 0.0 ? grid.dx / s : grid.dx;
    };
  }
  return run(std::move(field.values), plan, rhs, hooks);
}

/// Euler shock tube on [0, 1] with N intervals, adaptive dt = cfl dx / max(|u| + c).
inline RunResult solve_euler(const RiemannProblem& problem, int n_intervals, const StepPlan& plan,
                             const SchemeConfig& cfg, const DsModel* model = nullptr, RunHooks hooks = {}) {
  const Grid1D grid = make_grid(0.0, 1.0, n_intervals);
  std::vector<double> state = euler_initial_state(grid, problem.left, problem.right);
  MultiplierSource<double> source;
  const MultiplierSource<double>* src = nullptr;
  if (cfg.weighting == Weighting::DS) {
    if (model == nullptr) throw std::invalid_argument("solve_euler: DS needs a model");
    source = net_multipliers(*model);
    src = &source;
  }
  auto rhs = [&](std::span<const double> q) { return euler_rhs<double>(q, grid, cfg, src); };
  if (!hooks.stable_dt)
    hooks.stable_dt = [&](std::span<const double> q) { return grid.dx / euler_max_signal(q); };
  if (!hooks.check) hooks.check = [](std::span<const double> q, int) { check_physical(q); };
  return run(std::move(state), plan, rhs, hooks);
}

}  // namespace wenods
