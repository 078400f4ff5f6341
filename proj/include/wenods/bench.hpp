#pragma once

// Error norms, scheme comparison tables and convergence studies.

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wenods/reference.hpp"
#include "wenods/solve.hpp"
#include "wenods/training.hpp"

namespace wenods {

/// L2 = sqrt(mean e^2) over the compared points (Rms) or sqrt(dx sum e^2) (Dx).
enum class L2Convention { Rms, Dx };

inline L2Convention l2_convention_from_string(const std::string& s) {
  if (s == "rms") return L2Convention::Rms;
  if (s == "dx") return L2Convention::Dx;
  throw std::invalid_argument("unknown L2 convention '" + s + "'");
}

struct ErrorNorms {
  double linf = 0.0;
  double l2 = 0.0;
};

inline ErrorNorms error_norms(std::span<const double> u, std::span<const double> ref, double dx,
                              L2Convention conv = L2Convention::Rms) {
  if (u.size() != ref.size() || u.empty()) throw std::invalid_argument("error_norms: size mismatch");
  ErrorNorms e;
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = std::abs(u[i] - ref[i]);
    e.linf = std::max(e.linf, d);
    sum += d * d;
  }
  e.l2 = conv == L2Convention::Rms ? std::sqrt(sum / u.size()) : std::sqrt(dx * sum);
  return e;
}

/// min(js, z) / ds; empty when ds is zero.
inline std::optional<double> error_ratio(double js, double z, double ds) {
  if (!(ds > 0.0)) return std::nullopt;
  return std::min(js, z) / ds;
}

/// One row of a comparison table: a problem (or Euler component) and its errors.
struct ErrorRow {
  std::string label;
  ErrorNorms js;
  ErrorNorms z;
  std::optional<ErrorNorms> ds;

  std::optional<double> ratio_linf() const { return ds ? error_ratio(js.linf, z.linf, ds->linf) : std::nullopt; }
  std::optional<double> ratio_l2() const { return ds ? error_ratio(js.l2, z.l2, ds->l2) : std::nullopt; }
};

struct ErrorReport {
  std::string title;
  std::vector<ErrorRow> rows;
};

// ---- test problem sets ------------------------------------------------------------

struct ScalarCase {
  std::string label;
  ProblemSample sample;
};

inline std::vector<ScalarCase> bl_test_set() {
  std::vector<ScalarCase> out;
  for (double a : {0.25, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) out.push_back({"a=" + short_label(a), bl_sample(a)});
  return out;
}

/// Parameters inside the training ranges.
inline std::vector<ScalarCase> burgers_test_set() {
  std::vector<ScalarCase> out;
  auto add = [&](BurgersIc ic, double z) {
    out.push_back({std::string(to_string(ic)) + " z=" + short_label(z), burgers_sample(ic, z)});
  };
  for (double z : {1.19, 1.53, 1.84}) add(BurgersIc::Step, z);
  for (double z : {14.94, 21.65, 29.08}) add(BurgersIc::Gaussian, z);
  for (double z : {1.46, 1.6, 1.9}) add(BurgersIc::Sine, z);
  return out;
}

/// Parameters outside the training ranges.
inline std::vector<ScalarCase> burgers_extrapolation_set() {
  std::vector<ScalarCase> out;
  auto add = [&](BurgersIc ic, double z) {
    out.push_back({std::string(to_string(ic)) + " z=" + short_label(z), burgers_sample(ic, z)});
  };
  for (double z : {0.71, 2.41, 2.57, 3.13}) add(BurgersIc::Step, z);
  for (double z : {33.9, 34.67}) add(BurgersIc::Gaussian, z);
  for (double z : {0.94, 2.12, 2.44}) add(BurgersIc::Sine, z);
  return out;
}

// ---- comparisons -------------------------------------------------------------------

struct CompareOptions {
  int n_intervals = 128;
  int n_steps = 140;
  L2Convention l2 = L2Convention::Rms;
  ReferenceCache cache;
  int space_factor = 8;
  int time_factor = 64;
};

/// Final-time errors of JS, Z and (with a model) DS against the fine reference.
inline ErrorRow compare_scalar(const ScalarCase& c, const CompareOptions& opt, const DsModel* model) {
  ScalarProblem problem = c.sample.scalar_problem();
  Trajectory ref =
      coarse_reference(problem, opt.n_intervals, opt.n_steps, opt.cache, opt.space_factor, opt.time_factor);
  const std::vector<double>& target = ref.final_state();
  const StepPlan plan = StepPlan::fixed(opt.n_steps, problem.t_final);
  const double dx = ref.grid.dx;
  auto errors = [&](Weighting w) {
    RunResult r = solve_scalar(problem, opt.n_intervals, plan, scheme_config(w, model), model);
    return error_norms(r.state, target, dx, opt.l2);
  };
  ErrorRow row{c.label, errors(Weighting::JS), errors(Weighting::Z), std::nullopt};
  if (model != nullptr) row.ds = errors(Weighting::DS);
  return row;
}

inline ErrorReport compare_scalar_set(const std::string& title, const std::vector<ScalarCase>& cases,
                                      const CompareOptions& opt, const DsModel* model) {
  ErrorReport report{title, {}};
  for (const auto& c : cases) report.rows.push_back(compare_scalar(c, opt, model));
  return report;
}

/// Rows rho, p, u for one shock tube against the exact solution at T.
inline ErrorReport compare_euler(const RiemannProblem& problem, int n_intervals, double cfl, L2Convention l2,
                                 const DsModel* model) {
  const Grid1D grid = make_grid(0.0, 1.0, n_intervals);
  auto exact = exact_riemann_profile(problem.left, problem.right, grid, problem.t_final);
  auto run_scheme = [&](Weighting w) {
    RunResult r = solve_euler(problem, n_intervals, StepPlan::adaptive(problem.t_final, cfl), scheme_config(w, model),
                              model);
    return primitive_columns<double>(r.state);
  };
  auto js = run_scheme(Weighting::JS);
  auto z = run_scheme(Weighting::Z);
  std::optional<std::array<std::vector<double>, 3>> ds;
  if (model != nullptr) ds = run_scheme(Weighting::DS);
  ErrorReport report{problem.name, {}};
  const char* names[3] = {"rho", "u", "p"};
  for (int k : {0, 2, 1}) {
    ErrorRow row{names[k], error_norms(js[k], exact[k], grid.dx, l2), error_norms(z[k], exact[k], grid.dx, l2),
                 std::nullopt};
    if (ds) row.ds = error_norms((*ds)[k], exact[k], grid.dx, l2);
    report.rows.push_back(row);
  }
  return report;
}

// ---- convergence --------------------------------------------------------------------

struct ConvergenceRow {
  int n = 0;
  double linf = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();  // log2(e_{N/2} / e_N)
};

using ConvergenceTable = std::vector<ConvergenceRow>;

/// Fills in observed orders from consecutive rows.
inline void fill_orders(ConvergenceTable& table) {
  for (std::size_t k = 1; k < table.size(); ++k)
    table[k].order = std::log(table[k - 1].linf / table[k].linf) /
                     std::log(static_cast<double>(table[k].n) / table[k - 1].n);
}

/// Default dt coefficient of the convergence study. With dt ~ dx^{5/3} the RK3
/// error scales like dx^5. At coefficient 8 that time error dominates the
/// table; small values (e.g. 0.4) expose the spatial error instead.
inline constexpr double kConvergenceDtCoeff = 8.0;

/// Steps for dt <= coeff dx^{5/3} landing exactly on T.
inline int convergence_steps(double dx, double t_final, double coeff = kConvergenceDtCoeff) {
  return static_cast<int>(std::ceil(t_final / (coeff * std::pow(dx, 5.0 / 3.0)) - 1e-9));
}

/// L-infinity error of the transport problem u_t + u_x = 0, sin(pi x) on [0, 2]
/// at T = 0.5 against the exact translation, for each N.
inline ConvergenceTable transport_convergence(const std::vector<int>& ns, const SchemeConfig& cfg,
                                              const MultiplierSource<double>* multipliers = nullptr,
                                              double dt_coeff = kConvergenceDtCoeff) {
  ScalarProblem problem = transport_problem();
  ConvergenceTable table;
  for (int n : ns) {
    SolutionField field = problem.initial_field(n);
    const Grid1D grid = field.grid;
    auto rhs = [&](std::span<const double> u) {
      return semidiscrete_rhs<double>(u, grid, problem.boundary, problem.flux, cfg, multipliers);
    };
    RunResult r = run(field.values, StepPlan::fixed(convergence_steps(grid.dx, problem.t_final, dt_coeff), problem.t_final), rhs);
    double err = 0.0;
    for (std::size_t i = 0; i < r.state.size(); ++i)
      err = std::max(err, std::abs(r.state[i] - problem.initial(grid.x(static_cast<int>(i)) - problem.t_final)));
    table.push_back({n, err});
  }
  fill_orders(table);
  return table;
}

// ---- output -------------------------------------------------------------------------

inline std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string sci6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline std::string ratio_text(const std::optional<double>& r) {
  if (!r) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *r);
  return buf;
}

/// Aligned text table in the layout L-inf (JS Z DS ratio) | L2 (JS Z DS ratio).
inline void print_report(std::ostream& out, const ErrorReport& report) {
  char line[512];
  int width = 12;
  for (const auto& r : report.rows) width = std::max(width, static_cast<int>(r.label.size()));
  width = std::min(width, 200);
  out << report.title << '\n';
  std::snprintf(line, sizeof line, "%-*s %10s %10s %10s %6s | %10s %10s %10s %6s\n", width, "", "Linf JS", "Linf Z",
                "Linf DS", "ratio", "L2 JS", "L2 Z", "L2 DS", "ratio");
  out << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%-*s %10s %10s %10s %6s | %10s %10s %10s %6s\n", width, r.label.c_str(),
                  fixed6(r.js.linf).c_str(), fixed6(r.z.linf).c_str(), r.ds ? fixed6(r.ds->linf).c_str() : "-",
                  ratio_text(r.ratio_linf()).c_str(), fixed6(r.js.l2).c_str(), fixed6(r.z.l2).c_str(),
                  r.ds ? fixed6(r.ds->l2).c_str() : "-", ratio_text(r.ratio_l2()).c_str());
    out << line;
  }
}

inline nlohmann::json report_to_json(const ErrorReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json j{{"label", r.label},
                     {"js", {{"linf", r.js.linf}, {"l2", r.js.l2}}},
                     {"z", {{"linf", r.z.linf}, {"l2", r.z.l2}}}};
    if (r.ds) {
      j["ds"] = {{"linf", r.ds->linf}, {"l2", r.ds->l2}};
      j["ratio_linf"] = r.ratio_linf() ? nlohmann::json(*r.ratio_linf()) : nlohmann::json();
      j["ratio_l2"] = r.ratio_l2() ? nlohmann::json(*r.ratio_l2()) : nlohmann::json();
    }
    rows.push_back(j);
  }
  return {{"title", report.title}, {"rows", rows}};
}

inline void print_convergence(std::ostream& out, const ConvergenceTable& table) {
  char line[128];
  std::snprintf(line, sizeof line, "%6s %14s %10s\n", "N", "Linf", "order");
  out << line;
  for (const auto& r : table) {
    std::snprintf(line, sizeof line, "%6d %14s %10s\n", r.n, sci6(r.linf).c_str(),
                  std::isnan(r.order) ? "-" : fixed6(r.order).c_str());
    out << line;
  }
}

}  // namespace wenods
