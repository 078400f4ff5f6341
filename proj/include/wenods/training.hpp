#pragma once

// Training of the smoothness-multiplier networks: problem generators, losses,
// Adam, the per-time-step training cycle and validation-based selection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wenods/autodiff.hpp"
#include "wenods/cnn.hpp"
#include "wenods/euler.hpp"
#include "wenods/flux.hpp"
#include "wenods/random.hpp"
#include "wenods/reference.hpp"
#include "wenods/rk3.hpp"
#include "wenods/solve.hpp"

namespace wenods {

enum class Family { BuckleyLeverett, Burgers, Euler };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::BuckleyLeverett: return "buckley-leverett";
    case Family::Burgers: return "burgers";
    case Family::Euler: return "euler";
  }
  return "?";
}

inline Family family_from_string(const std::string& s) {
  if (s == "buckley-leverett" || s == "bl") return Family::BuckleyLeverett;
  if (s == "burgers") return Family::Burgers;
  if (s == "euler") return Family::Euler;
  throw std::invalid_argument("unknown problem family '" + s + "'");
}

inline const char* to_string(BurgersIc ic) {
  switch (ic) {
    case BurgersIc::Step: return "step";
    case BurgersIc::Gaussian: return "gauss";
    case BurgersIc::Sine: return "sine";
  }
  return "?";
}

inline BurgersIc burgers_ic_from_string(const std::string& s) {
  if (s == "step") return BurgersIc::Step;
  if (s == "gauss" || s == "gaussian") return BurgersIc::Gaussian;
  if (s == "sine") return BurgersIc::Sine;
  throw std::invalid_argument("unknown Burgers initial condition '" + s + "'");
}

/// One training or test problem of a family.
struct ProblemSample {
  Family family = Family::BuckleyLeverett;
  double a = 0.5;                       // Buckley-Leverett
  BurgersIc ic = BurgersIc::Step;       // Burgers
  double z = 1.0;
  Primitive left{1.0, 0.0, 1.0};        // Euler
  Primitive right{0.125, 0.0, 0.1};
  std::uint64_t rng_seed = 0;

  ScalarProblem scalar_problem() const {
    if (family == Family::BuckleyLeverett) return bl_problem(a);
    if (family == Family::Burgers) return burgers_problem(ic, z);
    throw std::logic_error("ProblemSample: Euler sample has no scalar problem");
  }

  RiemannProblem riemann_problem(double t_final = 0.1) const {
    if (family != Family::Euler) throw std::logic_error("ProblemSample: not an Euler sample");
    return {"riemann", left, right, t_final};
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"family", to_string(family)}, {"rng_seed", rng_seed}};
    switch (family) {
      case Family::BuckleyLeverett: j["a"] = a; break;
      case Family::Burgers:
        j["ic"] = to_string(ic);
        j["z"] = z;
        break;
      case Family::Euler:
        j["left"] = {left.rho, left.u, left.p};
        j["right"] = {right.rho, right.u, right.p};
        break;
    }
    return j;
  }
};

inline ProblemSample bl_sample(double a) {
  ProblemSample s;
  s.family = Family::BuckleyLeverett;
  s.a = a;
  return s;
}

inline ProblemSample burgers_sample(BurgersIc ic, double z) {
  ProblemSample s;
  s.family = Family::Burgers;
  s.ic = ic;
  s.z = z;
  return s;
}

inline ProblemSample euler_sample(const Primitive& left, const Primitive& right) {
  ProblemSample s;
  s.family = Family::Euler;
  s.left = left;
  s.right = right;
  return s;
}

inline ProblemSample gen_bl_sample(Rng& rng) { return bl_sample(rng.uniform(0.05, 0.95)); }

/// Initial-condition family chosen uniformly; z in [1,2], [10,30], [1,2].
inline ProblemSample gen_burgers_sample(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return burgers_sample(BurgersIc::Step, rng.uniform(1.0, 2.0));
    case 1: return burgers_sample(BurgersIc::Gaussian, rng.uniform(10.0, 30.0));
    default: return burgers_sample(BurgersIc::Sine, rng.uniform(1.0, 2.0));
  }
}

/// The raw draws behind one Euler sample, kept for distribution checks.
struct EulerDraw {
  int branch = 0;
  // branch 0: a, b, c, d, e; branch 1: k, l, r
  std::vector<double> raw;
  Primitive left;
  Primitive right;
};

inline EulerDraw draw_euler(Rng& rng) {
  EulerDraw d;
  d.branch = static_cast<int>(rng.below(2));
  if (d.branch == 0) {
    double a = rng.uniform(0.5, 10.0), b = rng.uniform(-0.05, 0.05), c = rng.uniform(5.0, 10.0);
    double dd = rng.uniform(-0.05, 0.05), e = rng.uniform(0.0, 1.0);
    d.raw = {a, b, c, dd, e};
    double pl = a + b, pr = 1.0 / c;
    d.left = {pl, e, pl};
    d.right = {pr + dd, 0.0, pr};
  } else {
    double k = rng.uniform(1.0, 3.0), l = rng.uniform(-0.05, 0.05), r = rng.uniform(0.0, 1.0);
    d.raw = {k, l, r};
    d.left = {k, r, 1.0};
    d.right = {k / 10.0 + l, 0.0, 0.1};
  }
  return d;
}

inline ProblemSample gen_euler_sample(Rng& rng) {
  EulerDraw d = draw_euler(rng);
  return euler_sample(d.left, d.right);
}

inline ProblemSample gen_sample(Family family, std::uint64_t seed) {
  Rng rng(seed);
  ProblemSample s = family == Family::BuckleyLeverett ? gen_bl_sample(rng)
                    : family == Family::Burgers      ? gen_burgers_sample(rng)
                                                     : gen_euler_sample(rng);
  s.rng_seed = seed;
  return s;
}

// ---- losses --------------------------------------------------------------------

template <class T>
T loss_mse(std::span<const T> u, std::span<const double> ref) {
  if (u.size() != ref.size() || u.empty()) throw std::invalid_argument("loss_mse: size mismatch");
  T sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += square(u[i] - ref[i]);
  return sum / static_cast<double>(u.size());
}

/// Total amount by which u leaves [u_min, u_max].
template <class T>
T loss_overflow(std::span<const T> u, double u_min = 0.0, double u_max = 1.0) {
  using std::abs;
  using std::max;
  using std::min;
  T sum = 0.0;
  for (const T& v : u) sum += abs(min(v, T(u_min)) - u_min) + abs(max(v, T(u_max)) - u_max);
  return sum;
}

/// MSE of density, velocity and pressure summed; both states are conserved.
template <class T>
T loss_euler(std::span<const T> state, std::span<const double> ref) {
  if (state.size() != ref.size()) throw std::invalid_argument("loss_euler: size mismatch");
  auto cols = primitive_columns(state);
  auto ref_cols = primitive_columns(ref);
  T sum = 0.0;
  for (int k = 0; k < 3; ++k) sum += loss_mse(std::span<const T>(cols[k]), std::span<const double>(ref_cols[k]));
  return sum;
}

// ---- Adam ------------------------------------------------------------------------

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// p -= lr * m_hat / (sqrt(v_hat) + eps) with bias-corrected moments.
inline void adam_update(std::span<double> params, std::span<const double> grads, AdamState& s) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_update: gradient size mismatch");
  if (s.m.empty()) {
    s.m.assign(params.size(), 0.0);
    s.v.assign(params.size(), 0.0);
  }
  if (s.m.size() != params.size()) throw std::invalid_argument("adam_update: state size mismatch");
  for (double g : grads)
    if (!std::isfinite(g)) throw ad::nonfinite_error("adam_update: non-finite gradient");
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    s.m[k] = s.beta1 * s.m[k] + (1.0 - s.beta1) * grads[k];
    s.v[k] = s.beta2 * s.v[k] + (1.0 - s.beta2) * grads[k] * grads[k];
    params[k] -= s.lr * (s.m[k] / c1) / (std::sqrt(s.v[k] / c2) + s.eps);
  }
}

// ---- protocols ---------------------------------------------------------------------

enum class LossKind { Mse, MseOverflow, Euler };

struct Protocol {
  Family family = Family::BuckleyLeverett;
  double lr = 1e-4;
  int n_intervals = 128;
  int n_steps = 140;  // scalar families; Euler steps adaptively
  double cfl = 0.9;
  double t_final = 0.4;
  int cycles = 50;
  int runs = 1;
  LossKind loss = LossKind::MseOverflow;
  std::vector<int> kernels{5, 5, 5};
  std::vector<int> hidden{16, 16};
  double C = 0.1;
  int space_factor = 8;  // reference grid refinement
  int time_factor = 64;  // reference steps per coarse step

  nlohmann::json to_json() const {
    const char* loss_name = loss == LossKind::Mse ? "mse" : loss == LossKind::MseOverflow ? "mse+overflow" : "euler";
    return {{"family", to_string(family)}, {"lr", lr},           {"n_intervals", n_intervals},
            {"n_steps", n_steps},          {"cfl", cfl},         {"t_final", t_final},
            {"cycles", cycles},            {"runs", runs},       {"loss", loss_name},
            {"kernels", kernels},          {"hidden", hidden},   {"C", C},
            {"space_factor", space_factor}, {"time_factor", time_factor}};
  }
};

inline Protocol bl_protocol() { return Protocol{}; }

inline Protocol burgers_protocol() {
  Protocol p;
  p.family = Family::Burgers;
  p.lr = 1e-3;
  p.n_steps = 100;
  p.t_final = 0.3;
  p.cycles = 90;
  p.runs = 3;
  p.loss = LossKind::Mse;
  return p;
}

inline Protocol euler_protocol() {
  Protocol p;
  p.family = Family::Euler;
  p.lr = 1e-3;
  p.n_intervals = 64;
  p.t_final = 0.1;
  p.cycles = 100;
  p.loss = LossKind::Euler;
  p.kernels = {5, 5, 3};
  p.hidden = {16, 16};
  return p;
}

inline Protocol default_protocol(Family f) {
  return f == Family::BuckleyLeverett ? bl_protocol() : f == Family::Burgers ? burgers_protocol() : euler_protocol();
}

/// BL: a in {0.15, 0.35, 0.55, 0.75}; Burgers: one sample per family at the
/// midpoint of its z range; Euler: the Sod problem.
inline std::vector<ProblemSample> validation_set(Family f) {
  switch (f) {
    case Family::BuckleyLeverett: return {bl_sample(0.15), bl_sample(0.35), bl_sample(0.55), bl_sample(0.75)};
    case Family::Burgers:
      return {burgers_sample(BurgersIc::Step, 1.5), burgers_sample(BurgersIc::Gaussian, 20.0),
              burgers_sample(BurgersIc::Sine, 1.5)};
    case Family::Euler: return {euler_sample(sod_problem().left, sod_problem().right)};
  }
  return {};
}

// ---- training cycle ------------------------------------------------------------------

struct CycleLog {
  int run = 0;
  int cycle = 0;  // 1-based
  ProblemSample sample;
  std::vector<double> step_losses;
  double validation_loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> validation_losses;
  bool aborted = false;
  std::string abort_reason;

  nlohmann::json to_json() const {
    nlohmann::json j{{"run", run}, {"cycle", cycle}, {"sample", sample.to_json()}, {"steps", step_losses.size()}};
    if (!step_losses.empty()) {
      double sum = 0.0, mx = 0.0;
      for (double l : step_losses) {
        sum += l;
        mx = std::max(mx, l);
      }
      j["loss_mean"] = sum / step_losses.size();
      j["loss_max"] = mx;
      j["loss_final"] = step_losses.back();
    }
    j["validation_loss"] = std::isfinite(validation_loss) ? nlohmann::json(validation_loss) : nlohmann::json();
    j["validation_losses"] = validation_losses;
    j["aborted"] = aborted;
    if (aborted) j["abort_reason"] = abort_reason;
    return j;
  }
};

/// Training targets of one cycle: reference state after each step. Scalar
/// families use a fixed step plan with precomputed snapshots; Euler steps
/// adaptively and evaluates the exact solution at each new time.
struct CycleTargets {
  Trajectory scalar;  // n_steps + 1 snapshots on the training grid
  RiemannProblem riemann;
};

template <class T>
T protocol_loss(LossKind kind, std::span<const T> u, std::span<const double> ref) {
  switch (kind) {
    case LossKind::Mse: return loss_mse(u, ref);
    case LossKind::MseOverflow: return loss_mse(u, ref) + loss_overflow(u);
    case LossKind::Euler: return loss_euler(u, ref);
  }
  return T(0.0);
}

/// One pass from t = 0 to T on one sample. After every time step the loss
/// against the reference is differentiated through that step only and both
/// networks take one Adam step. A non-finite loss, gradient or state aborts
/// the cycle and restores the parameters and optimizer state from its start.
inline CycleLog training_cycle(DsModel& model, AdamState& pos_state, AdamState& neg_state,
                               const ProblemSample& sample, const Protocol& protocol, const CycleTargets& targets) {
  CycleLog log;
  log.sample = sample;
  const DsModel saved_model = model;
  const AdamState saved_pos = pos_state, saved_neg = neg_state;
  const SchemeConfig cfg = scheme_config(Weighting::DS, &model);
  const bool euler = protocol.family == Family::Euler;

  Grid1D grid;
  ScalarProblem scalar;
  std::vector<double> state;
  if (euler) {
    grid = make_grid(0.0, 1.0, protocol.n_intervals);
    state = euler_initial_state(grid, targets.riemann.left, targets.riemann.right);
  } else {
    scalar = sample.scalar_problem();
    grid = targets.scalar.grid;
    state = targets.scalar.snapshots.front();
  }

  const std::size_t n_pos = model.positive.total_params();
  const std::size_t n_neg = model.negative.total_params();
  ad::Tape tape;
  std::vector<ad::Var> params;
  std::vector<double> grads_pos(n_pos), grads_neg(n_neg);
  try {
    double t = 0.0;
    for (int step = 0;; ++step) {
      double dt;
      if (euler) {
        if (t >= protocol.t_final) break;
        dt = protocol.cfl * grid.dx / euler_max_signal(state);
        if (t + dt >= protocol.t_final) dt = protocol.t_final - t;
      } else {
        if (step == protocol.n_steps) break;
        dt = protocol.t_final / protocol.n_steps;
      }
      tape.clear();
      params.clear();
      for (double p : model.positive.params()) params.push_back(tape.variable(p));
      for (double p : model.negative.params()) params.push_back(tape.variable(p));
      std::span<const ad::Var> pos(params.data(), n_pos), neg(params.data() + n_pos, n_neg);
      MultiplierSource<ad::Var> source = net_multipliers<ad::Var>(model, pos, neg);
      std::vector<ad::Var> u(state.begin(), state.end());

      std::vector<ad::Var> next;
      std::vector<double> ref;
      if (euler) {
        auto rhs = [&](std::span<const ad::Var> q) { return euler_rhs<ad::Var>(q, grid, cfg, &source); };
        next = rk3_step<ad::Var>(u, dt, rhs);
        t = t + dt >= protocol.t_final ? protocol.t_final : t + dt;
        ref = exact_euler_state(targets.riemann, grid, t);
      } else {
        auto rhs = [&](std::span<const ad::Var> x) {
          return semidiscrete_rhs<ad::Var>(x, grid, scalar.boundary, scalar.flux, cfg, &source);
        };
        next = rk3_step<ad::Var>(u, dt, rhs);
        ref = targets.scalar.snapshots.at(step + 1);
      }
      ad::Var loss = protocol_loss<ad::Var>(protocol.loss, next, ref);
      if (!std::isfinite(loss.value())) throw ad::nonfinite_error("non-finite loss");
      std::vector<double> g = tape.gradient(loss, params);
      std::copy(g.begin(), g.begin() + n_pos, grads_pos.begin());
      std::copy(g.begin() + n_pos, g.end(), grads_neg.begin());
      adam_update(model.positive.params(), grads_pos, pos_state);
      adam_update(model.negative.params(), grads_neg, neg_state);
      log.step_losses.push_back(loss.value());
      state = values_of(std::span<const ad::Var>(next));
      if (euler) check_physical(state);
    }
  } catch (const std::exception& e) {
    model = saved_model;
    pos_state = saved_pos;
    neg_state = saved_neg;
    log.aborted = true;
    log.abort_reason = e.what();
  }
  return log;
}

// ---- validation and selection ----------------------------------------------------------

/// Reference states at T for the validation problems, computed once.
class Validator {
 public:
  Validator(const Protocol& protocol, const ReferenceCache& cache) : protocol_(protocol) {
    problems_ = validation_set(protocol.family);
    for (const auto& s : problems_) {
      if (protocol.family == Family::Euler) {
        Grid1D grid = make_grid(0.0, 1.0, protocol.n_intervals);
        targets_.push_back(exact_euler_state(s.riemann_problem(protocol.t_final), grid, protocol.t_final));
      } else {
        targets_.push_back(coarse_reference(s.scalar_problem(), protocol.n_intervals, protocol.n_steps, cache,
                                            protocol.space_factor, protocol.time_factor)
                               .final_state());
      }
    }
  }

  const std::vector<ProblemSample>& problems() const { return problems_; }

  /// Per-problem loss at T of the DS scheme with this model; NaN if a run aborts.
  std::vector<double> losses(const DsModel& model) const {
    std::vector<double> out;
    const SchemeConfig cfg = scheme_config(Weighting::DS, &model);
    for (std::size_t k = 0; k < problems_.size(); ++k) {
      try {
        std::vector<double> u;
        if (protocol_.family == Family::Euler) {
          u = solve_euler(problems_[k].riemann_problem(protocol_.t_final), protocol_.n_intervals,
                          StepPlan::adaptive(protocol_.t_final, protocol_.cfl), cfg, &model)
                  .state;
        } else {
          u = solve_scalar(problems_[k].scalar_problem(), protocol_.n_intervals,
                           StepPlan::fixed(protocol_.n_steps, protocol_.t_final), cfg, &model)
                  .state;
        }
        out.push_back(protocol_loss<double>(protocol_.loss, u, targets_[k]));
      } catch (const std::exception&) {
        out.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    return out;
  }

 private:
  Protocol protocol_;
  std::vector<ProblemSample> problems_;
  std::vector<std::vector<double>> targets_;
};

/// Mean of the per-problem losses; NaN if any is non-finite.
inline double mean_loss(const std::vector<double>& losses) {
  double sum = 0.0;
  for (double l : losses) {
    if (!std::isfinite(l)) return std::numeric_limits<double>::quiet_NaN();
    sum += l;
  }
  return losses.empty() ? std::numeric_limits<double>::quiet_NaN() : sum / losses.size();
}

/// Index of the cycle with the smallest finite validation loss (earliest on ties).
inline std::size_t select_model(const std::vector<CycleLog>& logs) {
  if (logs.empty()) throw std::invalid_argument("select_model: no training cycles");
  std::size_t best = logs.size();
  for (std::size_t k = 0; k < logs.size(); ++k) {
    double v = logs[k].validation_loss;
    if (!std::isfinite(v)) continue;
    if (best == logs.size() || v < logs[best].validation_loss) best = k;
  }
  if (best == logs.size()) throw std::invalid_argument("select_model: no cycle has a finite validation loss");
  return best;
}

// ---- full runs ------------------------------------------------------------------------

struct TrainingOptions {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;  // empty: no files written
  ReferenceCache cache;
  std::function<void(const CycleLog&)> progress;
};

struct TrainingResult {
  std::vector<CycleLog> logs;
  std::vector<DsModel> checkpoints;  // model after each logged cycle
  std::size_t selected = 0;

  const DsModel& model() const { return checkpoints.at(selected); }
};

inline std::string checkpoint_name(int cycle) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "checkpoint_cycle_%04d.json", cycle);
  return buf;
}

/// Reference targets for one training sample.
inline CycleTargets cycle_targets(const ProblemSample& sample, const Protocol& protocol, const ReferenceCache& cache) {
  CycleTargets t;
  if (protocol.family == Family::Euler) {
    t.riemann = sample.riemann_problem(protocol.t_final);
  } else {
    t.scalar = coarse_reference(sample.scalar_problem(), protocol.n_intervals, protocol.n_steps, cache,
                                protocol.space_factor, protocol.time_factor);
  }
  return t;
}

/// `protocol.runs` independent runs of `protocol.cycles` cycles. Run r draws
/// its initialization and its sample stream from the master seed, so the
/// whole result is a function of (seed, protocol). With an output directory,
/// writes run_log.jsonl, run_<r>/checkpoint_cycle_<c>.json and model.json
/// (the selected checkpoint).
inline TrainingResult train(const Protocol& protocol, const TrainingOptions& options) {
  if (protocol.cycles < 1 || protocol.runs < 1) throw std::invalid_argument("train: need at least one cycle and run");
  if (protocol.family != Family::Euler && protocol.n_steps < 1)
    throw std::invalid_argument("train: need at least one time step");
  const Validator validator(protocol, options.cache);
  TrainingResult result;
  std::ofstream log_file;
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    log_file.open(options.out_dir / "run_log.jsonl");
    if (!log_file) throw std::runtime_error("train: cannot write the run log");
    nlohmann::json header{{"type", "header"},
                          {"seed", options.seed},
                          {"protocol", protocol.to_json()},
                          {"initialization", "weights uniform in +-1/sqrt(fan_in), biases zero"}};
    log_file << header.dump() << '\n';
  }

  Rng master(options.seed);
  for (int run = 0; run < protocol.runs; ++run) {
    Rng init_rng(master.next());
    Rng sample_rng(master.next());
    DsModel model = make_model(protocol.kernels, protocol.hidden, protocol.C);
    model.positive.initialize(init_rng);
    model.negative.initialize(init_rng);
    AdamState pos_state, neg_state;
    pos_state.lr = neg_state.lr = protocol.lr;
    for (int cycle = 1; cycle <= protocol.cycles; ++cycle) {
      ProblemSample sample = gen_sample(protocol.family, sample_rng.next());
      CycleLog log;
      try {
        CycleTargets targets = cycle_targets(sample, protocol, options.cache);
        log = training_cycle(model, pos_state, neg_state, sample, protocol, targets);
      } catch (const std::exception& e) {
        log.sample = sample;
        log.aborted = true;
        log.abort_reason = std::string("reference: ") + e.what();
      }
      log.run = run;
      log.cycle = cycle;
      if (!log.aborted) {
        log.validation_losses = validator.losses(model);
        log.validation_loss = mean_loss(log.validation_losses);
      }
      result.logs.push_back(log);
      result.checkpoints.push_back(model);
      if (!options.out_dir.empty()) {
        auto dir = options.out_dir / ("run_" + std::to_string(run));
        std::filesystem::create_directories(dir);
        save_model(model, (dir / checkpoint_name(cycle)).string());
        nlohmann::json rec = log.to_json();
        rec["type"] = "cycle";
        rec["seed"] = options.seed;
        log_file << rec.dump() << '\n' << std::flush;
      }
      if (options.progress) options.progress(log);
    }
  }
  result.selected = select_model(result.logs);
  if (!options.out_dir.empty()) {
    const CycleLog& best = result.logs[result.selected];
    save_model(result.model(), (options.out_dir / "model.json").string());
    nlohmann::json rec{{"type", "selection"},
                       {"run", best.run},
                       {"cycle", best.cycle},
                       {"validation_loss", best.validation_loss},
                       {"checkpoint", "run_" + std::to_string(best.run) + "/" + checkpoint_name(best.cycle)}};
    log_file << rec.dump() << '\n';
  }
  return result;
}

}  // namespace wenods
