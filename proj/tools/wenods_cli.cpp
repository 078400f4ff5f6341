// wenods: solve, compare, convergence, train, gen-dataset and riemann.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wenods/wenods.hpp"

using namespace wenods;

namespace {

enum ExitCode { kOk = 0, kIoError = 1, kMalformed = 2, kSolverAbort = 3, kMissingModel = 4 };

class spec_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---- problem specs ------------------------------------------------------------------

struct ProblemSpec {
  bool euler = false;
  std::string family;
  ScalarProblem scalar;
  std::optional<ProblemSample> sample;  // BL and Burgers
  RiemannProblem riemann;
};

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw spec_error("problem spec: '" + key + "' needs a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v))
    throw spec_error("problem spec: '" + key + "' needs a number, got '" + text + "'");
  return v;
}

/// family[:key=value,...], e.g. "bl:a=0.25", "burgers:ic=step,z=1.5", "sod",
/// "euler:rl=1,ul=0,pl=1,rr=0.125,ur=0,pr=0.1".
ProblemSpec parse_problem(const std::string& text) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw spec_error("problem spec: expected key=value, got '" + item + "'");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  auto take = [&](const std::string& key, std::optional<double> fallback = std::nullopt) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (!fallback) throw spec_error("problem spec: '" + family + "' needs " + key + "=...");
      return *fallback;
    }
    double v = parse_number(key, it->second);
    kv.erase(it);
    return v;
  };

  ProblemSpec spec;
  spec.family = family;
  try {
    if (family == "transport") {
      spec.scalar = transport_problem();
    } else if (family == "bl" || family == "buckley-leverett") {
      spec.sample = bl_sample(take("a"));
      spec.scalar = spec.sample->scalar_problem();
    } else if (family == "burgers") {
      std::string ic = kv.count("ic") ? kv["ic"] : "step";
      kv.erase("ic");
      spec.sample = burgers_sample(burgers_ic_from_string(ic), take("z"));
      spec.scalar = spec.sample->scalar_problem();
    } else if (family == "sod" || family == "sod-modified" || family == "lax") {
      spec.euler = true;
      spec.riemann = family == "sod" ? sod_problem() : family == "lax" ? lax_problem() : sod_modified_problem();
    } else if (family == "euler") {
      spec.euler = true;
      spec.riemann = {"euler", {take("rl"), take("ul"), take("pl")}, {take("rr"), take("ur"), take("pr")}, 0.1};
      if (!(spec.riemann.left.rho > 0 && spec.riemann.left.p > 0 && spec.riemann.right.rho > 0 &&
            spec.riemann.right.p > 0))
        throw spec_error("problem spec: densities and pressures must be positive");
    } else {
      throw spec_error("problem spec: unknown family '" + family + "'");
    }
  } catch (const spec_error&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw spec_error(std::string("problem spec: ") + e.what());
  }
  if (!kv.empty()) throw spec_error("problem spec: unknown key '" + kv.begin()->first + "' for '" + family + "'");
  return spec;
}

Weighting parse_scheme(const std::string& s) {
  if (s == "js") return Weighting::JS;
  if (s == "z") return Weighting::Z;
  if (s == "ds") return Weighting::DS;
  throw spec_error("unknown scheme '" + s + "'");
}

std::optional<DsModel> load_optional_model(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_model(path);
}

/// Writes to `path`, or stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::ios_base::failure("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

/// Default fixed step counts: the training protocols scaled with the grid.
int default_scalar_steps(const ProblemSpec& spec, int nx, double t_final) {
  const double scale = static_cast<double>(nx) / 128.0;
  if (spec.family == "transport") return convergence_steps(2.0 / nx, t_final);
  if (spec.family == "burgers") return static_cast<int>(std::ceil(100 * scale * t_final / 0.3));
  return static_cast<int>(std::ceil(140 * scale * t_final / 0.4));
}

// ---- subcommands ---------------------------------------------------------------------

struct CommonFlags {
  std::string problem = "sod-modified";
  std::string scheme = "z";
  std::string model;
  int nx = 0;
  int nt = 0;
  double cfl = 0.0;
  double tfinal = 0.0;
  std::string out;
  std::string l2 = "rms";
  std::uint64_t seed = 0;
};

int cmd_solve(const CommonFlags& f) {
  ProblemSpec spec = parse_problem(f.problem);
  Weighting w = parse_scheme(f.scheme);
  auto model = load_optional_model(f.model);
  if (w == Weighting::DS && !model) throw spec_error("--scheme ds needs --model");
  const SchemeConfig cfg = scheme_config(w, model ? &*model : nullptr);
  Output out(f.out);
  if (spec.euler) {
    RiemannProblem p = spec.riemann;
    if (f.tfinal > 0) p.t_final = f.tfinal;
    const int nx = f.nx > 0 ? f.nx : 64;
    StepPlan plan = f.nt > 0 ? StepPlan::fixed(f.nt, p.t_final) : StepPlan::adaptive(p.t_final, f.cfl > 0 ? f.cfl : 0.9);
    RunResult r = solve_euler(p, nx, plan, cfg, model ? &*model : nullptr);
    auto cols = primitive_columns<double>(r.state);
    Grid1D grid = make_grid(0.0, 1.0, nx);
    write_csv(out.stream(), {"x", "rho", "u", "p"}, {grid_coordinates(grid, cols[0].size()), cols[0], cols[1], cols[2]});
  } else {
    ScalarProblem p = spec.scalar;
    if (f.tfinal > 0) p.t_final = f.tfinal;
    const int nx = f.nx > 0 ? f.nx : 128;
    StepPlan plan = f.cfl > 0   ? StepPlan::adaptive(p.t_final, f.cfl)
                    : f.nt > 0 ? StepPlan::fixed(f.nt, p.t_final)
                               : StepPlan::fixed(default_scalar_steps(spec, nx, p.t_final), p.t_final);
    RunResult r = solve_scalar(p, nx, plan, cfg, model ? &*model : nullptr);
    write_scalar_csv(out.stream(), make_grid(p.x_min, p.x_max, nx), r.state);
  }
  return kOk;
}

int cmd_compare(const CommonFlags& f, const std::string& set, bool json) {
  auto model = load_optional_model(f.model);
  const DsModel* m = model ? &*model : nullptr;
  const L2Convention l2 = l2_convention_from_string(f.l2);
  std::vector<ErrorReport> reports;
  if (set == "euler" || (set.empty() && parse_problem(f.problem).euler)) {
    std::vector<RiemannProblem> tubes;
    if (set == "euler") {
      tubes = {sod_problem(), sod_modified_problem(), lax_problem()};
    } else {
      tubes = {parse_problem(f.problem).riemann};
    }
    for (auto p : tubes) {
      if (f.tfinal > 0) p.t_final = f.tfinal;
      reports.push_back(compare_euler(p, f.nx > 0 ? f.nx : 64, f.cfl > 0 ? f.cfl : 0.9, l2, m));
    }
  } else {
    CompareOptions opt;
    opt.l2 = l2;
    opt.cache = ReferenceCache::from_env();
    opt.n_intervals = f.nx > 0 ? f.nx : 128;
    std::vector<ScalarCase> cases;
    std::string title;
    if (set == "bl") {
      cases = bl_test_set();
      title = "buckley-leverett";
    } else if (set == "burgers") {
      cases = burgers_test_set();
      title = "burgers";
    } else if (set == "burgers-extrapolation") {
      cases = burgers_extrapolation_set();
      title = "burgers (extrapolation)";
    } else if (set.empty()) {
      ProblemSpec spec = parse_problem(f.problem);
      if (spec.family == "transport") throw spec_error("compare: transport has an exact solution, use convergence");
      cases = {{spec.scalar.name, *spec.sample}};
      title = spec.scalar.name;
    } else {
      throw spec_error("compare: unknown set '" + set + "' (bl, burgers, burgers-extrapolation, euler)");
    }
    const bool burgers = title.rfind("burgers", 0) == 0;
    const double t_final = burgers ? 0.3 : 0.4;
    opt.n_steps = f.nt > 0 ? f.nt
                           : static_cast<int>(std::ceil((burgers ? 100.0 : 140.0) * opt.n_intervals / 128.0));
    if (f.tfinal > 0 && f.tfinal != t_final) throw spec_error("compare: --tfinal is fixed by the test set");
    reports.push_back(compare_scalar_set(title, cases, opt, m));
  }
  Output out(f.out);
  if (json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) j.push_back(report_to_json(r));
    nlohmann::json doc{{"l2_convention", f.l2}, {"model", f.model}, {"reports", j}};
    out.stream() << doc.dump(1) << '\n';
  } else {
    for (const auto& r : reports) print_report(out.stream(), r);
  }
  return kOk;
}

int cmd_convergence(const CommonFlags& f, std::vector<int> ns, double dt_coeff, double delta) {
  Weighting w = parse_scheme(f.scheme);
  auto model = load_optional_model(f.model);
  SchemeConfig cfg = scheme_config(w == Weighting::DS ? Weighting::Z : w);
  cfg.weighting = w;
  MultiplierSource<double> src;
  if (w == Weighting::DS) {
    if (model) {
      cfg.C = model->C;
      src = net_multipliers(*model);
    } else {
      if (!(delta >= 0.0 && delta <= 1.0)) throw spec_error("convergence: --delta must lie in [0, 1]");
      src = constant_multipliers<double>(delta);
    }
  }
  for (int n : ns)
    if (n < 6) throw spec_error("convergence: grid sizes must be at least 6");
  auto table = transport_convergence(ns, cfg, w == Weighting::DS ? &src : nullptr, dt_coeff);
  Output out(f.out);
  print_convergence(out.stream(), table);
  return kOk;
}

int cmd_train(const CommonFlags& f, const std::string& family, int cycles, int runs, double lr) {
  Protocol p = default_protocol(family_from_string(family));
  if (f.nx > 0) p.n_intervals = f.nx;
  if (f.nt > 0) p.n_steps = f.nt;
  if (f.cfl > 0) p.cfl = f.cfl;
  if (f.tfinal > 0) p.t_final = f.tfinal;
  if (cycles > 0) p.cycles = cycles;
  if (runs > 0) p.runs = runs;
  if (lr > 0) p.lr = lr;
  if (f.out.empty()) throw spec_error("train: --out DIR is required");
  TrainingOptions opt;
  opt.seed = f.seed;
  opt.out_dir = f.out;
  opt.cache = ReferenceCache::from_env();
  opt.progress = [](const CycleLog& log) {
    std::fprintf(stderr, "run %d cycle %3d  %s  validation %.6e%s\n", log.run, log.cycle,
                 log.sample.to_json().dump().c_str(), log.validation_loss,
                 log.aborted ? ("  aborted: " + log.abort_reason).c_str() : "");
  };
  TrainingResult r = train(p, opt);
  const CycleLog& best = r.logs[r.selected];
  std::fprintf(stderr, "selected run %d cycle %d (validation %.6e)\n", best.run, best.cycle, best.validation_loss);
  return kOk;
}

int cmd_gen_dataset(const CommonFlags& f, const std::string& family, int count) {
  if (count < 0) throw spec_error("gen-dataset: --count must be non-negative");
  Family fam = family_from_string(family);
  Rng master(f.seed);
  Output out(f.out);
  for (int k = 0; k < count; ++k) {
    nlohmann::json j = gen_sample(fam, master.next()).to_json();
    j["index"] = k;
    out.stream() << j.dump() << '\n';
  }
  return kOk;
}

int cmd_riemann(const CommonFlags& f) {
  ProblemSpec spec = parse_problem(f.problem);
  if (!spec.euler) throw spec_error("riemann: needs a shock-tube problem");
  RiemannProblem p = spec.riemann;
  if (f.tfinal > 0) p.t_final = f.tfinal;
  const int nx = f.nx > 0 ? f.nx : 64;
  StarState star = exact_riemann(p.left, p.right);
  std::fprintf(stderr, "p* = %.12g  u* = %.12g  left %s  right %s\n", star.p, star.u,
               star.left_wave == WaveKind::Shock ? "shock" : "rarefaction",
               star.right_wave == WaveKind::Shock ? "shock" : "rarefaction");
  Grid1D grid = make_grid(0.0, 1.0, nx);
  auto cols = exact_riemann_profile(p.left, p.right, grid, p.t_final);
  Output out(f.out);
  write_csv(out.stream(), {"x", "rho", "u", "p"}, {grid_coordinates(grid, cols[0].size()), cols[0], cols[1], cols[2]});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-D WENO-JS / WENO-Z / WENO-DS solver and benchmarks"};
  app.require_subcommand(1);
  CommonFlags f;

  auto add_grid = [&](CLI::App* c, bool with_scheme) {
    c->add_option("--problem", f.problem, "problem spec, e.g. sod, bl:a=0.25, burgers:ic=step,z=1.5");
    if (with_scheme) c->add_option("--scheme", f.scheme, "js, z or ds")->check(CLI::IsMember({"js", "z", "ds"}));
    c->add_option("--model", f.model, "trained DS model file");
    c->add_option("--nx", f.nx, "number of grid intervals")->check(CLI::PositiveNumber);
    auto nt = c->add_option("--nt", f.nt, "fixed number of time steps")->check(CLI::PositiveNumber);
    c->add_option("--cfl", f.cfl, "adaptive time step CFL number")->check(CLI::Range(1e-6, 1.0))->excludes(nt);
    c->add_option("--tfinal", f.tfinal, "final time")->check(CLI::PositiveNumber);
    c->add_option("--out", f.out, "output path (stdout when omitted)");
  };

  auto* solve = app.add_subcommand("solve", "run one problem and write the final state as CSV");
  add_grid(solve, true);

  std::string set;
  bool json = false;
  auto* compare = app.add_subcommand("compare", "error table of JS, Z and (with --model) DS");
  add_grid(compare, false);
  compare->add_option("--set", set, "bl, burgers, burgers-extrapolation or euler");
  compare->add_option("--l2-convention", f.l2, "rms or dx")->check(CLI::IsMember({"rms", "dx"}));
  compare->add_flag("--json", json, "write JSON instead of a text table");

  std::vector<int> ns{20, 40, 80, 160, 320, 640};
  double dt_coeff = kConvergenceDtCoeff;
  double delta = 0.5;
  auto* conv = app.add_subcommand("convergence", "transport convergence table");
  conv->add_option("--scheme", f.scheme, "js, z or ds")->check(CLI::IsMember({"js", "z", "ds"}));
  conv->add_option("--model", f.model, "trained DS model file (ds)");
  conv->add_option("--ns", ns, "grid sizes")->delimiter(',');
  conv->add_option("--dt-coeff", dt_coeff, "time step dt = coeff * dx^(5/3)")->check(CLI::PositiveNumber);
  conv->add_option("--delta", delta, "constant multiplier for ds without a model");
  conv->add_option("--out", f.out, "output path");

  std::string family = "bl";
  int cycles = 0, runs = 0, count = 10;
  double lr = 0.0;
  auto* tr = app.add_subcommand("train", "train a DS model");
  tr->add_option("--family", family, "bl, burgers or euler");
  tr->add_option("--seed", f.seed, "master seed");
  tr->add_option("--out", f.out, "output directory")->required();
  tr->add_option("--nx", f.nx, "grid intervals")->check(CLI::PositiveNumber);
  auto tr_nt = tr->add_option("--nt", f.nt, "time steps")->check(CLI::PositiveNumber);
  tr->add_option("--cfl", f.cfl, "Euler CFL number")->check(CLI::Range(1e-6, 1.0))->excludes(tr_nt);
  tr->add_option("--tfinal", f.tfinal, "final time")->check(CLI::PositiveNumber);
  tr->add_option("--cycles", cycles, "cycles per run")->check(CLI::PositiveNumber);
  tr->add_option("--runs", runs, "independent runs")->check(CLI::PositiveNumber);
  tr->add_option("--lr", lr, "Adam learning rate")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen-dataset", "write generated training problems as JSON lines");
  gen->add_option("--family", family, "bl, burgers or euler");
  gen->add_option("--count", count, "number of samples");
  gen->add_option("--seed", f.seed, "master seed");
  gen->add_option("--out", f.out, "output path");

  auto* rm = app.add_subcommand("riemann", "exact shock-tube solution as CSV");
  rm->add_option("--problem", f.problem, "sod, sod-modified, lax or euler:rl=..,ul=..,pl=..,rr=..,ur=..,pr=..");
  rm->add_option("--nx", f.nx, "grid intervals")->check(CLI::PositiveNumber);
  rm->add_option("--tfinal", f.tfinal, "time")->check(CLI::PositiveNumber);
  rm->add_option("--out", f.out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kMalformed;
  }

  try {
    if (*solve) return cmd_solve(f);
    if (*compare) return cmd_compare(f, set, json);
    if (*conv) return cmd_convergence(f, ns, dt_coeff, delta);
    if (*tr) return cmd_train(f, family, cycles, runs, lr);
    if (*gen) return cmd_gen_dataset(f, family, count);
    if (*rm) return cmd_riemann(f);
  } catch (const model_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kMissingModel;
  } catch (const solver_error& e) {
    std::fprintf(stderr, "solver aborted: %s\n", e.what());
    return kSolverAbort;
  } catch (const physical_state_error& e) {
    std::fprintf(stderr, "solver aborted: %s at point %d\n", e.what(), e.location());
    return kSolverAbort;
  } catch (const ad::nonfinite_error& e) {
    std::fprintf(stderr, "solver aborted: %s\n", e.what());
    return kSolverAbort;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kMalformed;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "solver aborted: %s\n", e.what());
    return kSolverAbort;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoError;
  }
  return kOk;
}
