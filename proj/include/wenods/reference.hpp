#pragma once

// Ground truth: fine-grid WENO-Z trajectories for scalar problems (with an
// on-disk cache keyed by provenance) and exact shock-tube solutions.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wenods/flux.hpp"
#include "wenods/mesh.hpp"
#include "wenods/riemann.hpp"
#include "wenods/rk3.hpp"
#include "wenods/solve.hpp"

namespace wenods {

/// Snapshots of a scalar field at selected times on one grid.
struct Trajectory {
  Grid1D grid;
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;

  const std::vector<double>& final_state() const { return snapshots.back(); }
};

/// Fine grid and step count; a snapshot is kept every `snapshot_every` steps.
struct ReferencePlan {
  int n_intervals = 1024;
  int n_steps = 1;
  int snapshot_every = 1;
};

/// Reference plan for a coarse run of n x steps: the fine grid is `space_factor`
/// times finer and takes `time_factor` steps per coarse step (1024 x 8960 for
/// 128 x 140 with the default factors 8 and 64).
inline ReferencePlan reference_plan_for(int coarse_intervals, int coarse_steps, int space_factor = 8,
                                        int time_factor = 64) {
  return {coarse_intervals * space_factor, coarse_steps * time_factor, time_factor};
}

struct ReferenceSolution {
  std::string provenance;
  Trajectory trajectory;
};

inline std::string reference_provenance(const ScalarProblem& problem, const ReferencePlan& plan) {
  std::ostringstream s;
  s << "scheme=weno-z;epsilon=1e-13;problem=" << problem.name << ";domain=" << format_double(problem.x_min) << ":"
    << format_double(problem.x_max) << ";t_final=" << format_double(problem.t_final)
    << ";boundary=" << (problem.boundary == Boundary::Periodic ? "periodic" : "zero-gradient")
    << ";n_intervals=" << plan.n_intervals << ";n_steps=" << plan.n_steps
    << ";snapshot_every=" << plan.snapshot_every;
  return s.str();
}

/// WENO-Z with a fixed step count; deterministic for a given problem and plan.
inline ReferenceSolution fine_reference(const ScalarProblem& problem, const ReferencePlan& plan) {
  if (plan.snapshot_every < 1 || plan.n_steps % plan.snapshot_every != 0)
    throw std::invalid_argument("fine_reference: snapshot interval must divide the step count");
  ReferenceSolution ref;
  ref.provenance = reference_provenance(problem, plan);
  Trajectory& tr = ref.trajectory;
  SolutionField initial = problem.initial_field(plan.n_intervals);
  tr.grid = initial.grid;
  tr.times.push_back(0.0);
  tr.snapshots.push_back(initial.values);
  RunHooks hooks;
  hooks.observe = [&](int step, double t, std::span<const double> u) {
    if ((step + 1) % plan.snapshot_every == 0) {
      tr.times.push_back(t);
      tr.snapshots.emplace_back(u.begin(), u.end());
    }
  };
  solve_scalar(problem, plan.n_intervals, StepPlan::fixed(plan.n_steps, problem.t_final), SchemeConfig{}, nullptr,
               hooks);
  return ref;
}

/// Every `stride`-th point of a field on a nested grid.
inline std::vector<double> restrict_field(std::span<const double> fine, int stride) {
  if (stride < 1) throw std::invalid_argument("restrict_field: stride must be positive");
  std::vector<double> coarse;
  for (std::size_t i = 0; i < fine.size(); i += stride) coarse.push_back(fine[i]);
  return coarse;
}

/// Restricts every snapshot in space; keeps every `time_stride`-th snapshot.
inline Trajectory restrict_trajectory(const Trajectory& fine, int space_stride, int time_stride = 1) {
  if (fine.grid.n_intervals % space_stride != 0)
    throw std::invalid_argument("restrict_trajectory: grids are not nested");
  Trajectory out;
  out.grid = make_grid(fine.grid.x_min, fine.grid.x_max, fine.grid.n_intervals / space_stride);
  for (std::size_t k = 0; k < fine.snapshots.size(); k += time_stride) {
    out.times.push_back(fine.times[k]);
    out.snapshots.push_back(restrict_field(fine.snapshots[k], space_stride));
  }
  return out;
}

// ---- disk cache --------------------------------------------------------------

inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline constexpr const char* kCacheEnvVar = "WENODS_CACHE_DIR";

/// Directory of `<key>.csv` trajectories (columns t,x,u) with `<key>.json`
/// provenance sidecars. A cache with an empty directory is disabled.
class ReferenceCache {
 public:
  ReferenceCache() = default;
  explicit ReferenceCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  /// Uses $WENODS_CACHE_DIR when set; disabled otherwise.
  static ReferenceCache from_env() {
    const char* dir = std::getenv(kCacheEnvVar);
    return dir != nullptr && *dir != '\0' ? ReferenceCache(dir) : ReferenceCache();
  }

  bool enabled() const { return !dir_.empty(); }
  const std::filesystem::path& dir() const { return dir_; }

  static std::string key(const std::string& provenance) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(provenance)));
    return buf;
  }

  std::optional<Trajectory> load(const std::string& provenance) const {
    if (!enabled()) return std::nullopt;
    const std::string k = key(provenance);
    std::ifstream side(dir_ / (k + ".json"));
    std::ifstream data(dir_ / (k + ".csv"));
    if (!side || !data) return std::nullopt;
    nlohmann::json meta = nlohmann::json::parse(side, nullptr, false);
    if (meta.is_discarded() || meta.value("provenance", "") != provenance) return std::nullopt;
    std::vector<std::string> header;
    auto cols = read_csv(data, header);
    if (header != std::vector<std::string>{"t", "x", "u"}) return std::nullopt;
    Trajectory tr;
    tr.grid = make_grid(meta.at("x_min").get<double>(), meta.at("x_max").get<double>(),
                        meta.at("n_intervals").get<int>());
    const std::size_t points = meta.at("points").get<std::size_t>();
    if (points == 0 || cols[0].size() % points != 0) return std::nullopt;
    for (std::size_t r = 0; r < cols[0].size(); r += points) {
      tr.times.push_back(cols[0][r]);
      tr.snapshots.emplace_back(cols[2].begin() + r, cols[2].begin() + r + points);
    }
    return tr;
  }

  void store(const std::string& provenance, const Trajectory& tr) const {
    if (!enabled()) return;
    std::filesystem::create_directories(dir_);
    const std::string k = key(provenance);
    const std::size_t points = tr.snapshots.front().size();
    std::vector<std::vector<double>> cols(3);
    for (std::size_t s = 0; s < tr.snapshots.size(); ++s)
      for (std::size_t i = 0; i < points; ++i) {
        cols[0].push_back(tr.times[s]);
        cols[1].push_back(tr.grid.x(static_cast<int>(i)));
        cols[2].push_back(tr.snapshots[s][i]);
      }
    // Write to temporaries and rename so readers never see partial files.
    auto tmp_csv = dir_ / (k + ".csv.tmp");
    auto tmp_json = dir_ / (k + ".json.tmp");
    write_csv_file(tmp_csv.string(), {"t", "x", "u"}, cols);
    {
      nlohmann::json meta{{"provenance", provenance},
                          {"key", k},
                          {"x_min", tr.grid.x_min},
                          {"x_max", tr.grid.x_max},
                          {"n_intervals", tr.grid.n_intervals},
                          {"points", points},
                          {"snapshots", tr.snapshots.size()}};
      std::ofstream out(tmp_json);
      out << meta.dump(1) << '\n';
    }
    std::filesystem::rename(tmp_csv, dir_ / (k + ".csv"));
    std::filesystem::rename(tmp_json, dir_ / (k + ".json"));
  }

 private:
  std::filesystem::path dir_;
};

/// fine_reference through the cache.
inline ReferenceSolution cached_reference(const ScalarProblem& problem, const ReferencePlan& plan,
                                          const ReferenceCache& cache) {
  const std::string prov = reference_provenance(problem, plan);
  if (auto hit = cache.load(prov)) return {prov, std::move(*hit)};
  ReferenceSolution ref = fine_reference(problem, plan);
  cache.store(prov, ref.trajectory);
  return ref;
}

/// Reference on the coarse n x steps grid: one snapshot per coarse step.
inline Trajectory coarse_reference(const ScalarProblem& problem, int coarse_intervals, int coarse_steps,
                                   const ReferenceCache& cache = {}, int space_factor = 8, int time_factor = 64) {
  ReferencePlan plan = reference_plan_for(coarse_intervals, coarse_steps, space_factor, time_factor);
  ReferenceSolution ref = cached_reference(problem, plan, cache);
  return restrict_trajectory(ref.trajectory, space_factor, 1);
}

/// Exact conserved state of a shock tube at time t (initial data at t = 0).
inline std::vector<double> exact_euler_state(const RiemannProblem& problem, const Grid1D& grid, double t) {
  if (t <= 0.0) return euler_initial_state(grid, problem.left, problem.right);
  auto cols = exact_riemann_profile(problem.left, problem.right, grid, t);
  const int m = grid.n_intervals + 1;
  std::vector<double> s(3 * m);
  for (int i = 0; i < m; ++i) {
    Vec3<double> q = conserved_from_primitive(cols[0][i], cols[1][i], cols[2][i]);
    for (int k = 0; k < 3; ++k) s[k * m + i] = q[k];
  }
  return s;
}

}  // namespace wenods
