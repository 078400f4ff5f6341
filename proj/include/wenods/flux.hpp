#pragma once

// Scalar conservation laws: flux functions, global Lax-Friedrichs splitting
// and the conservative WENO semi-discretization du/dt = L(u).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wenods/autodiff.hpp"
#include "wenods/cnn.hpp"
#include "wenods/mesh.hpp"
#include "wenods/weno.hpp"

namespace wenods {

template <class T>
T transport_flux(const T& u) {
  return u;
}

template <class T>
T burgers_flux(const T& u) {
  return 0.5 * u * u;
}

/// Buckley-Leverett fractional flow u^2 / (u^2 + a (1-u)^2), 0 < a < 1.
template <class T>
T bl_flux(const T& u, double a) {
  T denom = u * u + a * (1.0 - u) * (1.0 - u);
  if (!(value_of(denom) > 0.0)) throw std::domain_error("bl_flux: non-positive denominator");
  return u * u / denom;
}

inline double bl_dflux(double u, double a) {
  double denom = u * u + a * (1.0 - u) * (1.0 - u);
  if (!(denom > 0.0)) throw std::domain_error("bl_flux: non-positive denominator");
  return 2.0 * a * u * (1.0 - u) / (denom * denom);
}

enum class FluxKind { Transport, Burgers, BuckleyLeverett };

struct ScalarFlux {
  FluxKind kind = FluxKind::Burgers;
  double a = 0.5;  // Buckley-Leverett viscosity ratio

  template <class T>
  T operator()(const T& u) const {
    switch (kind) {
      case FluxKind::Transport: return transport_flux(u);
      case FluxKind::Burgers: return burgers_flux(u);
      case FluxKind::BuckleyLeverett: return bl_flux(u, a);
    }
    return u;
  }

  double derivative(double u) const {
    switch (kind) {
      case FluxKind::Transport: return 1.0;
      case FluxKind::Burgers: return u;
      case FluxKind::BuckleyLeverett: return bl_dflux(u, a);
    }
    return 0.0;
  }

  /// Global Lax-Friedrichs speed max |f'(u)| over the field's value range.
  /// Buckley-Leverett samples f' densely since its maximum is interior.
  double max_speed(std::span<const double> u) const {
    auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    switch (kind) {
      case FluxKind::Transport: return 1.0;
      case FluxKind::Burgers: return std::max(std::abs(*lo), std::abs(*hi));
      case FluxKind::BuckleyLeverett: {
        constexpr int kSamples = 1024;
        double best = 0.0;
        for (int k = 0; k < kSamples; ++k) {
          double s = *lo + (*hi - *lo) * k / (kSamples - 1);
          best = std::max(best, std::abs(bl_dflux(s, a)));
        }
        return best;
      }
    }
    return 0.0;
  }
};

/// f^{+-} = (f +- alpha u) / 2.
template <class T>
void lf_split(std::span<const T> f, std::span<const T> u, double alpha, std::vector<T>& plus, std::vector<T>& minus) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("lf_split: non-finite alpha");
  plus.resize(f.size());
  minus.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    plus[i] = 0.5 * (f[i] + alpha * u[i]);
    minus[i] = 0.5 * (f[i] - alpha * u[i]);
  }
}

/// Lax-Friedrichs speeds used by one RHS evaluation. The solver fills the
/// record; replaying it freezes alpha (it is never differentiated).
struct AlphaLog {
  bool replay = false;
  std::size_t cursor = 0;
  std::vector<double> values;

  double next(double computed) {
    if (!replay) {
      values.push_back(computed);
      return computed;
    }
    if (cursor >= values.size()) throw std::logic_error("AlphaLog: replay past the recorded speeds");
    return values[cursor++];
  }
};

namespace detail {

template <class T>
std::span<const T, 5> window_at(const std::vector<T>& ext, int first) {
  return std::span<const T, 5>(ext.data() + first, 5);
}

}  // namespace detail

/// Reconstructs f^+ + f^- at the interfaces of n nodes from the ghost-extended
/// split fluxes and returns du/dt. `ghost` is the ghost width of `plus` / `minus`.
///
/// JS/Z evaluate each interface once. DS is node-centred: node i scales both
/// of its interface reconstructions by the same multiplier triple, so the
/// i+1/2 flux seen by nodes i and i+1 may differ.
template <class T>
std::vector<T> weno_flux_difference(const std::vector<T>& plus, const std::vector<T>& minus, int n, int ghost,
                                    double dx, const SchemeConfig& cfg, const std::vector<T>* delta_plus = nullptr,
                                    const std::vector<T>* delta_minus = nullptr) {
  std::vector<T> rhs(n);
  const int g = ghost;
  if (cfg.weighting != Weighting::DS) {
    // flux[j] is the i+1/2 interface with i = j - 1, j = 0..n
    std::vector<T> flux(n + 1);
    for (int j = 0; j <= n; ++j) {
      int i = j - 1 + g;
      flux[j] = interface_flux(detail::window_at(plus, i - 2), cfg) +
                reconstruct_negative(detail::window_at(minus, i - 1), cfg);
    }
    for (int i = 0; i < n; ++i) rhs[i] = -(flux[i + 1] - flux[i]) / dx;
    return rhs;
  }
  if (delta_plus == nullptr || delta_minus == nullptr)
    throw std::invalid_argument("weno_flux_difference: DS weighting needs multipliers");
  const auto& dp = *delta_plus;
  const auto& dm = *delta_minus;
  for (int i = 0; i < n; ++i) {
    // dp / dm hold nodes -1..n, so node i is at index i + 1.
    Triple<T> tp{dp[i], dp[i + 1], dp[i + 2]};
    Triple<T> tm{dm[i + 2], dm[i + 1], dm[i]};
    int c = i + g;
    T right = interface_flux(detail::window_at(plus, c - 2), cfg, &tp) +
              reconstruct_negative(detail::window_at(minus, c - 1), cfg, &tm);
    T left = interface_flux(detail::window_at(plus, c - 3), cfg, &tp) +
             reconstruct_negative(detail::window_at(minus, c - 2), cfg, &tm);
    rhs[i] = -(right - left) / dx;
  }
  return rhs;
}

/// L(u) for a scalar law on n stored nodes.
template <class T>
std::vector<T> semidiscrete_rhs(std::span<const T> u, const Grid1D& grid, Boundary boundary, const ScalarFlux& flux,
                                const SchemeConfig& cfg, const MultiplierSource<T>* multipliers = nullptr,
                                AlphaLog* alpha_log = nullptr) {
  const int n = static_cast<int>(u.size());
  std::vector<T> f(n);
  for (int i = 0; i < n; ++i) f[i] = flux(u[i]);
  std::vector<double> uv = values_of(u);
  double alpha = flux.max_speed(uv);
  if (alpha_log != nullptr) alpha = alpha_log->next(alpha);

  std::vector<T> plus, minus;
  lf_split(std::span<const T>(f), u, alpha, plus, minus);

  const bool ds = cfg.weighting == Weighting::DS;
  if (ds && multipliers == nullptr) throw std::invalid_argument("semidiscrete_rhs: DS weighting needs multipliers");
  const int ghost = ds ? std::max(kGhostWidth, multipliers->ghost) : kGhostWidth;
  std::vector<T> ext_plus = extend_with_ghosts(std::span<const T>(plus), boundary, ghost);
  std::vector<T> ext_minus = extend_with_ghosts(std::span<const T>(minus), boundary, ghost);
  if (!ds) return weno_flux_difference(ext_plus, ext_minus, n, ghost, grid.dx, cfg);

  auto context = [&](const std::vector<T>& ext) {
    int trim = ghost - multipliers->ghost;
    return std::span<const T>(ext).subspan(trim, n + 2 * multipliers->ghost);
  };
  std::vector<T> dp = multipliers->eval(context(ext_plus), n, Branch::Positive);
  std::vector<T> dm = multipliers->eval(context(ext_minus), n, Branch::Negative);
  return weno_flux_difference(ext_plus, ext_minus, n, ghost, grid.dx, cfg, &dp, &dm);
}

// ---- problems ----------------------------------------------------------------

enum class BurgersIc { Step, Gaussian, Sine };

/// A periodic scalar test problem: flux, domain, initial data and final time.
struct ScalarProblem {
  std::string name;
  ScalarFlux flux;
  double x_min = 0.0;
  double x_max = 2.0;
  double t_final = 0.3;
  Boundary boundary = Boundary::Periodic;
  std::function<double(double)> initial;

  SolutionField initial_field(int n_intervals) const {
    return sample_field(make_grid(x_min, x_max, n_intervals), boundary, initial);
  }
};

inline ScalarProblem transport_problem() {
  return {"transport", {FluxKind::Transport, 0.0}, 0.0, 2.0, 0.5, Boundary::Periodic,
          [](double x) { return std::sin(std::numbers::pi * x); }};
}

inline ScalarProblem bl_problem(double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("bl_problem: a must lie in (0, 1)");
  return {"buckley-leverett a=" + short_label(a), {FluxKind::BuckleyLeverett, a}, -1.0, 1.0, 0.4,
          Boundary::Periodic, [](double x) { return (x >= -0.5 && x <= 0.0) ? 1.0 : 0.0; }};
}

inline ScalarProblem burgers_problem(BurgersIc ic, double z) {
  ScalarProblem p{"", {FluxKind::Burgers, 0.0}, 0.0, 2.0, 0.3, Boundary::Periodic, {}};
  switch (ic) {
    case BurgersIc::Step:
      p.name = "burgers-step z=" + short_label(z);
      p.initial = [z](double x) { return (x >= 1.0 && x <= 2.0) ? z : 0.0; };
      break;
    case BurgersIc::Gaussian:
      p.name = "burgers-gauss z=" + short_label(z);
      p.initial = [z](double x) { return std::exp(-z * (x - 1.0) * (x - 1.0)); };
      break;
    case BurgersIc::Sine:
      p.name = "burgers-sine z=" + short_label(z);
      p.initial = [z](double x) { return z * std::sin(std::numbers::pi * x); };
      break;
  }
  return p;
}

}  // namespace wenods
