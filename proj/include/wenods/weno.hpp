#pragma once

// Pointwise fifth-order WENO reconstruction at the i+1/2 interface.
//
// A window holds the five split-flux values (f_{i-2}, ..., f_{i+2}) of the
// positive branch. The negative branch reuses the same kernel on the
// reflected window (f_{i+3}, ..., f_{i-1}).

#include <array>
#include <span>
#include <stdexcept>

#include "wenods/autodiff.hpp"

namespace wenods {

template <class T>
using Triple = std::array<T, 3>;

inline constexpr std::array<double, 3> kIdealWeights{0.1, 0.6, 0.3};

enum class Weighting { JS, Z, DS };

struct SchemeConfig {
  Weighting weighting = Weighting::Z;
  double epsilon = 1e-13;
  double C = 0.1;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("SchemeConfig: epsilon must be positive");
    if (!(C > 0.0)) throw std::invalid_argument("SchemeConfig: C must be positive");
  }
};

inline const char* to_string(Weighting w) {
  switch (w) {
    case Weighting::JS: return "WENO-JS";
    case Weighting::Z: return "WENO-Z";
    case Weighting::DS: return "WENO-DS";
  }
  return "?";
}

template <class T>
Triple<T> candidate_fluxes(std::span<const T, 5> w) {
  return {(2.0 * w[0] - 7.0 * w[1] + 11.0 * w[2]) / 6.0,
          (-w[1] + 5.0 * w[2] + 2.0 * w[3]) / 6.0,
          (2.0 * w[2] + 5.0 * w[3] - w[4]) / 6.0};
}

template <class T>
Triple<T> smoothness_indicators(std::span<const T, 5> w) {
  constexpr double k13_12 = 13.0 / 12.0;
  return {k13_12 * square(w[0] - 2.0 * w[1] + w[2]) + 0.25 * square(w[0] - 4.0 * w[1] + 3.0 * w[2]),
          k13_12 * square(w[1] - 2.0 * w[2] + w[3]) + 0.25 * square(w[3] - w[1]),
          k13_12 * square(w[2] - 2.0 * w[3] + w[4]) + 0.25 * square(3.0 * w[2] - 4.0 * w[3] + w[4])};
}

template <class T>
Triple<T> normalize(const Triple<T>& alpha) {
  T sum = alpha[0] + alpha[1] + alpha[2];
  return {alpha[0] / sum, alpha[1] / sum, alpha[2] / sum};
}

template <class T>
Triple<T> weights_js(const Triple<T>& beta, const SchemeConfig& cfg) {
  Triple<T> alpha;
  for (int m = 0; m < 3; ++m) alpha[m] = kIdealWeights[m] / square(cfg.epsilon + beta[m]);
  return normalize(alpha);
}

template <class T>
T tau5(const Triple<T>& beta) {
  return abs(beta[0] - beta[2]);
}

/// Z weights with the raw epsilon, i.e. alpha_m = d_m (1 + (tau5 / (beta_m + eps))^2).
template <class T>
Triple<T> weights_z(const Triple<T>& beta, double epsilon) {
  T tau = tau5(beta);
  Triple<T> alpha;
  for (int m = 0; m < 3; ++m) alpha[m] = kIdealWeights[m] * (1.0 + square(tau / (beta[m] + epsilon)));
  return normalize(alpha);
}

template <class T>
Triple<T> weights_z(const Triple<T>& beta, const SchemeConfig& cfg) {
  return weights_z(beta, cfg.epsilon);
}

/// beta^DS_m = beta_m (delta_m + C).
template <class T>
Triple<T> ds_indicators(const Triple<T>& beta, const Triple<T>& delta, const SchemeConfig& cfg) {
  return {beta[0] * (delta[0] + cfg.C), beta[1] * (delta[1] + cfg.C), beta[2] * (delta[2] + cfg.C)};
}

/// Convex combination of the candidate fluxes. `delta` is required in DS mode
/// and ignored otherwise; DS applies the Z weights to the scaled indicators.
template <class T>
T interface_flux(std::span<const T, 5> w, const SchemeConfig& cfg, const Triple<T>* delta = nullptr) {
  Triple<T> fhat = candidate_fluxes(w);
  Triple<T> beta = smoothness_indicators(w);
  Triple<T> omega;
  switch (cfg.weighting) {
    case Weighting::JS: omega = weights_js(beta, cfg); break;
    case Weighting::Z: omega = weights_z(beta, cfg); break;
    case Weighting::DS:
      if (delta == nullptr) throw std::invalid_argument("interface_flux: DS weighting needs multipliers");
      omega = weights_z(ds_indicators(beta, *delta, cfg), cfg);
      break;
  }
  return omega[0] * fhat[0] + omega[1] * fhat[1] + omega[2] * fhat[2];
}

template <class T>
T interface_flux(const std::array<T, 5>& w, const SchemeConfig& cfg, const Triple<T>* delta = nullptr) {
  return interface_flux(std::span<const T, 5>(w), cfg, delta);
}

/// f^- at i+1/2 from the natural-order window (f_{i-1}, ..., f_{i+3}).
template <class T>
T reconstruct_negative(std::span<const T, 5> natural, const SchemeConfig& cfg, const Triple<T>* delta = nullptr) {
  std::array<T, 5> mirrored{natural[4], natural[3], natural[2], natural[1], natural[0]};
  return interface_flux(std::span<const T, 5>(mirrored), cfg, delta);
}

}  // namespace wenods
