#pragma once

// Exact solution of the Euler Riemann problem for an ideal gas: Newton
// iteration on the pressure function for the star state, then similarity
// sampling of the wave fan.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wenods/euler.hpp"
#include "wenods/mesh.hpp"

namespace wenods {

enum class WaveKind { Shock, Rarefaction };

struct StarState {
  double p = 0.0;
  double u = 0.0;
  WaveKind left_wave = WaveKind::Rarefaction;
  WaveKind right_wave = WaveKind::Rarefaction;
  double rho_left = 0.0;   // density left of the contact
  double rho_right = 0.0;  // density right of the contact
  int iterations = 0;
  bool used_bisection = false;
};

namespace riemann_detail {

inline double sound_speed(const Primitive& w, double gamma) { return std::sqrt(gamma * w.p / w.rho); }

/// Velocity jump across one wave and its derivative in p.
inline void wave_function(double p, const Primitive& w, double gamma, double& f, double& df) {
  double c = sound_speed(w, gamma);
  if (p > w.p) {
    double a = 2.0 / ((gamma + 1.0) * w.rho);
    double b = (gamma - 1.0) / (gamma + 1.0) * w.p;
    double root = std::sqrt(a / (p + b));
    f = (p - w.p) * root;
    df = root * (1.0 - 0.5 * (p - w.p) / (b + p));
  } else {
    double ratio = p / w.p;
    f = 2.0 * c / (gamma - 1.0) * (std::pow(ratio, (gamma - 1.0) / (2.0 * gamma)) - 1.0);
    df = 1.0 / (w.rho * c) * std::pow(ratio, -(gamma + 1.0) / (2.0 * gamma));
  }
}

}  // namespace riemann_detail

/// f(p) = f_L(p) + f_R(p) + (u_R - u_L); its root is the star pressure.
inline double pressure_function(double p, const Primitive& left, const Primitive& right, double gamma = kGamma) {
  double fl, dfl, fr, dfr;
  riemann_detail::wave_function(p, left, gamma, fl, dfl);
  riemann_detail::wave_function(p, right, gamma, fr, dfr);
  return fl + fr + (right.u - left.u);
}

inline StarState exact_riemann(const Primitive& left, const Primitive& right, double gamma = kGamma) {
  using namespace riemann_detail;
  if (!(left.rho > 0.0 && right.rho > 0.0 && left.p > 0.0 && right.p > 0.0))
    throw std::invalid_argument("exact_riemann: densities and pressures must be positive");
  const double cl = sound_speed(left, gamma);
  const double cr = sound_speed(right, gamma);
  const double du = right.u - left.u;
  if (2.0 / (gamma - 1.0) * (cl + cr) <= du) throw std::domain_error("exact_riemann: initial data generate vacuum");

  auto residual = [&](double p, double& df) {
    double fl, dfl, fr, dfr;
    wave_function(p, left, gamma, fl, dfl);
    wave_function(p, right, gamma, fr, dfr);
    df = dfl + dfr;
    return fl + fr + du;
  };

  // Two-rarefaction estimate as the starting point.
  const double z = (gamma - 1.0) / (2.0 * gamma);
  double p = std::pow((cl + cr - 0.5 * (gamma - 1.0) * du) / (cl / std::pow(left.p, z) + cr / std::pow(right.p, z)),
                      1.0 / z);
  StarState star;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    double df;
    double f = residual(p, df);
    star.iterations = it + 1;
    if (std::abs(f) < 1e-14) {
      converged = true;
      break;
    }
    double next = p - f / df;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    if (std::abs(next - p) <= 1e-16 * p) {
      p = next;
      converged = std::abs(residual(p, df)) < 1e-12;
      break;
    }
    p = next;
  }
  if (!converged) {
    // f is increasing in p: bracket and bisect.
    double lo = 1e-8;
    double hi = 10.0 * std::max(left.p, right.p);
    double df;
    if (residual(lo, df) > 0.0) throw std::domain_error("exact_riemann: no positive star pressure");
    for (int k = 0; residual(hi, df) < 0.0; ++k) {
      if (k > 60) throw std::runtime_error("exact_riemann: cannot bracket the star pressure");
      hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      (residual(mid, df) < 0.0 ? lo : hi) = mid;
    }
    p = 0.5 * (lo + hi);
    star.used_bisection = true;
    double f = residual(p, df);
    if (!(std::abs(f) < 1e-12)) throw std::runtime_error("exact_riemann: star pressure did not converge");
  }

  double fl, dfl, fr, dfr;
  wave_function(p, left, gamma, fl, dfl);
  wave_function(p, right, gamma, fr, dfr);
  star.p = p;
  star.u = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
  const double g6 = (gamma - 1.0) / (gamma + 1.0);
  star.left_wave = p > left.p ? WaveKind::Shock : WaveKind::Rarefaction;
  star.right_wave = p > right.p ? WaveKind::Shock : WaveKind::Rarefaction;
  star.rho_left = star.left_wave == WaveKind::Shock
                      ? left.rho * (p / left.p + g6) / (g6 * p / left.p + 1.0)
                      : left.rho * std::pow(p / left.p, 1.0 / gamma);
  star.rho_right = star.right_wave == WaveKind::Shock
                       ? right.rho * (p / right.p + g6) / (g6 * p / right.p + 1.0)
                       : right.rho * std::pow(p / right.p, 1.0 / gamma);
  return star;
}

/// Shock speed on the given side (left: -1, right: +1).
inline double shock_speed(const StarState& star, const Primitive& w, int side, double gamma = kGamma) {
  double c = std::sqrt(gamma * w.p / w.rho);
  double q = std::sqrt((gamma + 1.0) / (2.0 * gamma) * star.p / w.p + (gamma - 1.0) / (2.0 * gamma));
  return w.u + side * c * q;
}

/// Solution at similarity coordinate s = x / t.
inline Primitive sample_riemann(const StarState& star, const Primitive& left, const Primitive& right, double s,
                                double gamma = kGamma) {
  const double g1 = (gamma - 1.0) / (2.0 * gamma);
  if (s <= star.u) {
    const double cl = std::sqrt(gamma * left.p / left.rho);
    if (star.left_wave == WaveKind::Shock) {
      return s <= shock_speed(star, left, -1, gamma) ? left : Primitive{star.rho_left, star.u, star.p};
    }
    const double head = left.u - cl;
    if (s <= head) return left;
    const double tail = star.u - cl * std::pow(star.p / left.p, g1);
    if (s > tail) return Primitive{star.rho_left, star.u, star.p};
    double u = 2.0 / (gamma + 1.0) * (cl + 0.5 * (gamma - 1.0) * left.u + s);
    double c = 2.0 / (gamma + 1.0) * (cl + 0.5 * (gamma - 1.0) * (left.u - s));
    double rho = left.rho * std::pow(c / cl, 2.0 / (gamma - 1.0));
    double p = left.p * std::pow(c / cl, 2.0 * gamma / (gamma - 1.0));
    return {rho, u, p};
  }
  const double cr = std::sqrt(gamma * right.p / right.rho);
  if (star.right_wave == WaveKind::Shock) {
    return s >= shock_speed(star, right, +1, gamma) ? right : Primitive{star.rho_right, star.u, star.p};
  }
  const double head = right.u + cr;
  if (s >= head) return right;
  const double tail = star.u + cr * std::pow(star.p / right.p, g1);
  if (s < tail) return Primitive{star.rho_right, star.u, star.p};
  double u = 2.0 / (gamma + 1.0) * (-cr + 0.5 * (gamma - 1.0) * right.u + s);
  double c = 2.0 / (gamma + 1.0) * (cr - 0.5 * (gamma - 1.0) * (right.u - s));
  double rho = right.rho * std::pow(c / cr, 2.0 / (gamma - 1.0));
  double p = right.p * std::pow(c / cr, 2.0 * gamma / (gamma - 1.0));
  return {rho, u, p};
}

/// Exact (rho, u, p) columns at the points of a [0, 1] shock-tube grid at time t.
inline std::array<std::vector<double>, 3> exact_riemann_profile(const Primitive& left, const Primitive& right,
                                                                const Grid1D& grid, double t,
                                                                double x_split = 0.5) {
  if (!(t > 0.0)) throw std::invalid_argument("exact_riemann_profile: t must be positive");
  StarState star = exact_riemann(left, right);
  const int m = grid.n_intervals + 1;
  std::array<std::vector<double>, 3> cols{std::vector<double>(m), std::vector<double>(m), std::vector<double>(m)};
  for (int i = 0; i < m; ++i) {
    Primitive w = sample_riemann(star, left, right, (grid.x(i) - x_split) / t);
    cols[0][i] = w.rho;
    cols[1][i] = w.u;
    cols[2][i] = w.p;
  }
  return cols;
}

}  // namespace wenods
