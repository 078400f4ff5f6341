#pragma once

// 1-D Euler equations: primitive/conserved conversion, Roe-averaged
// eigensystem and the characteristic-wise WENO semi-discretization.
//
// A state on M points is stored flat as [rho_0..rho_{M-1}, m_0.., E_0..].

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wenods/autodiff.hpp"
#include "wenods/cnn.hpp"
#include "wenods/flux.hpp"
#include "wenods/mesh.hpp"
#include "wenods/weno.hpp"

namespace wenods {

inline constexpr double kGamma = 1.4;

/// Non-physical state (rho <= 0 or p <= 0) at a grid point.
class physical_state_error : public std::domain_error {
 public:
  physical_state_error(const std::string& what, int location) : std::domain_error(what), location_(location) {}
  int location() const { return location_; }

 private:
  int location_;
};

struct Primitive {
  double rho = 1.0;
  double u = 0.0;
  double p = 1.0;
};

template <class T>
using Vec3 = std::array<T, 3>;
template <class T>
using Mat3 = std::array<Vec3<T>, 3>;

template <class T>
Vec3<T> conserved_from_primitive(const T& rho, const T& u, const T& p) {
  return {rho, rho * u, p / (kGamma - 1.0) + 0.5 * rho * u * u};
}

inline Vec3<double> conserved_from_primitive(const Primitive& w) { return conserved_from_primitive(w.rho, w.u, w.p); }

template <class T>
T pressure(const Vec3<T>& q) {
  return (kGamma - 1.0) * (q[2] - 0.5 * q[1] * q[1] / q[0]);
}

/// (rho, u, p); throws physical_state_error when rho or p is not positive.
template <class T>
Vec3<T> primitive_from_conserved(const Vec3<T>& q, int location = -1) {
  if (!(value_of(q[0]) > 0.0)) throw physical_state_error("non-positive density", location);
  T u = q[1] / q[0];
  T p = pressure(q);
  if (!(value_of(p) > 0.0)) throw physical_state_error("non-positive pressure", location);
  return {q[0], u, p};
}

template <class T>
Vec3<T> euler_flux(const Vec3<T>& q) {
  T u = q[1] / q[0];
  T p = pressure(q);
  return {q[1], q[1] * u + p, u * (q[2] + p)};
}

/// Roe-averaged velocity, enthalpy and sound speed with the eigenvector
/// matrices R (columns r1 = (1, u-c, H-uc), r2 = (1, u, u^2/2),
/// r3 = (1, u+c, H+uc)) and L = R^{-1}.
template <class T>
struct RoeFrame {
  T u, H, c;
  Mat3<T> R, L;
  Vec3<T> eigenvalues;
};

template <class T>
RoeFrame<T> roe_frame(const Vec3<T>& left, const Vec3<T>& right) {
  T sl = sqrt(left[0]);
  T sr = sqrt(right[0]);
  T hl = (left[2] + pressure(left)) / left[0];
  T hr = (right[2] + pressure(right)) / right[0];
  T u = (sl * (left[1] / left[0]) + sr * (right[1] / right[0])) / (sl + sr);
  T H = (sl * hl + sr * hr) / (sl + sr);
  T c2 = (kGamma - 1.0) * (H - 0.5 * u * u);
  if (!(value_of(c2) > 0.0)) throw std::domain_error("roe_frame: non-positive sound speed squared");
  T c = sqrt(c2);

  RoeFrame<T> f{u, H, c, {}, {}, {u - c, u, u + c}};
  f.R = Mat3<T>{Vec3<T>{T(1.0), T(1.0), T(1.0)}, Vec3<T>{u - c, u, u + c},
                Vec3<T>{H - u * c, 0.5 * u * u, H + u * c}};
  T b1 = (kGamma - 1.0) / c2;
  T b2 = 0.5 * b1 * u * u;
  f.L = Mat3<T>{Vec3<T>{0.5 * (b2 + u / c), -0.5 * (b1 * u + 1.0 / c), 0.5 * b1},
                Vec3<T>{1.0 - b2, b1 * u, -b1},
                Vec3<T>{0.5 * (b2 - u / c), -0.5 * (b1 * u - 1.0 / c), 0.5 * b1}};
  return f;
}

inline RoeFrame<double> roe_frame(const Primitive& left, const Primitive& right) {
  return roe_frame(conserved_from_primitive(left), conserved_from_primitive(right));
}

template <class T>
Vec3<T> apply(const Mat3<T>& m, const Vec3<T>& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2], m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

template <class T>
Vec3<T> characteristic_project(const RoeFrame<T>& frame, const Vec3<T>& v) {
  return apply(frame.L, v);
}

template <class T>
Vec3<T> characteristic_unproject(const RoeFrame<T>& frame, const Vec3<T>& w) {
  return apply(frame.R, w);
}

// ---- flat state helpers ------------------------------------------------------

template <class T>
Vec3<T> state_at(std::span<const T> state, int m, int i) {
  return {state[i], state[m + i], state[2 * m + i]};
}

inline std::vector<double> euler_initial_state(const Grid1D& grid, const Primitive& left, const Primitive& right,
                                               double x_split = 0.5) {
  const int m = grid.n_intervals + 1;
  std::vector<double> s(3 * m);
  for (int i = 0; i < m; ++i) {
    Vec3<double> q = conserved_from_primitive(grid.x(i) <= x_split ? left : right);
    s[i] = q[0];
    s[m + i] = q[1];
    s[2 * m + i] = q[2];
  }
  return s;
}

/// Primitive columns (rho, u, p) of a flat state.
template <class T>
std::array<std::vector<T>, 3> primitive_columns(std::span<const T> state) {
  const int m = static_cast<int>(state.size() / 3);
  std::array<std::vector<T>, 3> cols{std::vector<T>(m), std::vector<T>(m), std::vector<T>(m)};
  for (int i = 0; i < m; ++i) {
    Vec3<T> w = primitive_from_conserved(state_at(state, m, i), i);
    cols[0][i] = w[0];
    cols[1][i] = w[1];
    cols[2][i] = w[2];
  }
  return cols;
}

/// max_i (c_i + |u_i|) with c = sqrt(gamma p / rho).
inline double euler_max_signal(std::span<const double> state) {
  const int m = static_cast<int>(state.size() / 3);
  double best = 0.0;
  for (int i = 0; i < m; ++i) {
    Vec3<double> w = primitive_from_conserved(state_at(state, m, i), i);
    best = std::max(best, std::sqrt(kGamma * w[2] / w[0]) + std::abs(w[1]));
  }
  return best;
}

inline void check_physical(std::span<const double> state) {
  const int m = static_cast<int>(state.size() / 3);
  for (int i = 0; i < m; ++i) primitive_from_conserved(state_at(state, m, i), i);
}

/// Characteristic-wise WENO L(U) on M = N+1 points with zero-gradient ghosts.
///
/// Every interface i+1/2 builds its Roe frame from U_i, U_{i+1}; all stencil
/// states and fluxes are projected with that frame, split per field with a
/// global Lax-Friedrichs speed, reconstructed as scalars and mapped back. In
/// DS mode the multipliers for nodes i-1..i+2 come from the split
/// characteristic flux of the same frame.
template <class T>
std::vector<T> euler_rhs(std::span<const T> state, const Grid1D& grid, const SchemeConfig& cfg,
                         const MultiplierSource<T>* multipliers = nullptr, AlphaLog* alpha_log = nullptr) {
  const int m = static_cast<int>(state.size() / 3);
  const bool ds = cfg.weighting == Weighting::DS;
  if (ds && multipliers == nullptr) throw std::invalid_argument("euler_rhs: DS weighting needs multipliers");
  const int context = ds ? multipliers->ghost : 0;
  const int ghost = std::max(kGhostWidth, context + 2);

  std::array<std::vector<T>, 3> ext;
  for (int k = 0; k < 3; ++k)
    ext[k] = extend_with_ghosts(state.subspan(k * m, m), Boundary::ZeroGradient, ghost);
  const int len = m + 2 * ghost;
  std::vector<Vec3<T>> q(len), f(len);
  for (int j = 0; j < len; ++j) {
    q[j] = {ext[0][j], ext[1][j], ext[2][j]};
    primitive_from_conserved(q[j], j - ghost);
    f[j] = euler_flux(q[j]);
  }

  // Interfaces j = 0..m sit at i+1/2 with i = j - 1.
  std::vector<RoeFrame<T>> frames;
  frames.reserve(m + 1);
  for (int j = 0; j <= m; ++j) frames.push_back(roe_frame(q[j - 1 + ghost], q[j + ghost]));

  Vec3<double> alpha{0.0, 0.0, 0.0};
  for (int j = 0; j < len; ++j) {
    double rho = value_of(q[j][0]);
    double u = value_of(q[j][1]) / rho;
    double c = std::sqrt(kGamma * value_of(pressure(q[j])) / rho);
    alpha[0] = std::max(alpha[0], std::abs(u - c));
    alpha[1] = std::max(alpha[1], std::abs(u));
    alpha[2] = std::max(alpha[2], std::abs(u + c));
  }
  for (const auto& fr : frames)
    for (int k = 0; k < 3; ++k) alpha[k] = std::max(alpha[k], std::abs(value_of(fr.eigenvalues[k])));
  if (alpha_log != nullptr)
    for (int k = 0; k < 3; ++k) alpha[k] = alpha_log->next(alpha[k]);

  // Fluxes at interface j as seen from its left node (n) and right node (p).
  std::vector<Vec3<T>> flux_n(m + 1), flux_p(m + 1);
  const int half = ds ? context + 2 : 3;  // window nodes i-half+1 .. i+half
  const int wlen = 2 * half;
  std::vector<std::array<std::vector<T>, 2>> split(3, {std::vector<T>(wlen), std::vector<T>(wlen)});
  for (int j = 0; j <= m; ++j) {
    const RoeFrame<T>& fr = frames[j];
    const int i = j - 1 + ghost;  // extended index of the left node
    for (int s = 0; s < wlen; ++s) {
      int node = i - half + 1 + s;
      Vec3<T> w = characteristic_project(fr, q[node]);
      Vec3<T> g = characteristic_project(fr, f[node]);
      for (int k = 0; k < 3; ++k) {
        split[k][0][s] = 0.5 * (g[k] + alpha[k] * w[k]);
        split[k][1][s] = 0.5 * (g[k] - alpha[k] * w[k]);
      }
    }
    // Left node i sits at window index half - 1.
    const int c = half - 1;
    Vec3<T> hat_n, hat_p;
    for (int k = 0; k < 3; ++k) {
      const auto& plus = split[k][0];
      const auto& minus = split[k][1];
      std::span<const T, 5> wp(plus.data() + c - 2, 5);
      std::span<const T, 5> wm(minus.data() + c - 1, 5);
      if (!ds) {
        hat_n[k] = interface_flux(wp, cfg) + reconstruct_negative(wm, cfg);
        hat_p[k] = hat_n[k];
        continue;
      }
      // Multipliers for window nodes c-1 .. c+2 (two interior nodes c, c+1).
      std::span<const T> ctx_p = std::span<const T>(plus).subspan(c - context, 2 + 2 * context);
      std::span<const T> ctx_m = std::span<const T>(minus).subspan(c - context, 2 + 2 * context);
      std::vector<T> dp = multipliers->eval(ctx_p, 2, Branch::Positive);
      std::vector<T> dm = multipliers->eval(ctx_m, 2, Branch::Negative);
      Triple<T> left_p{dp[0], dp[1], dp[2]}, left_m{dm[2], dm[1], dm[0]};
      Triple<T> right_p{dp[1], dp[2], dp[3]}, right_m{dm[3], dm[2], dm[1]};
      hat_n[k] = interface_flux(wp, cfg, &left_p) + reconstruct_negative(wm, cfg, &left_m);
      hat_p[k] = interface_flux(wp, cfg, &right_p) + reconstruct_negative(wm, cfg, &right_m);
    }
    flux_n[j] = characteristic_unproject(fr, hat_n);
    flux_p[j] = ds ? characteristic_unproject(fr, hat_p) : flux_n[j];
  }

  std::vector<T> rhs(3 * m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < 3; ++k) rhs[k * m + i] = -(flux_n[i + 1][k] - flux_p[i][k]) / grid.dx;
  return rhs;
}

/// The named shock tubes on [0, 1] with the split at x = 0.5.
struct RiemannProblem {
  std::string name;
  Primitive left;
  Primitive right;
  double t_final = 0.1;
};

inline RiemannProblem sod_problem() { return {"sod", {1.0, 0.0, 1.0}, {0.125, 0.0, 0.1}, 0.1}; }
inline RiemannProblem sod_modified_problem() { return {"sod-modified", {1.0, 0.75, 1.0}, {0.125, 0.0, 0.1}, 0.1}; }
inline RiemannProblem lax_problem() { return {"lax", {0.445, 0.698, 3.528}, {0.5, 0.0, 0.571}, 0.1}; }

}  // namespace wenods
