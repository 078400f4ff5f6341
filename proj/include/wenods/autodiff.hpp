#pragma once

// Reverse-mode automatic differentiation on a flat tape.
//
// A Var is either a constant (no tape) or a handle to a node on a Tape. Every
// arithmetic operation on tape variables appends one node holding the forward
// value and the local partial derivatives; backward() sweeps the nodes once in
// reverse order. Dot products (convolution taps) are recorded as a single
// node whose partials are read back from operand values, which keeps the tape
// for one network evaluation proportional to its multiply-add count.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wenods::ad {

class Tape;

/// Thrown when a value recorded on the tape, or an adjoint, is not finite.
class nonfinite_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class Var {
 public:
  Var() = default;
  Var(double value) : value_(value) {}  // NOLINT: implicit constants are the point

  double value() const { return value_; }
  bool is_constant() const { return tape_ == nullptr; }
  Tape* tape() const { return tape_; }
  std::uint32_t index() const { return index_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index, double value) : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
  double value_ = 0.0;
};

enum class Op { Add, Sub, Mul, Div, Neg, Square, Abs, Exp, Sqrt, Elu, Sigmoid, Min, Max };

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// New independent variable (a leaf, e.g. a network parameter).
  Var variable(double value) {
    check_finite(value, "variable");
    return Var(this, push_leaf(value), value);
  }

  /// Records a primitive. Constants participate without being stored.
  Var record(Op op, const Var& a, const Var& b = Var()) {
    Tape* owner = pick_owner(a, b);
    double va = a.value();
    double vb = b.value();
    double value = 0.0;
    double da = 0.0;
    double db = 0.0;
    switch (op) {
      case Op::Add: value = va + vb; da = 1.0; db = 1.0; break;
      case Op::Sub: value = va - vb; da = 1.0; db = -1.0; break;
      case Op::Mul: value = va * vb; da = vb; db = va; break;
      case Op::Div: value = va / vb; da = 1.0 / vb; db = -value / vb; break;
      case Op::Neg: value = -va; da = -1.0; break;
      case Op::Square: value = va * va; da = 2.0 * va; break;
      case Op::Abs:
        value = std::abs(va);
        da = va > 0.0 ? 1.0 : (va < 0.0 ? -1.0 : 0.0);
        break;
      case Op::Exp: value = std::exp(va); da = value; break;
      case Op::Sqrt: value = std::sqrt(va); da = 0.5 / value; break;
      case Op::Elu:
        value = va > 0.0 ? va : std::exp(va) - 1.0;
        da = va > 0.0 ? 1.0 : value + 1.0;
        break;
      case Op::Sigmoid:
        if (va >= 0.0) {
          value = 1.0 / (1.0 + std::exp(-va));
        } else {
          double e = std::exp(va);
          value = e / (1.0 + e);
        }
        da = value * (1.0 - value);
        break;
      // Ties hand the subgradient to the first argument.
      case Op::Min: value = va <= vb ? va : vb; da = va <= vb ? 1.0 : 0.0; db = 1.0 - da; break;
      case Op::Max: value = va >= vb ? va : vb; da = va >= vb ? 1.0 : 0.0; db = 1.0 - da; break;
    }
    if (owner == nullptr) return Var(value);
    check_finite(value, "record");
    std::uint32_t begin = static_cast<std::uint32_t>(args_.size());
    std::uint32_t count = 0;
    if (!a.is_constant()) {
      args_.push_back(a.index());
      partials_.push_back(da);
      ++count;
    }
    if (!b.is_constant() && is_binary(op)) {
      args_.push_back(b.index());
      partials_.push_back(db);
      ++count;
    }
    return push_node(value, begin, count, Kind::Explicit);
  }

  /// bias + sum_k a[k] * b[k] as a single node.
  Var dot(std::span<const Var> a, std::span<const Var> b, const Var& bias) {
    if (a.size() != b.size()) throw std::invalid_argument("ad::dot: operand length mismatch");
    Tape* owner = bias.tape();
    double value = bias.value();
    for (std::size_t k = 0; k < a.size(); ++k) {
      value += a[k].value() * b[k].value();
      owner = merge_owner(owner, a[k].tape());
      owner = merge_owner(owner, b[k].tape());
    }
    if (owner == nullptr) return Var(value);
    if (owner != this) throw std::invalid_argument("ad::dot: operands recorded on another tape");
    check_finite(value, "dot");
    std::uint32_t begin = static_cast<std::uint32_t>(args_.size());
    args_.reserve(args_.size() + 2 * a.size() + 1);
    for (const Var& v : a) args_.push_back(index_or_leaf(v));
    for (const Var& v : b) args_.push_back(index_or_leaf(v));
    args_.push_back(index_or_leaf(bias));
    return push_node(value, begin, static_cast<std::uint32_t>(2 * a.size() + 1), Kind::Dot);
  }

  /// Adjoints of every node with respect to `loss`.
  std::vector<double> backward(const Var& loss) const {
    std::vector<double> adjoint(nodes_.size(), 0.0);
    if (loss.is_constant()) return adjoint;
    if (loss.tape() != this) throw std::invalid_argument("ad::backward: loss belongs to another tape");
    adjoint[loss.index()] = 1.0;
    for (std::size_t n = nodes_.size(); n-- > 0;) {
      double bar = adjoint[n];
      if (bar == 0.0) continue;
      if (!std::isfinite(bar)) throw nonfinite_error("ad::backward: non-finite adjoint at node " + std::to_string(n));
      const Node& node = nodes_[n];
      const std::uint32_t* arg = args_.data() + node.arg_begin;
      if (node.kind == Kind::Explicit) {
        const double* partial = partials_.data() + node.partial_begin;
        for (std::uint32_t k = 0; k < node.arg_count; ++k) adjoint[arg[k]] += bar * partial[k];
      } else if (node.kind == Kind::Dot) {
        std::uint32_t len = (node.arg_count - 1) / 2;
        const std::uint32_t* lhs = arg;
        const std::uint32_t* rhs = arg + len;
        for (std::uint32_t k = 0; k < len; ++k) {
          adjoint[lhs[k]] += bar * values_[rhs[k]];
          adjoint[rhs[k]] += bar * values_[lhs[k]];
        }
        adjoint[arg[2 * len]] += bar;
      }
    }
    return adjoint;
  }

  /// d loss / d p for each designated parameter, in order.
  std::vector<double> gradient(const Var& loss, std::span<const Var> params) const {
    std::vector<double> adjoint = backward(loss);
    std::vector<double> grad(params.size(), 0.0);
    for (std::size_t k = 0; k < params.size(); ++k) {
      if (params[k].is_constant()) continue;
      if (params[k].tape() != this) throw std::invalid_argument("ad::gradient: parameter belongs to another tape");
      grad[k] = adjoint[params[k].index()];
    }
    return grad;
  }

  std::size_t size() const { return nodes_.size(); }
  std::size_t memory_terms() const { return args_.size(); }

  /// Drops the recorded graph; outstanding Vars on this tape become invalid.
  void clear() {
    nodes_.clear();
    values_.clear();
    args_.clear();
    partials_.clear();
  }

 private:
  enum class Kind : std::uint8_t { Leaf, Explicit, Dot };
  struct Node {
    std::uint32_t arg_begin;
    std::uint32_t arg_count;
    std::uint32_t partial_begin;
    Kind kind;
  };

  static bool is_binary(Op op) {
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Min || op == Op::Max;
  }

  static void check_finite(double v, const char* where) {
    if (!std::isfinite(v)) throw nonfinite_error(std::string("ad::") + where + ": non-finite value");
  }

  static Tape* merge_owner(Tape* current, Tape* other) {
    if (other == nullptr) return current;
    if (current != nullptr && current != other) throw std::invalid_argument("ad: operands recorded on different tapes");
    return other;
  }

  Tape* pick_owner(const Var& a, const Var& b) {
    Tape* owner = merge_owner(a.tape(), b.tape());
    if (owner != nullptr && owner != this) throw std::invalid_argument("ad::record: operands recorded on another tape");
    return owner;
  }

  std::uint32_t push_leaf(double value) {
    nodes_.push_back(Node{0, 0, 0, Kind::Leaf});
    values_.push_back(value);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  std::uint32_t index_or_leaf(const Var& v) { return v.is_constant() ? push_leaf(v.value()) : v.index(); }

  Var push_node(double value, std::uint32_t arg_begin, std::uint32_t count, Kind kind) {
    std::uint32_t partial_begin = kind == Kind::Explicit ? static_cast<std::uint32_t>(partials_.size() - count) : 0;
    nodes_.push_back(Node{arg_begin, count, partial_begin, kind});
    values_.push_back(value);
    return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1), value);
  }

  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<std::uint32_t> args_;
  std::vector<double> partials_;
};

namespace detail {
inline Var binary(Op op, const Var& a, const Var& b) {
  Tape* t = a.tape() != nullptr ? a.tape() : b.tape();
  if (t == nullptr) {
    Tape scratch;
    return scratch.record(op, a, b);
  }
  return t->record(op, a, b);
}
inline Var unary(Op op, const Var& a) { return binary(op, a, Var()); }
}  // namespace detail

inline Var operator+(const Var& a, const Var& b) { return detail::binary(Op::Add, a, b); }
inline Var operator-(const Var& a, const Var& b) { return detail::binary(Op::Sub, a, b); }
inline Var operator*(const Var& a, const Var& b) { return detail::binary(Op::Mul, a, b); }
inline Var operator/(const Var& a, const Var& b) { return detail::binary(Op::Div, a, b); }
inline Var operator-(const Var& a) { return detail::unary(Op::Neg, a); }
inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

inline bool operator<(const Var& a, const Var& b) { return a.value() < b.value(); }
inline bool operator>(const Var& a, const Var& b) { return a.value() > b.value(); }
inline bool operator<=(const Var& a, const Var& b) { return a.value() <= b.value(); }
inline bool operator>=(const Var& a, const Var& b) { return a.value() >= b.value(); }

inline Var square(const Var& a) { return detail::unary(Op::Square, a); }
inline Var abs(const Var& a) { return detail::unary(Op::Abs, a); }
inline Var exp(const Var& a) { return detail::unary(Op::Exp, a); }
inline Var sqrt(const Var& a) { return detail::unary(Op::Sqrt, a); }
inline Var elu(const Var& a) { return detail::unary(Op::Elu, a); }
inline Var sigmoid(const Var& a) { return detail::unary(Op::Sigmoid, a); }
inline Var min(const Var& a, const Var& b) { return detail::binary(Op::Min, a, b); }
inline Var max(const Var& a, const Var& b) { return detail::binary(Op::Max, a, b); }

inline Var dot(std::span<const Var> a, std::span<const Var> b, const Var& bias) {
  Tape* t = bias.tape();
  for (std::size_t k = 0; t == nullptr && k < a.size(); ++k) t = a[k].tape() ? a[k].tape() : b[k].tape();
  if (t == nullptr) {
    Tape scratch;
    return scratch.dot(a, b, bias);
  }
  return t->dot(a, b, bias);
}

/// Worst relative disagreement between `grad` and central differences of f:
/// max_k |(f(p+h e_k) - f(p-h e_k))/2h - grad_k| / (|grad_k| + 1e-12).
inline double grad_check(const std::function<double(std::span<const double>)>& f, std::span<const double> params,
                         std::span<const double> grad, double h) {
  if (grad.size() != params.size()) throw std::invalid_argument("grad_check: gradient length mismatch");
  std::vector<double> p(params.begin(), params.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    double saved = p[k];
    p[k] = saved + h;
    double up = f(p);
    p[k] = saved - h;
    double down = f(p);
    p[k] = saved;
    double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - grad[k]) / (std::abs(grad[k]) + 1e-12));
  }
  return worst;
}

}  // namespace wenods::ad

namespace wenods {

// Scalar-generic helpers: each template in the library calls these so the
// same code instantiates for double and for ad::Var.

inline double value_of(double x) { return x; }
inline double value_of(const ad::Var& x) { return x.value(); }

inline double square(double x) { return x * x; }
inline double elu(double x) { return x > 0.0 ? x : std::exp(x) - 1.0; }
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}
inline double dot(std::span<const double> a, std::span<const double> b, double bias) {
  double acc = bias;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}
using ad::dot;
using ad::elu;
using ad::sigmoid;
using ad::square;
using std::abs;
using std::exp;
using std::sqrt;
using ad::abs;
using ad::exp;
using ad::sqrt;

template <class T>
std::vector<double> values_of(std::span<const T> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) out[k] = value_of(xs[k]);
  return out;
}

}  // namespace wenods
