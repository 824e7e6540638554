// Copyright 2026 The handsoff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scalar reverse-mode automatic differentiation over an append-only tape.
//
// A Tape records every elementary operation of one forward evaluation. Each
// node stores its value, up to two parent indices and the partial derivative
// of the node with respect to each parent. backward() sweeps the tape in
// reverse order and accumulates adjoints into the registered leaves.
//
// Var is a lightweight handle (tape pointer + index). Arithmetic on Var
// records new nodes, so generic code templated on the scalar type can run
// either on plain doubles or on a tape without modification.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace handsoff {

class Tape;

/// Handle to a node on a tape.
class Var {
 public:
  Var() = default;

  double value() const;
  std::uint32_t id() const { return id_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

enum class OpKind : std::uint8_t {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kSin,
  kCos,
  kSquare,
  kSmoothAbsPow,
};

/// Operation descriptor for Tape::apply. Only kSmoothAbsPow reads p and eps.
struct Op {
  OpKind kind;
  double p = 1.0;
  double eps = 0.0;

  static Op smooth_abs_pow(double p, double eps) { return {OpKind::kSmoothAbsPow, p, eps}; }
};

struct Node {
  double value = 0.0;
  std::array<std::uint32_t, 2> parents{};
  std::array<double, 2> local_grads{};
  std::uint8_t arity = 0;
};

/// Value of (x^2 + eps^2)^(p/2). Requires p in (0, 1] and eps >= 0.
double smooth_abs_pow(double x, double p, double eps);

/// d/dx of smooth_abs_pow. At x == 0 the result is 0 (the l1 subgradient
/// when eps == 0 and p == 1). Throws for x == 0, eps == 0, p < 1.
double smooth_abs_pow_grad(double x, double p, double eps);

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Parentless node registered as a differentiable parameter.
  Var leaf(double value);
  /// Parentless node that is not a leaf; backward() ignores it.
  Var constant(double value);

  Var apply(const Op& op, std::initializer_list<Var> args);

  /// d(output)/d(leaf) for every leaf, in registration order.
  std::vector<double> backward(Var output) const;

  /// Drops all nodes and leaves but keeps the allocated capacity.
  void clear();

  std::size_t size() const { return nodes_.size(); }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const std::uint32_t> leaf_ids() const { return leaf_ids_; }
  double value(Var v) const;

 private:
  friend Var operator+(Var, Var);
  friend Var operator-(Var, Var);
  friend Var operator*(Var, Var);
  friend Var operator/(Var, Var);
  friend Var operator+(Var, double);
  friend Var operator-(Var, double);
  friend Var operator*(Var, double);
  friend Var operator/(Var, double);
  friend Var operator-(double, Var);
  friend Var operator-(Var);
  friend Var sin(Var);
  friend Var cos(Var);
  friend Var square(Var);
  friend Var smooth_abs_pow(Var, double, double);

  Var push(double value);
  Var push(double value, Var a, double da);
  Var push(double value, Var a, double da, Var b, double db);
  void check_owned(Var v) const;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> leaf_ids_;
};

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);

Var operator+(Var a, double b);
Var operator-(Var a, double b);
Var operator*(Var a, double b);
Var operator/(Var a, double b);
inline Var operator+(double a, Var b) { return b + a; }
Var operator-(double a, Var b);
inline Var operator*(double a, Var b) { return b * a; }
Var operator-(Var a);

Var sin(Var x);
Var cos(Var x);
Var square(Var x);
Var smooth_abs_pow(Var x, double p, double eps);

inline double square(double x) { return x * x; }

/// Builds a constant on the same tape as `like`; the double overload is the
/// plain-number counterpart used by generic code.
inline Var constant_like(Var like, double value) { return like.tape()->constant(value); }
inline double constant_like(double, double value) { return value; }

inline double value_of(double x) { return x; }
inline double value_of(Var x) { return x.value(); }

/// Result of comparing reverse-mode gradients against central differences.
struct FiniteDiffReport {
  double max_error = 0.0;        // max over coordinates of the per-coordinate error
  std::size_t worst_index = 0;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

/// A scalar function recorded on a tape from its leaf variables.
using TapedFunction = std::function<Var(Tape&, std::span<const Var>)>;

/// Compares backward() with (f(x + h e_i) - f(x - h e_i)) / 2h. The error for
/// coordinate i is relative, |g - d| / max(|g|, |d|), unless the reverse-mode
/// gradient magnitude is below `small_grad`, in which case it is |g - d|.
FiniteDiffReport finite_diff_check(const TapedFunction& f, std::span<const double> point,
                                   double step, double small_grad = 1e-12);

}  // namespace handsoff
