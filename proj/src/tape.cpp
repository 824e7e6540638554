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

#include "handsoff/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "handsoff/errors.hpp"

namespace handsoff {
namespace {

void check_smooth_abs_pow_args(double p, double eps) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("smooth_abs_pow: p must lie in (0, 1], got " + std::to_string(p));
  }
  if (!(eps >= 0.0)) {
    throw DomainError("smooth_abs_pow: eps must be >= 0, got " + std::to_string(eps));
  }
}

Tape& same_tape(Var a, Var b) {
  if (a.tape() == nullptr || a.tape() != b.tape()) {
    throw std::invalid_argument("Tape: operands belong to different tapes");
  }
  return *a.tape();
}

}  // namespace

double smooth_abs_pow(double x, double p, double eps) {
  check_smooth_abs_pow_args(p, eps);
  if (eps == 0.0) {
    if (p == 1.0) return std::abs(x);
    if (x == 0.0) return 0.0;
  }
  const double r = x * x + eps * eps;
  if (p == 1.0) return std::sqrt(r);
  return std::pow(r, 0.5 * p);
}

double smooth_abs_pow_grad(double x, double p, double eps) {
  check_smooth_abs_pow_args(p, eps);
  if (x == 0.0) {
    if (eps == 0.0 && p < 1.0) {
      throw DomainError("smooth_abs_pow: gradient unbounded at x = 0 with eps = 0 and p < 1");
    }
    return 0.0;
  }
  if (eps == 0.0 && p == 1.0) return x > 0.0 ? 1.0 : -1.0;
  const double r = x * x + eps * eps;
  if (p == 1.0) return x / std::sqrt(r);
  return p * x * std::pow(r, 0.5 * p - 1.0);
}

double Var::value() const { return tape_->value(*this); }

Var Tape::leaf(double value) {
  Var v = push(value);
  leaf_ids_.push_back(v.id_);
  return v;
}

Var Tape::constant(double value) { return push(value); }

Var Tape::push(double value) {
  Node n;
  n.value = value;
  nodes_.push_back(n);
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::push(double value, Var a, double da) {
  Node n;
  n.value = value;
  n.arity = 1;
  n.parents[0] = a.id_;
  n.local_grads[0] = da;
  nodes_.push_back(n);
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::push(double value, Var a, double da, Var b, double db) {
  Node n;
  n.value = value;
  n.arity = 2;
  n.parents = {a.id_, b.id_};
  n.local_grads = {da, db};
  nodes_.push_back(n);
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

void Tape::check_owned(Var v) const {
  if (v.tape_ != this || v.id_ >= nodes_.size()) {
    throw std::invalid_argument("Tape: variable does not belong to this tape");
  }
}

double Tape::value(Var v) const {
  check_owned(v);
  return nodes_[v.id_].value;
}

void Tape::clear() {
  nodes_.clear();
  leaf_ids_.clear();
}

Var Tape::apply(const Op& op, std::initializer_list<Var> args) {
  const std::size_t arity = args.size();
  const bool binary = op.kind == OpKind::kAdd || op.kind == OpKind::kSub ||
                      op.kind == OpKind::kMul || op.kind == OpKind::kDiv;
  if (arity != (binary ? 2u : 1u)) {
    throw std::invalid_argument("Tape::apply: wrong number of arguments");
  }
  for (Var a : args) check_owned(a);
  const Var a = *args.begin();
  const Var b = binary ? *(args.begin() + 1) : Var{};
  switch (op.kind) {
    case OpKind::kAdd: return a + b;
    case OpKind::kSub: return a - b;
    case OpKind::kMul: return a * b;
    case OpKind::kDiv: return a / b;
    case OpKind::kSin: return sin(a);
    case OpKind::kCos: return cos(a);
    case OpKind::kSquare: return square(a);
    case OpKind::kSmoothAbsPow: return smooth_abs_pow(a, op.p, op.eps);
  }
  throw std::invalid_argument("Tape::apply: unknown op");
}

std::vector<double> Tape::backward(Var output) const {
  check_owned(output);
  std::vector<double> adjoint(output.id_ + 1, 0.0);
  adjoint[output.id_] = 1.0;
  for (std::size_t i = output.id_ + 1; i-- > 0;) {
    const double a = adjoint[i];
    if (a == 0.0) continue;
    const Node& n = nodes_[i];
    for (std::uint8_t k = 0; k < n.arity; ++k) {
      adjoint[n.parents[k]] += a * n.local_grads[k];
    }
  }
  std::vector<double> grad(leaf_ids_.size(), 0.0);
  for (std::size_t k = 0; k < leaf_ids_.size(); ++k) {
    if (leaf_ids_[k] <= output.id_) grad[k] = adjoint[leaf_ids_[k]];
  }
  return grad;
}

Var operator+(Var a, Var b) {
  Tape& t = same_tape(a, b);
  return t.push(a.value() + b.value(), a, 1.0, b, 1.0);
}

Var operator-(Var a, Var b) {
  Tape& t = same_tape(a, b);
  return t.push(a.value() - b.value(), a, 1.0, b, -1.0);
}

Var operator*(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const double av = a.value();
  const double bv = b.value();
  return t.push(av * bv, a, bv, b, av);
}

Var operator/(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const double av = a.value();
  const double bv = b.value();
  if (bv == 0.0) throw DomainError("Tape: division by zero");
  return t.push(av / bv, a, 1.0 / bv, b, -av / (bv * bv));
}

Var operator+(Var a, double b) { return a.tape()->push(a.value() + b, a, 1.0); }
Var operator-(Var a, double b) { return a.tape()->push(a.value() - b, a, 1.0); }
Var operator*(Var a, double b) { return a.tape()->push(a.value() * b, a, b); }

Var operator/(Var a, double b) {
  if (b == 0.0) throw DomainError("Tape: division by zero");
  return a.tape()->push(a.value() / b, a, 1.0 / b);
}

Var operator-(double a, Var b) { return b.tape()->push(a - b.value(), b, -1.0); }
Var operator-(Var a) { return a.tape()->push(-a.value(), a, -1.0); }

// Kept out of line so the compiler cannot fuse sin and cos into one sincos
// call, whose results may differ from sin/cos in the last bit.
[[gnu::noinline]] static double plain_sin(double v) { return std::sin(v); }
[[gnu::noinline]] static double plain_cos(double v) { return std::cos(v); }

Var sin(Var x) {
  const double v = x.value();
  return x.tape()->push(plain_sin(v), x, plain_cos(v));
}

Var cos(Var x) {
  const double v = x.value();
  return x.tape()->push(plain_cos(v), x, -plain_sin(v));
}

Var square(Var x) {
  const double v = x.value();
  return x.tape()->push(v * v, x, 2.0 * v);
}

Var smooth_abs_pow(Var x, double p, double eps) {
  const double v = x.value();
  const double grad = smooth_abs_pow_grad(v, p, eps);
  return x.tape()->push(smooth_abs_pow(v, p, eps), x, grad);
}

FiniteDiffReport finite_diff_check(const TapedFunction& f, std::span<const double> point,
                                   double step, double small_grad) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff_check: step must be > 0");

  Tape tape;
  auto record = [&](std::span<const double> x) {
    tape.clear();
    std::vector<Var> leaves;
    leaves.reserve(x.size());
    for (double xi : x) leaves.push_back(tape.leaf(xi));
    return f(tape, leaves);
  };

  FiniteDiffReport report;
  const Var out = record(point);
  if (!std::isfinite(out.value())) {
    throw NonFiniteError("finite_diff_check: f is not finite at the probe point", 0);
  }
  report.analytic = tape.backward(out);

  std::vector<double> x(point.begin(), point.end());
  report.numeric.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + step;
    const double fp = record(x).value();
    x[i] = xi - step;
    const double fm = record(x).value();
    x[i] = xi;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NonFiniteError("finite_diff_check: f is not finite near the probe point", i);
    }
    const double numeric = (fp - fm) / (2.0 * step);
    report.numeric[i] = numeric;

    const double g = report.analytic[i];
    const double diff = std::abs(g - numeric);
    const double scale = std::max(std::abs(g), std::abs(numeric));
    const double err = std::abs(g) < small_grad ? diff : diff / scale;
    if (err > report.max_error) {
      report.max_error = err;
      report.worst_index = i;
    }
  }
  return report;
}

}  // namespace handsoff
