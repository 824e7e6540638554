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

// Trainable cost: Monte-Carlo terminal cost plus an lp sparsity penalty.
//
//   J(u) = (1/I) sum_i |x_T(u, w^i) - x*|^2 + lambda * R_p(u)
//   R_p(u) = sum_k (u_k^2 + eps^2)^(p/2)
//
// R_p is the p-th power of the lp quasi-norm, smoothed by eps so the
// gradient stays finite at zero. With eps = 0 it equals sum |u_k|^p and
// tends to the number of nonzero entries as p -> 0.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "handsoff/controls.hpp"
#include "handsoff/dynamics.hpp"
#include "handsoff/random.hpp"
#include "handsoff/tape.hpp"

namespace handsoff {

struct CostBreakdown {
  double terminal_mc = 0.0;
  double regularizer = 0.0;
  double total = 0.0;
  double lambda = 0.0;
  double p = 1.0;

  bool operator==(const CostBreakdown&) const = default;
};

/// lambda, p and smoothing eps of the sparsity penalty.
struct Penalty {
  double lambda = 0.0;
  double p = 1.0;
  double eps = 1e-8;
};

/// Fixed pieces of a control problem: model, initial state and target.
struct Problem {
  const SystemModel* model = nullptr;
  std::vector<double> x0;
  std::vector<double> target;
};

/// How per-sample contributions are combined.
///  kSerial: the whole batch on one tape (the default; bit-reproducible).
///  kParallel: one tape per sample on worker threads, reduced in sample
///   order. Also reproducible, but may differ from kSerial by rounding.
enum class Reduction { kSerial, kParallel };

/// |x - target|^2.
double terminal_cost(std::span<const double> x, std::span<const double> target);
Var terminal_cost(std::span<const Var> x, std::span<const double> target);

/// R_p(u). Throws DomainError for p outside (0, 1] or eps < 0.
double lp_regularizer(std::span<const double> u, double p, double eps);
Var lp_regularizer(Tape& tape, std::span<const Var> u, double p, double eps);

/// Count of entries with |u_k| > threshold.
std::size_t sparsity_l0(std::span<const double> u, double threshold);

/// Cost of u against every sample of `batch`. batch.horizon() must equal
/// the number of time steps in u.
CostBreakdown mc_total_cost(const Problem& problem, std::span<const double> u,
                            const DisturbanceBatch& batch, const Penalty& penalty);

struct CostAndGradient {
  CostBreakdown cost;
  std::vector<double> gradient;
};

/// Cost and its reverse-mode gradient with respect to u. `tape` is cleared
/// and reused; pass the same tape across calls to avoid reallocation.
CostAndGradient cost_and_gradient(const Problem& problem, std::span<const double> u,
                                  const DisturbanceBatch& batch, const Penalty& penalty,
                                  Reduction reduction = Reduction::kSerial, Tape* tape = nullptr);

/// Records J on `tape` with `u` as given variables; returns the total node.
/// Used by gradient checks; the terminal and regularizer parts are returned
/// through the optional out-parameters.
Var record_total_cost(Tape& tape, const Problem& problem, std::span<const Var> u,
                      const DisturbanceBatch& batch, const Penalty& penalty,
                      Var* terminal_out = nullptr, Var* regularizer_out = nullptr);

}  // namespace handsoff
