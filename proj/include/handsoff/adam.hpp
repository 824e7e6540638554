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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace handsoff {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamOptions&) const = default;
};

/// Moment estimates and step counter of one Adam run.
struct AdamState {
  AdamState() = default;
  AdamState(std::size_t size, AdamOptions options)
      : options(options), m(size, 0.0), v(size, 0.0) {}

  AdamOptions options;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam update of `params` in place:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   params <- params - lr * m_hat / (sqrt(v_hat) + eps)
/// Throws NonFiniteError naming the first non-finite gradient entry; params
/// and state are left untouched in that case.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad);

/// Geometric learning-rate decay, lr_i = lr0 * beta^i.
struct LrSchedule {
  double lr0 = 1.0;
  double beta = 0.5;

  void validate() const;
  /// Evaluated by repeated multiplication, lr_{i+1} = beta * lr_i.
  double rate(std::size_t round) const;
};

}  // namespace handsoff
