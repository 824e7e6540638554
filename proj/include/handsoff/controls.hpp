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
#include <span>
#include <vector>

namespace handsoff {

/// Open-loop input sequence u_0..u_{T-1}, each of dimension input_dim,
/// stored flattened in time-major order.
class ControlSequence {
 public:
  ControlSequence() = default;
  ControlSequence(std::size_t horizon, std::size_t input_dim)
      : horizon_(horizon), input_dim_(input_dim), values_(horizon * input_dim, 0.0) {}
  ControlSequence(std::size_t horizon, std::size_t input_dim, std::vector<double> values);

  std::size_t horizon() const { return horizon_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> at(std::size_t t) const {
    return std::span<const double>(values_).subspan(t * input_dim_, input_dim_);
  }
  std::span<double> at(std::size_t t) {
    return std::span<double>(values_).subspan(t * input_dim_, input_dim_);
  }

  std::span<const double> flat() const { return values_; }
  std::span<double> flat() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Appends `steps` zero inputs at the end of the horizon.
  void extend(std::size_t steps);

  bool operator==(const ControlSequence&) const = default;

 private:
  std::size_t horizon_ = 0;
  std::size_t input_dim_ = 0;
  std::vector<double> values_;
};

}  // namespace handsoff
