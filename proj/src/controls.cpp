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

#include "handsoff/controls.hpp"

#include <string>

#include "handsoff/errors.hpp"

namespace handsoff {

void ControlSequence::extend(std::size_t steps) {
  horizon_ += steps;
  values_.resize(horizon_ * input_dim_, 0.0);
}

ControlSequence::ControlSequence(std::size_t horizon, std::size_t input_dim,
                                 std::vector<double> values)
    : horizon_(horizon), input_dim_(input_dim), values_(std::move(values)) {
  if (values_.size() != horizon * input_dim) {
    throw DimensionError("ControlSequence: expected " + std::to_string(horizon * input_dim) +
                         " values, got " + std::to_string(values_.size()));
  }
}

}  // namespace handsoff
