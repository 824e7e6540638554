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

// Seeded disturbance sampling.
//
// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. Doubles are formed as (bits >> 11) * 2^-53, giving a uniform
// value in [0, 1), and mapped affinely onto [low, high]. Neither step goes
// through std::uniform_real_distribution, which is implementation-defined,
// so batches are identical on every platform.
//
// Substream seeds: derive_seed(master, name, index) hashes `name` with
// 64-bit FNV-1a and mixes master, name hash and index through three rounds of
// the SplitMix64 finalizer.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace handsoff {

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

/// Disturbance distribution. Currently only i.i.d. uniform(low, high);
/// low == high yields a deterministic constant (use uniform(0,0) for no noise).
struct Distribution {
  enum class Kind { kUniform };

  Kind kind = Kind::kUniform;
  double low = -1.0;
  double high = 1.0;

  static Distribution uniform(double low, double high);
  static Distribution zero() { return uniform(0.0, 0.0); }

  /// Parses "uniform(a,b)" or "zero". Throws std::invalid_argument otherwise.
  static Distribution parse(std::string_view text);
  std::string to_string() const;

  bool contains(double w) const { return w >= low && w <= high; }
  bool operator==(const Distribution&) const = default;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double unit();
  double sample(const Distribution& dist);

 private:
  std::mt19937_64 engine_;
};

/// `count` disturbance trajectories w^1..w^I, each horizon x noise_dim.
class DisturbanceBatch {
 public:
  DisturbanceBatch() = default;
  DisturbanceBatch(std::size_t count, std::size_t horizon, std::size_t noise_dim,
                   std::vector<double> values, std::uint64_t seed = 0,
                   Distribution dist = Distribution::zero());

  std::size_t count() const { return count_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t noise_dim() const { return noise_dim_; }
  std::uint64_t seed() const { return seed_; }
  const Distribution& distribution() const { return dist_; }

  /// Flattened time-major trajectory of sample i (length horizon * noise_dim).
  std::span<const double> sample(std::size_t i) const {
    const std::size_t n = horizon_ * noise_dim_;
    return std::span<const double>(values_).subspan(i * n, n);
  }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const DisturbanceBatch&) const = default;

 private:
  std::size_t count_ = 0;
  std::size_t horizon_ = 0;
  std::size_t noise_dim_ = 0;
  std::vector<double> values_;
  std::uint64_t seed_ = 0;
  Distribution dist_;
};

/// Draws I trajectories sample-major, then time, then noise component, from a
/// single stream. A smaller `count` with the same seed is therefore a prefix
/// of a larger one.
DisturbanceBatch sample_disturbances(std::uint64_t seed, std::size_t count, std::size_t horizon,
                                     std::size_t noise_dim, const Distribution& dist);

}  // namespace handsoff
