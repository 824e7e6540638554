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

#include "handsoff/random.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "handsoff/errors.hpp"

namespace handsoff {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("distribution: bad number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ fnv1a(stream));
  return splitmix64(h ^ index);
}

Distribution Distribution::uniform(double low, double high) {
  if (!std::isfinite(low) || !std::isfinite(high) || low > high) {
    throw std::invalid_argument("uniform distribution needs finite low <= high");
  }
  return Distribution{Kind::kUniform, low, high};
}

Distribution Distribution::parse(std::string_view text) {
  if (text == "zero") return zero();
  constexpr std::string_view kPrefix = "uniform(";
  if (text.starts_with(kPrefix) && text.ends_with(")")) {
    std::string_view args = text.substr(kPrefix.size(), text.size() - kPrefix.size() - 1);
    const auto comma = args.find(',');
    if (comma != std::string_view::npos) {
      return uniform(parse_number(args.substr(0, comma)), parse_number(args.substr(comma + 1)));
    }
  }
  throw std::invalid_argument("unknown distribution descriptor '" + std::string(text) + "'");
}

std::string Distribution::to_string() const {
  char buf[64];
  std::string out = "uniform(";
  auto r = std::to_chars(buf, buf + sizeof(buf), low);
  out.append(buf, r.ptr);
  out += ',';
  r = std::to_chars(buf, buf + sizeof(buf), high);
  out.append(buf, r.ptr);
  out += ')';
  return out;
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::sample(const Distribution& dist) {
  const double u = unit();
  if (dist.low == dist.high) return dist.low;
  const double w = dist.low + (dist.high - dist.low) * u;
  return w > dist.high ? dist.high : w;
}

DisturbanceBatch::DisturbanceBatch(std::size_t count, std::size_t horizon, std::size_t noise_dim,
                                   std::vector<double> values, std::uint64_t seed,
                                   Distribution dist)
    : count_(count),
      horizon_(horizon),
      noise_dim_(noise_dim),
      values_(std::move(values)),
      seed_(seed),
      dist_(dist) {
  if (values_.size() != count * horizon * noise_dim) {
    throw DimensionError("DisturbanceBatch: value count does not match count x horizon x dim");
  }
}

DisturbanceBatch sample_disturbances(std::uint64_t seed, std::size_t count, std::size_t horizon,
                                     std::size_t noise_dim, const Distribution& dist) {
  if (count == 0) throw std::invalid_argument("sample_disturbances: count must be >= 1");
  if (horizon == 0) throw std::invalid_argument("sample_disturbances: horizon must be >= 1");
  Rng rng(seed);
  std::vector<double> values(count * horizon * noise_dim);
  for (double& w : values) w = rng.sample(dist);
  return DisturbanceBatch(count, horizon, noise_dim, std::move(values), seed, dist);
}

}  // namespace handsoff
