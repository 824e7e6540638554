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

// CSV artifacts and file helpers.
//
// Numbers are written in the shortest decimal form that parses back to the
// same double (std::to_chars), so a write/read cycle is lossless and two
// runs that compute identical doubles produce identical files.
//
// Schemas (n_u = 1, n = 2 shown; wider vectors number their columns):
//   controls    t,u                 one row per input step, T rows
//   trajectory  t,x,y               one row per state, T + 1 rows
//   phase       label,x,y           "initial", "target", then one "state"
//                                   row per trajectory point
//   batch       sample,t,w          one row per (sample, step)

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "handsoff/controls.hpp"
#include "handsoff/dynamics.hpp"
#include "handsoff/random.hpp"

namespace handsoff::io {

std::string format_double(double v);

/// Column names for a state vector: x for n = 1, x,y for n = 2, x0..x{n-1} otherwise.
std::vector<std::string> state_columns(std::size_t n);

void write_controls_csv(std::ostream& out, const ControlSequence& u);
/// Throws std::runtime_error (with the line number) on malformed input.
ControlSequence read_controls_csv(std::istream& in);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_phase_csv(std::ostream& out, const Trajectory& traj, std::span<const double> x0,
                     std::span<const double> target);
void write_batch_csv(std::ostream& out, const DisturbanceBatch& batch);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling, then renames over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

/// Exclusive lock on an output directory, held for the object's lifetime.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path path_;
};

}  // namespace handsoff::io
