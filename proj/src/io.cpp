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

#include "handsoff/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "handsoff/errors.hpp"

namespace handsoff::io {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += ',';
    out += cells[i];
  }
  return out;
}

std::vector<std::string> numbered(const std::string& stem, std::size_t n) {
  if (n == 1) return {stem};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

double parse_cell(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::vector<std::string> state_columns(std::size_t n) {
  if (n == 2) return {"x", "y"};
  return numbered("x", n);
}

void write_controls_csv(std::ostream& out, const ControlSequence& u) {
  std::vector<std::string> header{"t"};
  for (auto& c : numbered("u", u.input_dim())) header.push_back(c);
  out << join(header) << '\n';
  for (std::size_t t = 0; t < u.horizon(); ++t) {
    out << t;
    for (double v : u.at(t)) out << ',' << format_double(v);
    out << '\n';
  }
}

ControlSequence read_controls_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("controls CSV is empty");
  const std::vector<std::string> header = split(line);
  if (header.size() < 2 || header[0] != "t") {
    throw std::runtime_error("line 1: controls CSV header must start with 't'");
  }
  const std::size_t input_dim = header.size() - 1;
  std::vector<std::string> expected{"t"};
  for (auto& c : numbered("u", input_dim)) expected.push_back(c);
  if (header != expected) {
    throw std::runtime_error("line 1: expected header '" + join(expected) + "'");
  }
  std::vector<double> values;
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " columns");
    }
    if (parse_cell(cells[0], line_no) != static_cast<double>(rows)) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": time index out of order");
    }
    for (std::size_t k = 1; k < cells.size(); ++k) values.push_back(parse_cell(cells[k], line_no));
    ++rows;
  }
  return ControlSequence(rows, input_dim, std::move(values));
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  std::vector<std::string> header{"t"};
  for (auto& c : state_columns(traj.state_dim())) header.push_back(c);
  out << join(header) << '\n';
  for (std::size_t t = 0; t < traj.size(); ++t) {
    out << t;
    for (double v : traj.state(t)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_phase_csv(std::ostream& out, const Trajectory& traj, std::span<const double> x0,
                     std::span<const double> target) {
  if (x0.size() != traj.state_dim() || target.size() != traj.state_dim()) {
    throw DimensionError("write_phase_csv: marker dimension does not match the trajectory");
  }
  std::vector<std::string> header{"label"};
  for (auto& c : state_columns(traj.state_dim())) header.push_back(c);
  out << join(header) << '\n';
  auto row = [&out](const char* label, std::span<const double> x) {
    out << label;
    for (double v : x) out << ',' << format_double(v);
    out << '\n';
  };
  row("initial", x0);
  row("target", target);
  for (std::size_t t = 0; t < traj.size(); ++t) row("state", traj.state(t));
}

void write_batch_csv(std::ostream& out, const DisturbanceBatch& batch) {
  std::vector<std::string> header{"sample", "t"};
  for (auto& c : numbered("w", batch.noise_dim())) header.push_back(c);
  out << join(header) << '\n';
  for (std::size_t i = 0; i < batch.count(); ++i) {
    const auto w = batch.sample(i);
    for (std::size_t t = 0; t < batch.horizon(); ++t) {
      out << i << ',' << t;
      for (std::size_t k = 0; k < batch.noise_dim(); ++k) {
        out << ',' << format_double(w[t * batch.noise_dim() + k]);
      }
      out << '\n';
    }
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
}

DirectoryLock::DirectoryLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
  std::FILE* f = std::fopen(path_.c_str(), "wx");
  if (f == nullptr) {
    throw std::runtime_error("output directory " + dir.string() +
                             " is locked by another run (remove " + path_.string() +
                             " if stale)");
  }
  std::fclose(f);
}

DirectoryLock::~DirectoryLock() {
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

}  // namespace handsoff::io
