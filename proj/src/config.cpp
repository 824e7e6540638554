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

#include "handsoff/config.hpp"

#include <cmath>
#include <concepts>
#include <numbers>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "handsoff/errors.hpp"
#include "handsoff/io.hpp"

namespace handsoff {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Reads optional keys from one JSON object and rejects the keys it never
// consumed.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(field(key), "must be finite");
    }
  }

  template <std::unsigned_integral T>
  void read(const std::string& key, T& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(field(key), "expected a non-negative integer");
      out = v->get<T>();
    }
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected an array of numbers");
      std::vector<double> values;
      for (const json& e : *v) {
        if (!e.is_number()) throw ConfigError(field(key), "expected an array of numbers");
        values.push_back(e.get<double>());
      }
      out = std::move(values);
    }
  }

  void read(const std::string& key, Distribution& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a descriptor such as \"uniform(-1,1)\"");
      try {
        out = Distribution::parse(v->get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(field(key), e.what());
      }
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

ModelSpec parse_model(const json& j) {
  ObjectReader r(j, "model");
  ModelSpec spec;
  const json* kind = r.find("kind");
  if (kind == nullptr || !kind->is_string()) {
    throw ConfigError("model.kind", "expected \"pendulum\" or \"linear\"");
  }
  const std::string k = kind->get<std::string>();
  if (k == "pendulum") {
    spec.kind = ModelSpec::Kind::kPendulum;
    r.read("length", spec.pendulum.length);
    r.read("mass", spec.pendulum.mass);
    r.read("friction", spec.pendulum.friction);
    r.read("gravity", spec.pendulum.gravity);
    r.read("dt", spec.pendulum.dt);
  } else if (k == "linear") {
    spec.kind = ModelSpec::Kind::kLinear;
    r.read("state_dim", spec.state_dim);
    r.read("input_dim", spec.input_dim);
    r.read("noise_dim", spec.noise_dim);
    r.read("a", spec.a);
    r.read("b", spec.b);
    r.read("g", spec.g);
  } else {
    throw ConfigError("model.kind", "unknown model kind '" + k + "'");
  }
  r.finish();
  return spec;
}

void parse_train(const json& j, TrainConfig& c) {
  ObjectReader r(j, "train");
  r.read("horizon", c.horizon);
  r.read("lambda_incremental", c.lambda_incremental);
  r.read("lambda_polish", c.lambda_polish);
  r.read("p_start", c.p_start);
  r.read("p_decay", c.p_decay);
  r.read("p_polish", c.p_polish);
  r.read("smoothing", c.smoothing);
  r.read("batch_size", c.batch_size);
  r.read("polish_batch_size", c.polish_batch_size);
  r.read("stage_iterations", c.stage_iterations);
  r.read("polish_rounds", c.polish_rounds);
  r.read("polish_iterations", c.polish_iterations);
  r.read("incremental_lr", c.incremental_lr);
  r.read("lr0", c.lr0);
  r.read("lr_decay", c.lr_decay);
  r.read("adam_beta1", c.adam_beta1);
  r.read("adam_beta2", c.adam_beta2);
  r.read("adam_epsilon", c.adam_epsilon);
  r.read("sparsity_threshold", c.sparsity_threshold);
  r.read("seed", c.seed);
  r.read("deterministic", c.deterministic);
  r.finish();
}

ordered_json model_json(const ModelSpec& m) {
  ordered_json j;
  if (m.kind == ModelSpec::Kind::kPendulum) {
    j["kind"] = "pendulum";
    j["length"] = m.pendulum.length;
    j["mass"] = m.pendulum.mass;
    j["friction"] = m.pendulum.friction;
    j["gravity"] = m.pendulum.gravity;
    j["dt"] = m.pendulum.dt;
  } else {
    j["kind"] = "linear";
    j["state_dim"] = m.state_dim;
    j["input_dim"] = m.input_dim;
    j["noise_dim"] = m.noise_dim;
    j["a"] = m.a;
    j["b"] = m.b;
    j["g"] = m.g;
  }
  return j;
}

ordered_json train_json(const TrainConfig& c) {
  ordered_json j;
  j["horizon"] = c.horizon;
  j["lambda_incremental"] = c.lambda_incremental;
  j["lambda_polish"] = c.lambda_polish;
  j["p_start"] = c.p_start;
  j["p_decay"] = c.p_decay;
  j["p_polish"] = c.p_polish;
  j["smoothing"] = c.smoothing;
  j["batch_size"] = c.batch_size;
  j["polish_batch_size"] = c.polish_batch_size;
  j["stage_iterations"] = c.stage_iterations;
  j["polish_rounds"] = c.polish_rounds;
  j["polish_iterations"] = c.polish_iterations;
  j["incremental_lr"] = c.incremental_lr;
  j["lr0"] = c.lr0;
  j["lr_decay"] = c.lr_decay;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_epsilon"] = c.adam_epsilon;
  j["sparsity_threshold"] = c.sparsity_threshold;
  j["seed"] = c.seed;
  j["deterministic"] = c.deterministic;
  return j;
}

}  // namespace

std::unique_ptr<SystemModel> ModelSpec::build() const {
  if (kind == Kind::kPendulum) return std::make_unique<PendulumModel>(pendulum);
  return std::make_unique<LinearModel>(state_dim, input_dim, noise_dim, a, b, g);
}

void RunConfig::validate() const {
  std::unique_ptr<SystemModel> m;
  try {
    m = model.build();
  } catch (const std::exception& e) {
    throw ConfigError("model", e.what());
  }
  train.validate(*m);
  if (eval.n_eval == 0) throw ConfigError("eval.n_eval", "must be >= 1");
}

RunConfig parse_run_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  ObjectReader r(root, "");
  const json* schema = r.find("schema");
  if (schema == nullptr || !schema->is_string() || schema->get<std::string>() != kRunSchema) {
    throw ConfigError("schema", "expected \"" + std::string(kRunSchema) + "\"");
  }
  RunConfig config;
  if (const json* m = r.find("model")) config.model = parse_model(*m);
  r.read("disturbance", config.train.disturbance);
  r.read("x0", config.train.x0);
  r.read("target", config.train.target);
  if (const json* t = r.find("train")) parse_train(*t, config.train);
  if (const json* e = r.find("eval")) {
    ObjectReader er(*e, "eval");
    er.read("n_eval", config.eval.n_eval);
    er.read("n_examples", config.eval.n_examples);
    er.finish();
  }
  r.finish();
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(io::read_file(path));
}

std::string dump_run_config(const RunConfig& config) {
  ordered_json j;
  j["schema"] = kRunSchema;
  j["model"] = model_json(config.model);
  j["disturbance"] = config.train.disturbance.to_string();
  j["x0"] = config.train.x0;
  j["target"] = config.train.target;
  j["train"] = train_json(config.train);
  j["eval"] = {{"n_eval", config.eval.n_eval}, {"n_examples", config.eval.n_examples}};
  return j.dump(2) + "\n";
}

RunConfig preset(std::string_view name) {
  RunConfig config;
  if (name == "pendulum_table1") {
    // TrainConfig and PendulumParams defaults are the swing-up experiment.
    return config;
  }
  if (name == "linear_toy") {
    config.model.kind = ModelSpec::Kind::kLinear;
    config.train.horizon = 2;
    config.train.x0 = {1.0};
    config.train.target = {0.0};
    config.train.disturbance = Distribution::zero();
    config.train.lambda_incremental = 0.0;
    config.train.lambda_polish = 0.0;
    return config;
  }
  throw ConfigError("", "unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"pendulum_table1", "linear_toy"}; }

}  // namespace handsoff
