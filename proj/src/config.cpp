// Copyright 2026 The banditlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "banditlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "banditlab/errors.hpp"

namespace banditlab {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || d < 0 || d != static_cast<double>(static_cast<std::size_t>(d))) {
      throw std::invalid_argument(v);
    }
    return static_cast<std::size_t>(d);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' needs a non-negative integer, got '" + v + "'");
  }
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::int64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' needs an integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size() || (!v.empty() && v[0] == '-')) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' needs an unsigned integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' needs a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + key + "' needs a boolean, got '" + v + "'");
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "smallcell") return ExperimentKind::kSmallCell;
  if (name == "stochastic-bench") return ExperimentKind::kStochasticBench;
  if (name == "adversarial-bench") return ExperimentKind::kAdversarialBench;
  if (name == "game-ce") return ExperimentKind::kGameCe;
  if (name == "complexity-bench") return ExperimentKind::kComplexityBench;
  throw ConfigError("unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSmallCell: return "smallcell";
    case ExperimentKind::kStochasticBench: return "stochastic-bench";
    case ExperimentKind::kAdversarialBench: return "adversarial-bench";
    case ExperimentKind::kGameCe: return "game-ce";
    case ExperimentKind::kComplexityBench: return "complexity-bench";
  }
  return "unknown";
}

std::string ExperimentConfig::resolved_policy() const {
  if (!policy.empty()) return policy;
  switch (kind) {
    case ExperimentKind::kSmallCell: return "exp3m";
    case ExperimentKind::kStochasticBench: return "ucb1";
    case ExperimentKind::kAdversarialBench: return "exp3";
    case ExperimentKind::kGameCe: return "swap-exp3";
    case ExperimentKind::kComplexityBench: return "exp3m";
  }
  return "exp3m";
}

void ExperimentConfig::validate() const {
  if (arms < 1) throw ConfigError("M must be >= 1");
  if (plays < 1 || plays > arms) throw ConfigError("N must satisfy 1 <= N <= M");
  if (horizon < 1) throw ConfigError("horizon T must be >= 1");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (gamma && !(*gamma >= 0.0 && *gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("discount must lie in (0, 1]");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (trace_stride < 1) throw ConfigError("trace_stride must be >= 1");
  if (!(convergence_tolerance > 0.0)) throw ConfigError("convergence_tolerance must be > 0");
  if (!cells.empty() && cells.size() != arms) {
    throw ConfigError("cells override must list exactly M cells");
  }
  for (const auto& c : cells) c.validate();
  for (double mu : arm_means) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("arm means must lie in [0, 1]");
  }
  if (!arm_means.empty() && arm_means.size() != arms) {
    throw ConfigError("arm_means must list exactly M means");
  }
  if (!(best_mean >= 0.0 && best_mean <= 1.0 && other_mean >= 0.0 && other_mean <= 1.0)) {
    throw ConfigError("best_mean and other_mean must lie in [0, 1]");
  }
  for (std::size_t m : m_sweep) {
    if (m < 2) throw ConfigError("m_sweep entries must be >= 2");
  }
  for (const auto& [m, n] : sweep_pairs) {
    if (n < 1 || n > m) throw ConfigError("sweep pairs need 1 <= N <= M");
  }
  (void)parse_process_kind(process);
  const std::string p = resolved_policy();
  static const char* kKnown[] = {"exp3m", "uniform", "oracle", "ucb1", "discounted-ucb",
                                 "sw-ucb", "ph-ucb", "exp3", "swap-exp3"};
  if (std::find_if(std::begin(kKnown), std::end(kKnown),
                   [&](const char* k) { return p == k; }) == std::end(kKnown)) {
    throw ConfigError("unknown policy '" + p + "'");
  }
}

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(raw_value);
  if (key == "kind") c.kind = parse_experiment_kind(v);
  else if (key == "M" || key == "arms") c.arms = to_size(key, v);
  else if (key == "N" || key == "plays") c.plays = to_size(key, v);
  else if (key == "T" || key == "horizon") c.horizon = to_size(key, v);
  else if (key == "replications") c.replications = to_size(key, v);
  else if (key == "seed") c.seed = to_u64(key, v);
  else if (key == "policy") c.policy = v;
  else if (key == "gamma") {
    if (v.empty() || v == "auto") c.gamma.reset();
    else c.gamma = to_double(key, v);
  }
  else if (key == "discount") c.discount = to_double(key, v);
  else if (key == "window") c.window = to_size(key, v);
  else if (key == "ph_lambda") c.ph_lambda = to_double(key, v);
  else if (key == "ph_delta") c.ph_delta = to_double(key, v);
  else if (key == "mode") c.mode = parse_service_mode(v);
  else if (key == "process") c.process = v;
  else if (key == "energy_max" || key == "A_max") c.energy_max = to_int(key, v);
  else if (key == "users_max" || key == "B_max") c.users_max = to_int(key, v);
  else if (key == "trace_path") c.trace_path = v;
  else if (key == "regimes") {
    // "start:A_max:B_max; ..."
    c.regimes.clear();
    for (const auto& item : split(v, ';')) {
      const auto parts = split(item, ':');
      if (parts.size() != 3) throw ConfigError("regimes entries are start:A_max:B_max");
      c.regimes.push_back({to_size(key, parts[0]), to_int(key, parts[1]), to_int(key, parts[2])});
    }
  } else if (key == "cells") {
    // "alpha:beta:r:kappa; ..."
    c.cells.clear();
    for (const auto& item : split(v, ';')) {
      const auto parts = split(item, ':');
      if (parts.size() != 4) throw ConfigError("cells entries are alpha:beta:r:kappa");
      c.cells.push_back({to_double(key, parts[0]), to_double(key, parts[1]),
                         to_double(key, parts[2]), to_double(key, parts[3])});
    }
  } else if (key == "arm_means") {
    c.arm_means.clear();
    for (const auto& item : split(v, ',')) c.arm_means.push_back(to_double(key, item));
  }
  else if (key == "best_mean") c.best_mean = to_double(key, v);
  else if (key == "other_mean") c.other_mean = to_double(key, v);
  else if (key == "change_round") c.change_round = to_size(key, v);
  else if (key == "game") c.game = v;
  else if (key == "m_sweep") {
    c.m_sweep.clear();
    for (const auto& item : split(v, ',')) c.m_sweep.push_back(to_size(key, item));
  }
  else if (key == "bench_rounds") c.bench_rounds = to_size(key, v);
  else if (key == "sweep_pairs") {
    // "8:4, 6:3"
    c.sweep_pairs.clear();
    for (const auto& item : split(v, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) throw ConfigError("sweep_pairs entries are M:N");
      c.sweep_pairs.emplace_back(to_size(key, parts[0]), to_size(key, parts[1]));
    }
  }
  else if (key == "out" || key == "out_dir") c.out_dir = v;
  else if (key == "trace_stride") c.trace_stride = to_size(key, v);
  else if (key == "tail_window") c.tail_window = to_size(key, v);
  else if (key == "convergence_tolerance") c.convergence_tolerance = to_double(key, v);
  else if (key == "plot") c.plot = to_bool(key, v);
  else if (key == "threads") c.threads = to_size(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_text(ExperimentConfig& config, const std::string& text) {
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config JSON: ") + e.what());
    }
    for (const auto& [key, value] : doc.items()) {
      std::string v;
      if (value.is_string()) {
        v = value.get<std::string>();
      } else if (value.is_array()) {
        // Arrays of numbers become comma lists; nested "M:N" strings pass through.
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (i) v += ',';
          v += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
        }
      } else if (value.is_null()) {
        v = "";
      } else if (value.is_object()) {
        throw ConfigError("config JSON must be flat; '" + key + "' is an object");
      } else {
        v = value.dump();
      }
      apply_setting(config, key, v);
    }
    return;
  }
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    // INI section headers carry no meaning in the flat schema.
    if (trim(line).front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + " lacks '='");
    }
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig config;
  apply_config_text(config, buffer.str());
  return config;
}

std::size_t resolve_thread_count(const ExperimentConfig& config) {
  if (config.threads > 0) return config.threads;
  if (const char* env = std::getenv("BANDITLAB_THREADS")) {
    try {
      const auto n = std::stoul(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
      log_warning("ignoring malformed BANDITLAB_THREADS");
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Scenario build_scenario(const ExperimentConfig& config) {
  Scenario s = default_scenario(config.arms, config.mode, config.energy_max, config.users_max);
  if (!config.cells.empty()) s.params = config.cells;
  const ProcessKind kind = parse_process_kind(config.process);
  for (auto& proc : s.processes) {
    proc.kind = kind;
    if (kind == ProcessKind::kRegimeSwitch) proc.regimes = config.regimes;
  }
  if (kind == ProcessKind::kFileTrace) {
    if (config.trace_path.empty()) throw ConfigError("file-trace process needs trace_path");
    s.trace = std::make_shared<const SnapshotTrace>(load_snapshot_trace(config.trace_path));
    if (s.trace->rounds() < config.horizon) {
      throw InputError("snapshot trace has fewer rows than the horizon");
    }
  }
  s.validate();
  return s;
}

}  // namespace banditlab
