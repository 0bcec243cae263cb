// Copyright 2026 The Anisotable Authors.
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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace anisotable {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ExperimentKind {
  Sample,
  Survival,
  ExponentTime,
  ExponentSpace,
  Factorization,
  Overshoot,
  Yaglom,
  Zolotarev,
  BiasProbe,
};

std::string_view to_string(ExperimentKind kind);
/// Throws ConfigInvalid on an unknown name.
ExperimentKind experiment_kind_from_string(std::string_view name);
const std::vector<ExperimentKind>& all_experiment_kinds();

/// Parsed experiment file:
///   {"experiment": "...", "model": {...}, "domain": {...}, "params": {...},
///    "scheme": {"eps", "delta", "small_jump_mode", "max_jumps_per_step"},
///    "master_seed": 7, "worker_count": 4, "out": "dir"}
/// "scheme", "worker_count", "out" and "experiment" are optional; unknown
/// fields are rejected at every level.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Sample;
  nlohmann::json model;
  nlohmann::json domain;
  nlohmann::json params;
  std::optional<nlohmann::json> scheme;
  std::uint64_t master_seed = 0;
  std::optional<unsigned> worker_count;
  std::string out;

  /// Canonical JSON of everything that determines the outputs (workers and
  /// output directory excluded).
  nlohmann::json canonical() const;
};

/// `kind_override` comes from the command line and must agree with an
/// "experiment" field when both are present. A missing seed is an error
/// unless `seed_override` is given.
ExperimentConfig parse_config(const nlohmann::json& j, std::optional<ExperimentKind> kind_override = {},
                              std::optional<std::uint64_t> seed_override = {});

/// Command line, then config, then ANISOTABLE_WORKERS, then 1.
unsigned resolve_workers(std::optional<unsigned> cli, const ExperimentConfig& config);

/// Output file name -> exact bytes.
using OutputFiles = std::map<std::string, std::string>;

struct RunResult {
  OutputFiles files;
  nlohmann::json manifest;
};

/// Runs the experiment in memory. Output bytes depend only on the canonical
/// config, never on the worker count.
RunResult run_experiment(const ExperimentConfig& config, unsigned workers);

/// Writes the outputs and manifest.json into `dir` (created if needed).
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);

struct ReplayReport {
  std::vector<std::string> checked;
  std::vector<std::string> warnings;
};

/// Regenerates every output listed in the manifest and compares it with the
/// file next to the manifest. Throws MismatchDetected on any difference.
ReplayReport replay(const std::filesystem::path& manifest_path, std::optional<unsigned> workers = {});

}  // namespace anisotable
