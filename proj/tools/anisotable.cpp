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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "anisotable/error.hpp"
#include "anisotable/harness.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) anisotable::fail(anisotable::ErrorCode::Io, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    anisotable::fail(anisotable::ErrorCode::ConfigInvalid, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace anisotable;
  CLI::App app{"Monte Carlo experiments for strictly stable processes killed on leaving a cone"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out_dir;
  for (ExperimentKind kind : all_experiment_kinds()) {
    auto* sub = app.add_subcommand(std::string(to_string(kind)), fmt::format("run the {} experiment", to_string(kind)));
    sub->add_option("--config", config_path, "experiment JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory");
  }
  std::string manifest_path;
  auto* rep = app.add_subcommand("replay", "regenerate a run and verify byte-identical outputs");
  rep->add_option("--manifest", manifest_path, "manifest.json of a previous run")->required()->check(CLI::ExistingFile);
  rep->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (rep->parsed()) {
      const ReplayReport r = replay(manifest_path, workers);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << fmt::format("replay ok: {} file(s) identical\n", r.checked.size());
      return 0;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    const ExperimentConfig config = parse_config(load_json(config_path), experiment_kind_from_string(name), seed);
    const unsigned w = resolve_workers(workers, config);
    std::filesystem::path dir = !out_dir.empty() ? out_dir : (!config.out.empty() ? config.out : "anisotable_out");
    const RunResult result = run_experiment(config, w);
    write_outputs(result, dir);
    for (const auto& [file, _] : result.files) std::cout << (dir / file).string() << '\n';
    std::cout << (dir / "manifest.json").string() << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::MismatchDetected ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
