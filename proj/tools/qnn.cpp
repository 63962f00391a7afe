// Copyright 2026 The qnn Authors
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

// Command-line front end: qnn run | validate | emit-figure.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qnn/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // usage and I/O errors
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw qnn::ConfigError(path + ": cannot read file");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

qnn::ExperimentConfig load(const std::string& path) {
  try {
    return qnn::parse_experiment(read_file(path));
  } catch (const qnn::ConfigError& e) {
    throw qnn::ConfigError(path + ": " + e.what());
  }
}

int cmd_run(const std::string& config_path, int jobs, const std::string& out_flag) {
  const qnn::ExperimentConfig cfg = load(config_path);
  const fs::path out_dir = !out_flag.empty() ? fs::path(out_flag)
                           : cfg.output_dir   ? fs::path(*cfg.output_dir)
                                              : fs::path("qnn-out");
  const auto start = std::chrono::steady_clock::now();
  const qnn::ExperimentOutput output = qnn::run_experiment(cfg, jobs);
  fs::create_directories(out_dir);
  for (const auto& f : output.files) qnn::write_file_atomic(out_dir / f.name, f.content);
  qnn::write_file_atomic(out_dir / "manifest.json", qnn::dump(qnn::make_manifest(cfg, output.files, utc_timestamp())));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& r = output.result;
  std::cout << qnn::to_string(cfg.task) << ": ";
  if (cfg.task == qnn::Task::kXor) {
    std::cout << "mean error " << r["error"]["mean_abs"] << ", max error " << r["error"]["max_abs"]
              << (r["success"].get<bool>() ? " (gate operates)" : " (gate fails)");
  } else if (cfg.task == qnn::Task::kCat) {
    std::cout << "mean delta " << r["mean_delta"] << " (initial " << r["mean_initial_delta"] << "), mean probability "
              << r["mean_probability"];
  } else {
    std::cout << r["rows"].size() << " sweep rows";
  }
  std::cout << "\nwrote " << output.files.size() + 1 << " files to " << out_dir.string() << " in " << secs << " s\n";
  return kExitOk;
}

int cmd_validate(const std::string& config_path) {
  const qnn::ExperimentConfig cfg = load(config_path);
  std::cout << config_path << ": ok (" << qnn::to_string(cfg.task) << ", hash " << qnn::content_hash(cfg.document.dump())
            << ")\n";
  return kExitOk;
}

int cmd_emit(const std::string& figure, const std::vector<std::string>& inputs, const std::string& out_path) {
  const qnn::Figure fig = qnn::figure_from_string(figure);
  std::vector<qnn::json> results;
  for (const auto& p : inputs) {
    try {
      results.push_back(qnn::json::parse(read_file(p)));
    } catch (const qnn::json::exception& e) {
      throw qnn::ConfigError(p + ": " + e.what());
    }
  }
  const std::string csv = qnn::emit_figure_data(fig, results);
  if (out_path.empty()) std::cout << csv;
  else qnn::write_file_atomic(out_path, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qnn: Kerr-network experiments (XOR readout, cat-state generation, nonlinearity sweeps)"};
  app.set_version_flag("--version", std::string(qnn::kVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir, figure, figure_out;
  int jobs = 1;
  std::vector<std::string> inputs;

  auto* run = app.add_subcommand("run", "run an experiment config and write its artifacts");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--jobs,-j", jobs, "parallel sweep points")->check(CLI::PositiveNumber);
  run->add_option("--out,-o", out_dir, "output directory (overrides output_dir)");

  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", config_path, "experiment config (JSON)")->required();

  auto* emit = app.add_subcommand("emit-figure", "pool sweep results into plot-ready CSV");
  emit->add_option("figure", figure, "fig1c or fig4")->required();
  emit->add_option("results", inputs, "result.json files")->required();
  emit->add_option("--out,-o", figure_out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (*run) return cmd_run(config_path, jobs, out_dir);
    if (*validate) return cmd_validate(config_path);
    if (*emit) return cmd_emit(figure, inputs, figure_out);
  } catch (const qnn::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qnn::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qnn::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
