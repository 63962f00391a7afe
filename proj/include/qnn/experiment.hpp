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

#pragma once

// Runs a parsed experiment and renders its artifacts: result JSON, sweep and
// figure tables, Wigner grids and the run manifest.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qnn/config.hpp"
#include "qnn/train.hpp"
#include "qnn/wigner.hpp"

namespace qnn {

// Shortest round-trip text for doubles; infinities and NaN spelled out.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

inline std::string content_hash(std::string_view text) { return hex64(rng::tag(text)); }

namespace detail {

inline json number_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double json_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  throw InvalidArgument("expected a number in result file");
}

inline json matrix_json(const RealMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

inline json vector_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_json(v(i)));
  return out;
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json complex_matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

inline json health_json(const StateHealth& h) {
  return {{"trace_error", h.trace_error}, {"hermiticity", h.hermiticity}, {"min_eigenvalue", h.min_eigenvalue}};
}

}  // namespace detail

inline json to_json(const XorTrainResult& r, Encoding encoding, const RealMatrix& targets) {
  json j;
  j["task"] = "xor";
  j["encoding"] = to_string(encoding);
  j["weights"] = detail::matrix_json(r.readout.weights);
  j["bias"] = detail::vector_json(r.readout.bias);
  j["features"] = detail::matrix_json(r.features);
  j["outputs"] = detail::matrix_json(r.outputs);
  j["targets"] = detail::matrix_json(targets);
  j["error"] = {{"mean_abs", r.error.mean_abs}, {"max_abs", r.error.max_abs}};
  j["success"] = r.error.success();
  if (!r.draw_max_errors.empty()) j["draw_max_errors"] = r.draw_max_errors;
  if (!r.health.empty()) {
    json h = json::array();
    for (const auto& s : r.health) h.push_back(detail::health_json(s));
    j["health"] = std::move(h);
  }
  return j;
}

inline json to_json(const CatTrainResult& r) {
  json j;
  j["task"] = "cat";
  json cases = json::array();
  for (const auto& c : r.cases) {
    const MixingMatrix mix = unitary_from_generator(c.theta);
    json cj;
    cj["beta"] = detail::complex_json(c.beta);
    cj["theta"] = detail::vector_json(c.theta);
    cj["W"] = detail::complex_matrix_json(mix.W);
    cj["delta"] = c.delta;
    cj["initial_delta"] = c.initial_delta;
    cj["probability"] = c.probability;
    cj["iterations"] = c.iterations;
    cj["health"] = detail::health_json(c.health);
    cj["health"]["unitarity_error"] = unitarity_error(mix.W);
    cj["history"] = c.history;
    cases.push_back(std::move(cj));
  }
  j["cases"] = std::move(cases);
  j["mean_delta"] = r.mean_delta;
  j["mean_initial_delta"] = r.mean_initial_delta;
  j["mean_probability"] = r.mean_probability;
  return j;
}

inline json to_json(const std::vector<SweepRow>& rows, Task task) {
  json j;
  j["task"] = to_string(task);
  json out = json::array();
  for (const auto& r : rows) {
    json rj;
    rj["alpha"] = detail::number_json(r.alpha);
    rj["error_mean"] = r.error_mean;
    rj["error_std"] = r.error_std;
    rj["probability_mean"] = detail::number_json(r.probability_mean);
    rj["errors"] = r.errors;
    if (!r.probabilities.empty()) rj["probabilities"] = r.probabilities;
    if (!r.betas.empty()) rj["betas"] = r.betas;
    json h = json::array();
    for (const auto& s : r.health) h.push_back(detail::health_json(s));
    rj["health"] = std::move(h);
    if (!r.unitarity.empty()) rj["unitarity_errors"] = r.unitarity;
    out.push_back(std::move(rj));
  }
  j["rows"] = std::move(out);
  return j;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "alpha,error_mean,error_std,probability_mean\n";
  for (const auto& r : rows)
    out += format_number(r.alpha) + "," + format_number(r.error_mean) + "," + format_number(r.error_std) + "," +
           format_number(r.probability_mean) + "\n";
  return out;
}

inline std::string wigner_csv(const WignerGrid& w) {
  std::string out = "x,p,W\n";
  const auto& g = w.geometry;
  for (int i = 0; i < g.nx; ++i)
    for (int k = 0; k < g.np; ++k)
      out += format_number(g.x(i)) + "," + format_number(g.p(k)) + "," + format_number(w.values(i, k)) + "\n";
  return out;
}

inline json wigner_json(const WignerGrid& w) {
  const auto& g = w.geometry;
  json j = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"p_min", g.p_min}, {"p_max", g.p_max},
            {"nx", g.nx},       {"np", g.np},       {"convention", "x = (a + a^dag)/sqrt(2), integral of W is 1"}};
  json values = json::array();
  for (int i = 0; i < g.nx; ++i)
    for (int k = 0; k < g.np; ++k) values.push_back(w.values(i, k));
  j["values"] = std::move(values);
  return j;
}

struct Artifact {
  std::string name;
  std::string content;
};

struct ExperimentOutput {
  json result;
  std::vector<Artifact> files;  // result.json first, in a fixed order
};

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline ExperimentOutput run_experiment(const ExperimentConfig& cfg, int jobs = 1) {
  ExperimentOutput out;
  std::vector<Artifact> extra;
  switch (cfg.task) {
    case Task::kXor: {
      out.result = to_json(train_xor(cfg.xor_task), cfg.xor_task.encoding, cfg.xor_task.targets);
      break;
    }
    case Task::kCat: {
      const auto& task = cfg.cat_task;
      const CatTrainResult r = optimize_cat_mixing(task);
      out.result = to_json(r);
      json grids = json::array();
      for (std::size_t i = 0; i < r.cases.size(); ++i) {
        const auto& c = r.cases[i];
        const WignerGrid target = target_cat_wigner(c.beta, task.k, task.grid);
        const WignerGrid output = c.probability > 0.0 ? wigner_of_state(c.output, task.grid)
                                                      : WignerGrid{task.grid, RealMatrix::Zero(task.grid.nx, task.grid.np)};
        const std::string suffix = i == 0 ? "" : "_" + std::to_string(i);
        extra.push_back({"wigner_target" + suffix + ".csv", wigner_csv(target)});
        extra.push_back({"wigner_output" + suffix + ".csv", wigner_csv(output)});
        grids.push_back({{"beta", detail::complex_json(c.beta)}, {"target", wigner_json(target)}, {"output", wigner_json(output)}});
      }
      extra.push_back({"wigner.json", dump(grids)});
      break;
    }
    case Task::kSweepXor:
    case Task::kSweepCat: {
      std::vector<SweepRow> rows;
      if (cfg.task == Task::kSweepXor) {
        rows = sweep_nonlinearity(cfg.xor_task, cfg.alpha_values, cfg.sweep_seeds, jobs);
      } else {
        rows = sweep_nonlinearity(CatSweepTask{cfg.cat_task, cfg.random_beta}, cfg.alpha_values, cfg.sweep_seeds, jobs);
      }
      out.result = to_json(rows, cfg.task);
      extra.push_back({"sweep.csv", sweep_csv(rows)});
      break;
    }
  }
  out.result["seed"] = cfg.seed;
  out.result["config_hash"] = content_hash(cfg.document.dump());
  out.files.push_back({"result.json", dump(out.result)});
  for (auto& a : extra) out.files.push_back(std::move(a));
  return out;
}

// Run record; the timestamp lives here and nowhere else.
inline json make_manifest(const ExperimentConfig& cfg, const std::vector<Artifact>& files, const std::string& timestamp) {
  json m;
  m["config_hash"] = content_hash(cfg.document.dump());
  m["config"] = cfg.document;
  m["seed"] = cfg.seed;
  m["task"] = to_string(cfg.task);
  m["qnn_version"] = std::string(kVersion);
  m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  m["json_version"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                      "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
#if defined(__clang__)
  m["compiler"] = "clang " __clang_version__;
#elif defined(__GNUC__)
  m["compiler"] = "gcc " __VERSION__;
#else
  m["compiler"] = "unknown";
#endif
  m["timestamp"] = timestamp;
  json hashes = json::object();
  for (const auto& f : files) hashes[f.name] = content_hash(f.content);
  m["files"] = std::move(hashes);
  return m;
}

// Write to a sibling temporary file, then rename over the target.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

enum class Figure { kFig1c, kFig4 };

inline Figure figure_from_string(const std::string& s) {
  if (s == "fig1c") return Figure::kFig1c;
  if (s == "fig4") return Figure::kFig4;
  throw InvalidArgument("unknown figure '" + s + "' (expected fig1c or fig4)");
}

// Pools the per-draw errors of every result at each alpha; one row per alpha.
inline std::string emit_figure_data(Figure fig, const std::vector<json>& results) {
  if (results.empty()) throw InvalidArgument("emit-figure: no result files given");
  const std::string want = fig == Figure::kFig1c ? "sweep_xor" : "sweep_cat";
  std::map<double, std::vector<double>> pooled;
  for (const auto& r : results) {
    if (!r.contains("task") || r["task"] != want)
      throw InvalidArgument("emit-figure: expected " + want + " results, got " +
                            (r.contains("task") ? r["task"].dump() : std::string("no task field")));
    for (const auto& row : r.at("rows")) {
      auto& bucket = pooled[detail::json_number(row.at("alpha"))];
      for (const auto& e : row.at("errors")) bucket.push_back(detail::json_number(e));
    }
  }
  std::string out = "alpha,error_mean,error_std\n";
  for (const auto& [alpha, errs] : pooled) {
    const double n = static_cast<double>(errs.size());
    double mean = 0.0;
    for (double e : errs) mean += e / n;
    double var = 0.0;
    for (double e : errs) var += (e - mean) * (e - mean) / n;
    out += format_number(alpha) + "," + format_number(mean) + "," + format_number(std::sqrt(var)) + "\n";
  }
  return out;
}

}  // namespace qnn
