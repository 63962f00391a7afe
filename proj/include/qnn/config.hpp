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

// Experiment configuration: strict JSON parsing with field paths and line
// numbers in every error. Unknown keys are rejected.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qnn/common.hpp"
#include "qnn/train.hpp"

namespace qnn {

using json = nlohmann::json;

enum class Task { kXor, kCat, kSweepXor, kSweepCat };

inline std::string to_string(Task t) {
  switch (t) {
    case Task::kXor: return "xor";
    case Task::kCat: return "cat";
    case Task::kSweepXor: return "sweep_xor";
    case Task::kSweepCat: return "sweep_cat";
  }
  return "unknown";
}

// JSON pointer of every key and array element -> 1-based source line.
using LineMap = std::map<std::string, int>;

inline LineMap json_line_map(std::string_view text) {
  struct Frame {
    bool object;
    std::string path;
    std::string key;
    int index = 0;
    bool expect_key = true;
  };
  auto escape = [](const std::string& k) {
    std::string out;
    for (char c : k) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out += c;
    }
    return out;
  };
  LineMap lines;
  std::vector<Frame> stack;
  int line = 1;
  // Pointer of a value that starts now; records array elements.
  auto value_path = [&]() -> std::string {
    if (stack.empty()) return "";
    Frame& f = stack.back();
    if (f.object) return f.path + "/" + escape(f.key);
    const std::string p = f.path + "/" + std::to_string(f.index);
    lines.emplace(p, line);
    return p;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        if (text[i] == '\n') ++line;
        s += text[i];
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
        lines.emplace(stack.back().path + "/" + escape(s), line);
      } else {
        value_path();
      }
    } else if (c == '{' || c == '[') {
      std::string p = value_path();
      stack.push_back({c == '{', std::move(p), {}, 0, true});
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().object) stack.back().expect_key = true;
        else ++stack.back().index;
      }
    } else if (c != ':' && c != ' ' && c != '\t' && c != '\r') {
      value_path();
      while (i + 1 < text.size() && std::string_view(",]}: \t\r\n").find(text[i + 1]) == std::string_view::npos) ++i;
    }
  }
  return lines;
}

struct ExperimentConfig {
  Task task = Task::kXor;
  std::uint64_t seed = 0;
  std::optional<std::string> output_dir;
  XorTaskConfig xor_task;
  CatTaskConfig cat_task;
  std::optional<BetaRange> random_beta;
  std::vector<double> alpha_values;
  std::vector<std::uint64_t> sweep_seeds;
  json document;  // the parsed input, for hashing and the manifest

  bool is_xor() const { return task == Task::kXor || task == Task::kSweepXor; }
  bool is_sweep() const { return task == Task::kSweepXor || task == Task::kSweepCat; }
};

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(LineMap lines) : lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    std::string where = "config";
    for (std::string p = path;; p = p.substr(0, p.rfind('/'))) {
      if (auto it = lines_.find(p); it != lines_.end()) {
        where += ":" + std::to_string(it->second);
        break;
      }
      if (p.empty()) break;
    }
    throw ConfigError(where + ": " + (path.empty() ? "/" : path) + ": " + msg);
  }

  void allow(const json& obj, const std::string& path, std::initializer_list<std::string_view> keys) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (auto a : keys) ok = ok || a == k;
      if (!ok) fail(path + "/" + k, "unknown key");
    }
  }

  const json* find(const json& obj, const char* key) const {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  const json& require(const json& obj, const std::string& path, const char* key) const {
    if (const json* v = find(obj, key)) return *v;
    fail(path + "/" + key, "required field is missing");
  }

  double number(const json& v, const std::string& path) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    }
    fail(path, "expected a number");
  }

  double finite(const json& v, const std::string& path) const {
    const double x = number(v, path);
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  double positive(const json& v, const std::string& path) const {
    const double x = finite(v, path);
    if (!(x > 0.0)) fail(path, "must be > 0");
    return x;
  }

  long long integer(const json& v, const std::string& path, long long lo, long long hi) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
      fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::uint64_t seed(const json& v, const std::string& path) const {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  // A real number or a [re, im] pair.
  cplx complex(const json& v, const std::string& path) const {
    if (v.is_array()) {
      if (v.size() != 2) fail(path, "complex values are [re, im]");
      return {finite(v[0], path + "/0"), finite(v[1], path + "/1")};
    }
    return finite(v, path);
  }

  const json& array(const json& v, const std::string& path, bool non_empty = true) const {
    if (!v.is_array()) fail(path, "expected an array");
    if (non_empty && v.empty()) fail(path, "must not be empty");
    return v;
  }

  int mode(const json& v, const std::string& path, int n_modes) const {
    return static_cast<int>(integer(v, path, 0, n_modes - 1));
  }

 private:
  LineMap lines_;
};

inline NetworkParams parse_network(const ConfigReader& r, const json& net, std::uint64_t seed, bool allow_pump) {
  const std::string at = "/network";
  r.allow(net, at, {"n_modes", "E", "alpha", "gamma", "tau", "couplings", "J", "pump", "pumps"});
  NetworkParams p = NetworkParams::uncoupled(static_cast<int>(r.integer(r.require(net, at, "n_modes"), at + "/n_modes", 1, 16)));
  if (auto* v = r.find(net, "E")) p.E = r.finite(*v, at + "/E");
  if (auto* v = r.find(net, "alpha")) {
    p.alpha = r.number(*v, at + "/alpha");
    if (!(p.alpha >= 0.0)) r.fail(at + "/alpha", "must be >= 0 or \"inf\"");
  }
  if (auto* v = r.find(net, "gamma")) p.gamma = r.positive(*v, at + "/gamma");
  if (auto* v = r.find(net, "tau")) p.tau = r.positive(*v, at + "/tau");
  if (r.find(net, "couplings") && r.find(net, "J")) r.fail(at + "/J", "give either J or couplings, not both");
  if (auto* c = r.find(net, "couplings")) {
    const std::string cp = at + "/couplings";
    r.allow(*c, cp, {"j_max", "topology", "distribution"});
    const double j_max = r.finite(r.require(*c, cp, "j_max"), cp + "/j_max");
    if (j_max < 0.0) r.fail(cp + "/j_max", "must be >= 0");
    Topology topo = Topology::kChain;
    if (auto* t = r.find(*c, "topology")) {
      const auto s = r.string(*t, cp + "/topology");
      if (s == "ring") topo = Topology::kRing;
      else if (s != "chain") r.fail(cp + "/topology", "expected \"chain\" or \"ring\"");
    }
    CouplingDistribution dist = CouplingDistribution::kUniform;
    if (auto* d = r.find(*c, "distribution")) {
      const auto s = r.string(*d, cp + "/distribution");
      if (s == "constant") dist = CouplingDistribution::kConstant;
      else if (s != "uniform") r.fail(cp + "/distribution", "expected \"uniform\" or \"constant\"");
    }
    p.J = nearest_neighbour_couplings(p.n_modes, j_max, seed, topo, dist);
  } else if (auto* J = r.find(net, "J")) {
    const std::string jp = at + "/J";
    if (!J->is_array() || static_cast<int>(J->size()) != p.n_modes) r.fail(jp, "expected an n_modes x n_modes matrix");
    for (int i = 0; i < p.n_modes; ++i) {
      const auto& row = (*J)[i];
      if (!row.is_array() || static_cast<int>(row.size()) != p.n_modes)
        r.fail(jp + "/" + std::to_string(i), "expected a row of n_modes numbers");
      for (int j = 0; j < p.n_modes; ++j) p.J(i, j) = r.finite(row[j], jp + "/" + std::to_string(i) + "/" + std::to_string(j));
    }
    if ((p.J - p.J.transpose()).cwiseAbs().maxCoeff() > 0.0) r.fail(jp, "must be symmetric");
    for (int i = 0; i < p.n_modes; ++i)
      if (p.J(i, i) != 0.0) r.fail(jp, "diagonal must be zero");
  }
  if (r.find(net, "pump") && r.find(net, "pumps")) r.fail(at + "/pumps", "give either pump or pumps, not both");
  if (auto* v = r.find(net, "pump")) {
    if (!allow_pump) r.fail(at + "/pump", "xor tasks set the pump from the inputs");
    p.P.setConstant(r.complex(*v, at + "/pump"));
  }
  if (auto* v = r.find(net, "pumps")) {
    const std::string pp = at + "/pumps";
    if (!allow_pump) r.fail(pp, "xor tasks set the pump from the inputs");
    if (!v->is_array() || static_cast<int>(v->size()) != p.n_modes) r.fail(pp, "expected one entry per mode");
    for (int i = 0; i < p.n_modes; ++i) p.P(i) = r.complex((*v)[i], pp + "/" + std::to_string(i));
  }
  return p;
}

inline BasisSpec parse_basis(const ConfigReader& r, const json& b, int n_modes) {
  const std::string at = "/basis";
  r.allow(b, at, {"mode_dims", "total_cap"});
  BasisSpec spec;
  const json& dims = r.require(b, at, "mode_dims");
  if (dims.is_array()) {
    if (static_cast<int>(dims.size()) != n_modes) r.fail(at + "/mode_dims", "expected one dimension per mode");
    for (std::size_t i = 0; i < dims.size(); ++i)
      spec.mode_dims.push_back(static_cast<int>(r.integer(dims[i], at + "/mode_dims/" + std::to_string(i), 1, 64)));
  } else {
    spec.mode_dims.assign(n_modes, static_cast<int>(r.integer(dims, at + "/mode_dims", 1, 64)));
  }
  if (auto* v = r.find(b, "total_cap")) spec.total_cap = static_cast<int>(r.integer(*v, at + "/total_cap", 0, 1000));
  double dim = 1;
  for (int d : spec.mode_dims) dim *= d;
  if (!spec.total_cap && dim > 20000) r.fail(at, "basis too large; set total_cap");
  return spec;
}

inline EvolutionConfig parse_evolution(const ConfigReader& r, const json* e) {
  EvolutionConfig ev;
  if (!e) return ev;
  const std::string at = "/evolution";
  r.allow(*e, at, {"method", "dt", "atol", "trace_tolerance"});
  if (auto* v = r.find(*e, "method")) {
    const auto s = r.string(*v, at + "/method");
    if (s == "adaptive") ev.method = Method::kAdaptive;
    else if (s != "rk4") r.fail(at + "/method", "expected \"rk4\" or \"adaptive\"");
  }
  if (auto* v = r.find(*e, "dt")) ev.dt = r.positive(*v, at + "/dt");
  if (auto* v = r.find(*e, "atol")) ev.atol = r.positive(*v, at + "/atol");
  if (auto* v = r.find(*e, "trace_tolerance")) ev.trace_tolerance = r.positive(*v, at + "/trace_tolerance");
  return ev;
}

inline GridGeometry parse_grid(const ConfigReader& r, const json* g) {
  GridGeometry geom;
  if (!g) return geom;
  const std::string at = "/cat/grid";
  r.allow(*g, at, {"x_min", "x_max", "p_min", "p_max", "nx", "np"});
  if (auto* v = r.find(*g, "x_min")) geom.x_min = r.finite(*v, at + "/x_min");
  if (auto* v = r.find(*g, "x_max")) geom.x_max = r.finite(*v, at + "/x_max");
  if (auto* v = r.find(*g, "p_min")) geom.p_min = r.finite(*v, at + "/p_min");
  if (auto* v = r.find(*g, "p_max")) geom.p_max = r.finite(*v, at + "/p_max");
  if (auto* v = r.find(*g, "nx")) geom.nx = static_cast<int>(r.integer(*v, at + "/nx", 2, 4001));
  if (auto* v = r.find(*g, "np")) geom.np = static_cast<int>(r.integer(*v, at + "/np", 2, 4001));
  if (!(geom.x_min < geom.x_max)) r.fail(at + "/x_max", "must exceed x_min");
  if (!(geom.p_min < geom.p_max)) r.fail(at + "/p_max", "must exceed p_min");
  return geom;
}

inline NelderMeadOptions parse_optimizer(const ConfigReader& r, const json* o) {
  NelderMeadOptions opt;
  if (!o) return opt;
  const std::string at = "/cat/optimizer";
  r.allow(*o, at, {"max_iterations", "initial_scale", "x_tolerance", "f_tolerance"});
  if (auto* v = r.find(*o, "max_iterations")) opt.max_iterations = static_cast<int>(r.integer(*v, at + "/max_iterations", 1, 10000000));
  if (auto* v = r.find(*o, "initial_scale")) opt.initial_scale = r.positive(*v, at + "/initial_scale");
  if (auto* v = r.find(*o, "x_tolerance")) opt.x_tolerance = r.positive(*v, at + "/x_tolerance");
  if (auto* v = r.find(*o, "f_tolerance")) opt.f_tolerance = r.positive(*v, at + "/f_tolerance");
  return opt;
}

inline void parse_xor(const ConfigReader& r, const json& x, ExperimentConfig& cfg) {
  const std::string at = "/xor";
  r.allow(x, at, {"encoding", "pump_on", "input_occupation", "input_modes", "output_modes", "targets", "noise"});
  XorTaskConfig& t = cfg.xor_task;
  const int n = t.params.n_modes;
  if (n < 4) r.fail("/network/n_modes", "the xor task needs at least 4 modes");
  try {
    t.encoding = encoding_from_string(r.string(r.require(x, at, "encoding"), at + "/encoding"));
  } catch (const InvalidArgument& e) {
    r.fail(at + "/encoding", e.what());
  }
  if (auto* v = r.find(x, "pump_on")) t.pump_on = r.complex(*v, at + "/pump_on");
  if (auto* v = r.find(x, "input_occupation")) {
    t.input_occupation = r.finite(*v, at + "/input_occupation");
    if (t.input_occupation < 0) r.fail(at + "/input_occupation", "must be >= 0");
  }
  auto pair = [&](const char* key, std::array<int, 2>& out) {
    if (auto* v = r.find(x, key)) {
      const std::string p = at + "/" + key;
      if (!v->is_array() || v->size() != 2) r.fail(p, "expected two mode indices");
      for (int i = 0; i < 2; ++i) out[i] = r.mode((*v)[i], p + "/" + std::to_string(i), n);
    }
  };
  pair("input_modes", t.input_modes);
  pair("output_modes", t.output_modes);
  if (auto* v = r.find(x, "targets")) {
    const std::string p = at + "/targets";
    if (!v->is_array() || v->size() != 4) r.fail(p, "expected 4 rows, one per input pair");
    std::size_t k = 0;
    for (std::size_t c = 0; c < 4; ++c) {
      const json& row = (*v)[c];
      const std::string rp = p + "/" + std::to_string(c);
      if (!row.is_array() || row.empty()) r.fail(rp, "expected a non-empty row");
      if (c == 0) {
        k = row.size();
        t.targets.resize(4, static_cast<Eigen::Index>(k));
      } else if (row.size() != k) {
        r.fail(rp, "rows must have equal length");
      }
      for (std::size_t j = 0; j < k; ++j) t.targets(c, j) = r.finite(row[j], rp + "/" + std::to_string(j));
    }
  }
  if (auto* v = r.find(x, "noise")) {
    const std::string p = at + "/noise";
    r.allow(*v, p, {"low", "high", "samples"});
    NoiseModel m;
    if (auto* w = r.find(*v, "low")) m.low = r.finite(*w, p + "/low");
    if (auto* w = r.find(*v, "high")) m.high = r.finite(*w, p + "/high");
    if (auto* w = r.find(*v, "samples")) m.samples = static_cast<int>(r.integer(*w, p + "/samples", 1, 1000000));
    if (!(m.low <= m.high)) r.fail(p + "/high", "must be >= low");
    if (m.low < 0.0) r.fail(p + "/low", "must be >= 0");
    m.seed = rng::substream(cfg.seed, "noise");
    t.noise = m;
  }
}

inline void parse_cat(const ConfigReader& r, const json& c, ExperimentConfig& cfg) {
  const std::string at = "/cat";
  r.allow(c, at, {"beta_list", "random_beta", "k", "input_mode", "output_mode", "shared_mixing",
                  "probability_floor", "grid", "optimizer"});
  CatTaskConfig& t = cfg.cat_task;
  const int n = t.params.n_modes;
  if (auto* v = r.find(c, "beta_list")) {
    r.array(*v, at + "/beta_list");
    t.beta_list.clear();
    for (std::size_t i = 0; i < v->size(); ++i) t.beta_list.push_back(r.complex((*v)[i], at + "/beta_list/" + std::to_string(i)));
  } else if (cfg.task == Task::kCat) {
    r.fail(at + "/beta_list", "required field is missing");
  }
  if (auto* v = r.find(c, "random_beta")) {
    const std::string p = at + "/random_beta";
    if (cfg.task != Task::kSweepCat) r.fail(p, "only sweep_cat draws random amplitudes");
    r.allow(*v, p, {"low", "high"});
    BetaRange range;
    if (auto* w = r.find(*v, "low")) range.low = r.positive(*w, p + "/low");
    if (auto* w = r.find(*v, "high")) range.high = r.positive(*w, p + "/high");
    if (!(range.low <= range.high)) r.fail(p + "/high", "must be >= low");
    cfg.random_beta = range;
  } else if (cfg.task == Task::kSweepCat && !r.find(c, "beta_list")) {
    cfg.random_beta = BetaRange{};
  }
  if (auto* v = r.find(c, "k")) t.k = static_cast<int>(r.integer(*v, at + "/k", 0, 1));
  if (auto* v = r.find(c, "input_mode")) t.input_mode = r.mode(*v, at + "/input_mode", n);
  if (auto* v = r.find(c, "output_mode")) t.output_mode = r.mode(*v, at + "/output_mode", n);
  if (auto* v = r.find(c, "shared_mixing")) t.shared_mixing = r.boolean(*v, at + "/shared_mixing");
  if (auto* v = r.find(c, "probability_floor")) t.probability_floor = r.positive(*v, at + "/probability_floor");
  t.grid = parse_grid(r, r.find(c, "grid"));
  t.optimizer = parse_optimizer(r, r.find(c, "optimizer"));
  const double reach = cfg.random_beta ? cfg.random_beta->high : 0.0;
  for (std::size_t i = 0; i <= t.beta_list.size(); ++i) {
    const double b = i < t.beta_list.size() ? std::abs(t.beta_list[i]) : reach;
    const double need = required_half_width(b);
    if (-t.grid.x_min < need || t.grid.x_max < need || -t.grid.p_min < need || t.grid.p_max < need)
      r.fail(i < t.beta_list.size() ? at + "/beta_list/" + std::to_string(i) : at + "/random_beta",
             "amplitude " + std::to_string(b) + " needs a grid half-width of " + std::to_string(need));
  }
}

inline void parse_sweep(const ConfigReader& r, const json& s, ExperimentConfig& cfg) {
  const std::string at = "/sweep";
  r.allow(s, at, {"alpha_values", "seeds", "draws"});
  const json& a = r.array(r.require(s, at, "alpha_values"), at + "/alpha_values");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = r.number(a[i], at + "/alpha_values/" + std::to_string(i));
    if (!(v >= 0.0)) r.fail(at + "/alpha_values/" + std::to_string(i), "must be >= 0 or \"inf\"");
    cfg.alpha_values.push_back(v);
  }
  if (r.find(s, "seeds") && r.find(s, "draws")) r.fail(at + "/draws", "give either seeds or draws, not both");
  if (auto* v = r.find(s, "seeds")) {
    r.array(*v, at + "/seeds");
    for (std::size_t i = 0; i < v->size(); ++i) cfg.sweep_seeds.push_back(r.seed((*v)[i], at + "/seeds/" + std::to_string(i)));
  } else {
    long long draws = cfg.task == Task::kSweepCat ? 10 : 3;
    if (auto* v = r.find(s, "draws")) draws = r.integer(*v, at + "/draws", 1, 100000);
    const auto stream = rng::substream(cfg.seed, "sweep");
    for (long long i = 0; i < draws; ++i) cfg.sweep_seeds.push_back(rng::mix(stream, static_cast<std::uint64_t>(i)));
  }
}

}  // namespace detail

inline ExperimentConfig parse_experiment(std::string_view text) {
  ExperimentConfig cfg;
  try {
    cfg.document = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i) line += text[i] == '\n';
    throw ConfigError("config:" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  const detail::ConfigReader r(json_line_map(text));
  const json& doc = cfg.document;
  r.allow(doc, "", {"task", "seed", "output_dir", "network", "basis", "evolution", "xor", "cat", "sweep"});

  const auto task = r.string(r.require(doc, "", "task"), "/task");
  if (task == "xor") cfg.task = Task::kXor;
  else if (task == "cat") cfg.task = Task::kCat;
  else if (task == "sweep_xor") cfg.task = Task::kSweepXor;
  else if (task == "sweep_cat") cfg.task = Task::kSweepCat;
  else r.fail("/task", "expected one of xor, cat, sweep_xor, sweep_cat");
  if (auto* v = r.find(doc, "seed")) cfg.seed = r.seed(*v, "/seed");
  if (auto* v = r.find(doc, "output_dir")) cfg.output_dir = r.string(*v, "/output_dir");

  const bool xor_task = cfg.is_xor();
  NetworkParams params = detail::parse_network(r, r.require(doc, "", "network"), cfg.seed, !xor_task);
  const BasisSpec basis = detail::parse_basis(r, r.require(doc, "", "basis"), params.n_modes);
  const EvolutionConfig evolution = detail::parse_evolution(r, r.find(doc, "evolution"));

  const char* own = xor_task ? "xor" : "cat";
  const char* other = xor_task ? "cat" : "xor";
  if (r.find(doc, other)) r.fail(std::string("/") + other, "not used by task " + task);
  if (cfg.is_sweep() != (r.find(doc, "sweep") != nullptr))
    r.fail("/sweep", cfg.is_sweep() ? "required field is missing" : "only sweep tasks take a sweep block");

  if (xor_task) {
    cfg.xor_task.params = params;
    cfg.xor_task.basis = basis;
    cfg.xor_task.evolution = evolution;
    detail::parse_xor(r, r.require(doc, "", own), cfg);
  } else {
    cfg.cat_task.params = params;
    cfg.cat_task.basis = basis;
    cfg.cat_task.evolution = evolution;
    detail::parse_cat(r, r.require(doc, "", own), cfg);
  }
  if (cfg.is_sweep()) detail::parse_sweep(r, doc.at("sweep"), cfg);

  // Library-level checks catch anything the schema cannot express.
  try {
    if (xor_task) cfg.xor_task.validate();
    else if (!cfg.random_beta) cfg.cat_task.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace qnn
