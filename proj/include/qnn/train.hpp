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

// Task harnesses: the XOR gate with a trained affine readout, cat-state
// generation with a trained mixing unitary, and nonlinearity sweeps.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qnn/common.hpp"
#include "qnn/dynamics.hpp"
#include "qnn/fock.hpp"
#include "qnn/nelder_mead.hpp"
#include "qnn/readout.hpp"
#include "qnn/wigner.hpp"

namespace qnn {

// ---------------------------------------------------------------------------
// XOR task

enum class Encoding { kPumpAmplitude, kOccupation, kMeanFieldAmplitude, kMeanFieldIntensity };

inline std::string to_string(Encoding e) {
  switch (e) {
    case Encoding::kPumpAmplitude: return "pump_amplitude";
    case Encoding::kOccupation: return "occupation";
    case Encoding::kMeanFieldAmplitude: return "mean_field_amplitude";
    case Encoding::kMeanFieldIntensity: return "mean_field_intensity";
  }
  return "unknown";
}

inline Encoding encoding_from_string(const std::string& s) {
  for (auto e : {Encoding::kPumpAmplitude, Encoding::kOccupation, Encoding::kMeanFieldAmplitude,
                 Encoding::kMeanFieldIntensity})
    if (to_string(e) == s) return e;
  throw InvalidArgument("unknown encoding '" + s + "'");
}

inline constexpr std::array<std::array<int, 2>, 4> kXorInputs{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};

inline RealMatrix xor_truth_table() {
  RealMatrix t(4, 1);
  t << 0, 1, 1, 0;
  return t;
}

// Fock truncation of the network. Hard-core (infinite Kerr) runs always use
// two levels per mode.
struct BasisSpec {
  std::vector<int> mode_dims;
  std::optional<int> total_cap;

  Basis build(const NetworkParams& params) const {
    if (params.hard_core()) return build_basis(std::vector<int>(params.n_modes, 2));
    if (static_cast<int>(mode_dims.size()) != params.n_modes)
      throw InvalidArgument("basis: mode_dims must list one dimension per mode");
    return build_basis(mode_dims, total_cap);
  }
};

struct XorTaskConfig {
  Encoding encoding = Encoding::kPumpAmplitude;
  NetworkParams params;  // params.P is overwritten per input
  BasisSpec basis;
  EvolutionConfig evolution;
  cplx pump_on = 1.0;            // pump amplitude for a logical 1
  double input_occupation = 1.0; // coherent <n> for a logical 1
  std::optional<NoiseModel> noise;
  std::array<int, 2> input_modes{0, 1};
  std::array<int, 2> output_modes{2, 3};
  RealMatrix targets = xor_truth_table();

  void validate() const {
    params.validate();
    for (int m : input_modes)
      if (m < 0 || m >= params.n_modes) throw InvalidArgument("xor: input mode out of range");
    for (int m : output_modes)
      if (m < 0 || m >= params.n_modes) throw InvalidArgument("xor: output mode out of range");
    if (targets.rows() != 4 || targets.cols() < 1 || !targets.allFinite())
      throw InvalidArgument("xor: targets must be a finite 4 x K table");
    if (!(input_occupation >= 0.0)) throw InvalidArgument("xor: input_occupation must be >= 0");
    if (noise) noise->validate();
  }
};

// Output features for one input pair: occupations <n> of the output modes,
// or the mean-field intensities / amplitudes (Re, Im interleaved). Quantum
// encodings report the final state's health through `health` when given.
inline RealVector run_xor_forward(const XorTaskConfig& cfg, std::array<int, 2> bits, StateHealth* health = nullptr) {
  cfg.validate();
  NetworkParams p = cfg.params;
  p.P = Vector::Zero(p.n_modes);
  switch (cfg.encoding) {
    case Encoding::kPumpAmplitude:
    case Encoding::kOccupation: {
      const Basis basis = cfg.basis.build(p);
      EvolutionConfig ev = cfg.evolution;
      StateVector psi0;
      if (cfg.encoding == Encoding::kPumpAmplitude) {
        for (int i = 0; i < 2; ++i) p.P(cfg.input_modes[i]) = cfg.pump_on * double(bits[i]);
        psi0 = vacuum(basis);
      } else {
        std::vector<cplx> amps(p.n_modes, 0.0);
        for (int i = 0; i < 2; ++i) amps[cfg.input_modes[i]] = std::sqrt(cfg.input_occupation * bits[i]);
        psi0 = coherent_state(basis, amps);
        ev.include_pump = false;
      }
      const DensityMatrix rho = evolve_master_equation(to_density(psi0), p, ev).final_state;
      if (health) *health = state_health(rho);
      const RealVector n = occupations(rho);
      RealVector f(2);
      for (int i = 0; i < 2; ++i) f(i) = n(cfg.output_modes[i]);
      return f;
    }
    case Encoding::kMeanFieldAmplitude:
    case Encoding::kMeanFieldIntensity: {
      for (int i = 0; i < 2; ++i) p.P(cfg.input_modes[i]) = cfg.pump_on * double(bits[i]);
      const Vector psi = evolve_mean_field({Vector::Zero(p.n_modes)}, p, cfg.evolution).final_state.psi;
      if (cfg.encoding == Encoding::kMeanFieldIntensity) {
        RealVector f(2);
        for (int i = 0; i < 2; ++i) f(i) = std::norm(psi(cfg.output_modes[i]));
        return f;
      }
      RealVector f(4);
      for (int i = 0; i < 2; ++i) {
        f(2 * i) = psi(cfg.output_modes[i]).real();
        f(2 * i + 1) = psi(cfg.output_modes[i]).imag();
      }
      return f;
    }
  }
  throw InvalidArgument("xor: invalid encoding");
}

struct ReadoutWeights {
  RealMatrix weights;  // K x F
  RealVector bias;     // K
};

inline constexpr double kReadoutRidge = 1e-10;

// Ordinary least squares with intercept via the normal equations; a ridge of
// 1e-10 keeps rank-deficient feature sets solvable.
inline ReadoutWeights solve_readout_weights(const RealMatrix& features, const RealMatrix& targets,
                                            double ridge = kReadoutRidge) {
  if (features.rows() < 4) throw InvalidArgument("solve_readout_weights: need at least 4 rows");
  if (targets.rows() != features.rows()) throw InvalidArgument("solve_readout_weights: row mismatch");
  const Eigen::Index n = features.rows(), f = features.cols();
  RealMatrix A(n, f + 1);
  A.leftCols(f) = features;
  A.col(f).setOnes();
  RealMatrix normal = A.transpose() * A;
  normal.diagonal().array() += ridge;
  const auto ldlt = normal.ldlt();
  RealMatrix coef = ldlt.solve(A.transpose() * targets);  // (F+1) x K
  // Refinement strips the ridge bias from well-conditioned problems.
  for (int pass = 0; pass < 2; ++pass) coef += ldlt.solve(A.transpose() * (targets - A * coef));
  return {coef.topRows(f).transpose(), coef.row(f).transpose()};
}

inline RealMatrix apply_readout(const RealMatrix& features, const ReadoutWeights& w) {
  RealMatrix out(features.rows(), w.weights.rows());
  for (Eigen::Index r = 0; r < features.rows(); ++r)
    out.row(r) = linear_readout(features.row(r).transpose(), w.weights, w.bias).transpose();
  return out;
}

struct TaskError {
  double mean_abs = 0.0;
  double max_abs = 0.0;

  // A logic gate operates when every case is within 0.5 of its target.
  bool success() const { return max_abs < 0.5; }
};

inline TaskError xor_task_error(const RealMatrix& outputs, const RealMatrix& targets) {
  if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols())
    throw InvalidArgument("xor_task_error: shape mismatch");
  const RealMatrix diff = (outputs - targets).cwiseAbs();
  return {diff.mean(), diff.maxCoeff()};
}

struct XorTrainResult {
  ReadoutWeights readout;
  RealMatrix features;  // 4 x F, noiseless
  RealMatrix outputs;   // 4 x K, noiseless features through the readout
  // Noiseless: errors of `outputs`. Noisy: each case error is first averaged
  // over the evaluation draws, then the mean and max over cases are taken.
  TaskError error;
  std::vector<double> draw_max_errors;  // worst case per evaluation draw (noisy runs)
  std::vector<StateHealth> health;      // per input case, quantum encodings only
};

inline RealMatrix xor_features(const XorTaskConfig& cfg, std::vector<StateHealth>* health = nullptr) {
  const bool quantum = cfg.encoding == Encoding::kPumpAmplitude || cfg.encoding == Encoding::kOccupation;
  if (health) health->assign(quantum ? 4 : 0, StateHealth{});
  RealMatrix f;
  for (int c = 0; c < 4; ++c) {
    const RealVector v = run_xor_forward(cfg, kXorInputs[c], health && quantum ? &(*health)[c] : nullptr);
    if (c == 0) f.resize(4, v.size());
    f.row(c) = v.transpose();
  }
  return f;
}

// Stream seeds for noisy training and evaluation draws.
inline NoiseModel noise_stream(const NoiseModel& base, std::string_view name) {
  NoiseModel m = base;
  m.seed = rng::substream(base.seed, name);
  return m;
}

inline XorTrainResult train_xor_readout(const XorTaskConfig& cfg, const RealMatrix& features) {
  XorTrainResult res;
  res.features = features;
  const RealMatrix& targets = cfg.targets;
  if (!cfg.noise) {
    res.readout = solve_readout_weights(features, targets);
    res.outputs = apply_readout(features, res.readout);
    res.error = xor_task_error(res.outputs, targets);
    return res;
  }
  const int S = cfg.noise->samples;
  const auto train = noise_stream(*cfg.noise, "train");
  const auto eval = noise_stream(*cfg.noise, "eval");
  auto noisy = [&](const NoiseModel& m, int draw) {
    RealMatrix f(4, features.cols());
    for (int c = 0; c < 4; ++c)
      f.row(c) = apply_measurement_noise(features.row(c).transpose(), m,
                                         static_cast<std::uint64_t>(draw) * 4 + c)
                     .transpose();
    return f;
  };
  RealMatrix stacked(4 * S, features.cols()), stacked_t(4 * S, targets.cols());
  for (int d = 0; d < S; ++d) {
    stacked.middleRows(4 * d, 4) = noisy(train, d);
    stacked_t.middleRows(4 * d, 4) = targets;
  }
  res.readout = solve_readout_weights(stacked, stacked_t);
  res.outputs = apply_readout(features, res.readout);
  RealMatrix case_error = RealMatrix::Zero(4, targets.cols());
  for (int d = 0; d < S; ++d) {
    const RealMatrix diff = (apply_readout(noisy(eval, d), res.readout) - targets).cwiseAbs();
    case_error += diff / S;
    res.draw_max_errors.push_back(diff.maxCoeff());
  }
  res.error = {case_error.mean(), case_error.maxCoeff()};
  return res;
}

inline XorTrainResult train_xor(const XorTaskConfig& cfg) {
  std::vector<StateHealth> health;
  XorTrainResult r = train_xor_readout(cfg, xor_features(cfg, &health));
  r.health = std::move(health);
  return r;
}

// ---------------------------------------------------------------------------
// Mixing parameterization

// theta = [N diagonal entries of h, then (Re, Im) of each h_ij, i < j, in
// row-major order]; W = exp(-i h).
inline MixingMatrix unitary_from_generator(const RealVector& theta) {
  const double root = std::sqrt(static_cast<double>(theta.size()));
  const int n = static_cast<int>(std::lround(root));
  if (n < 1 || n * n != theta.size())
    throw InvalidArgument("unitary_from_generator: length " + std::to_string(theta.size()) + " is not N^2");
  Matrix h = Matrix::Zero(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) h(i, i) = theta(k++);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      h(i, j) = cplx{theta(k), theta(k + 1)};
      h(j, i) = std::conj(h(i, j));
      k += 2;
    }
  return MixingMatrix::from_generator(h);
}

// ---------------------------------------------------------------------------
// Cat-state generation

struct CatTaskConfig {
  std::vector<cplx> beta_list{1.0};
  int k = 0;
  NetworkParams params;  // P applies to every mode
  BasisSpec basis;
  EvolutionConfig evolution;
  GridGeometry grid;
  NelderMeadOptions optimizer;
  int input_mode = 0;
  int output_mode = 0;
  bool shared_mixing = false;  // one W for every beta instead of one per beta
  double probability_floor = kProbabilityFloor;

  void validate() const {
    params.validate();
    if (beta_list.empty()) throw InvalidArgument("cat: beta_list is empty");
    if (k != 0 && k != 1) throw InvalidArgument("cat: k must be 0 or 1");
    if (optimizer.max_iterations < 1) throw InvalidArgument("cat: max_iterations must be >= 1");
    if (input_mode < 0 || input_mode >= params.n_modes || output_mode < 0 || output_mode >= params.n_modes)
      throw InvalidArgument("cat: mode index out of range");
    grid.validate();
    for (const auto& b : beta_list) {
      const double need = required_half_width(b);
      if (-grid.x_min < need || grid.x_max < need || -grid.p_min < need || grid.p_max < need)
        throw InvalidArgument("cat: beta " + std::to_string(std::abs(b)) + " exceeds the grid support");
    }
  }
};

// State of the network at tau for a coherent input on `input_mode`.
inline DensityMatrix evolve_cat_input(const CatTaskConfig& cfg, cplx beta) {
  const Basis basis = cfg.basis.build(cfg.params);
  std::vector<cplx> amps(cfg.params.n_modes, 0.0);
  amps[cfg.input_mode] = beta;
  return evolve_master_equation(to_density(coherent_state(basis, amps)), cfg.params, cfg.evolution)
      .final_state;
}

struct CatCase {
  cplx beta;
  RealVector theta;
  double delta = 1.0;
  double initial_delta = 1.0;  // at theta = 0 (W = I)
  double probability = 0.0;
  StateHealth health;
  DensityMatrix output;        // conditioned single-mode state
  int iterations = 0;
  std::vector<double> history;
};

struct CatTrainResult {
  std::vector<CatCase> cases;
  double mean_delta = 0.0;
  double mean_initial_delta = 0.0;
  double mean_probability = 0.0;
};

// Scores a fixed network state against the cat target for a given theta.
class CatScorer {
 public:
  CatScorer(const CatTaskConfig& cfg, const DensityMatrix& rho, cplx beta)
      : rho_(rho),
        conditioner_(rho.basis, cfg.output_mode),
        target_(target_cat_wigner(beta, cfg.k, cfg.grid)),
        evaluator_(conditioner_.levels(), target_),
        floor_(cfg.probability_floor) {}

  // Fast objective; conditioning below the floor scores as the worst case.
  double cost(const RealVector& theta) const {
    const MixingMatrix mix = unitary_from_generator(theta);
    const Matrix M = conditioner_.block(rho_.entries, mix.W);
    const double p = M.trace().real();
    if (!(p >= floor_)) return 1.0;
    return evaluator_(M / p);
  }

  // Direct route: conditioned state, Wigner grid, Riemann-sum error.
  std::pair<double, ConditionedOutput> evaluate(const RealVector& theta) const {
    auto out = conditioner_.condition(rho_, unitary_from_generator(theta), floor_);
    const double d = wigner_error(wigner_of_state(out.rho_out, target_.geometry), target_);
    return {d, std::move(out)};
  }

  const WignerGrid& target() const { return target_; }

 private:
  DensityMatrix rho_;
  VacuumConditioner conditioner_;
  WignerGrid target_;
  WignerErrorEvaluator evaluator_;
  double floor_;
};

inline CatTrainResult optimize_cat_mixing(const CatTaskConfig& cfg) {
  cfg.validate();
  const int n = cfg.params.n_modes;
  std::vector<CatScorer> scorers;
  std::vector<StateHealth> health;
  for (const auto& beta : cfg.beta_list) {
    const DensityMatrix rho = evolve_cat_input(cfg, beta);
    health.push_back(state_health(rho));
    scorers.emplace_back(cfg, rho, beta);
  }
  const RealVector theta0 = RealVector::Zero(n * n);

  CatTrainResult res;
  auto finish = [&](std::size_t i, const RealVector& theta, const NelderMeadResult* nm) {
    CatCase c;
    c.beta = cfg.beta_list[i];
    c.theta = theta;
    c.health = health[i];
    c.initial_delta = scorers[i].cost(theta0);
    try {
      auto [d, out] = scorers[i].evaluate(theta);
      c.delta = d;
      c.probability = out.probability;
      c.output = std::move(out.rho_out);
    } catch (const NumericalFailure&) {
      c.delta = 1.0;
      c.probability = 0.0;
    }
    if (nm) {
      c.iterations = nm->iterations;
      c.history = nm->history;
    }
    res.cases.push_back(std::move(c));
  };

  if (cfg.shared_mixing) {
    auto cost = [&](const RealVector& th) {
      double acc = 0.0;
      for (const auto& s : scorers) acc += s.cost(th);
      return acc / static_cast<double>(scorers.size());
    };
    const auto nm = nelder_mead(cost, theta0, cfg.optimizer);
    for (std::size_t i = 0; i < scorers.size(); ++i) finish(i, nm.x, &nm);
  } else {
    for (std::size_t i = 0; i < scorers.size(); ++i) {
      const auto nm = nelder_mead([&](const RealVector& th) { return scorers[i].cost(th); }, theta0, cfg.optimizer);
      finish(i, nm.x, &nm);
    }
  }
  bool any = false;
  for (const auto& c : res.cases) {
    res.mean_delta += c.delta / static_cast<double>(res.cases.size());
    res.mean_initial_delta += c.initial_delta / static_cast<double>(res.cases.size());
    res.mean_probability += c.probability / static_cast<double>(res.cases.size());
    any = any || c.probability >= cfg.probability_floor;
  }
  if (!any)
    throw NumericalFailure("optimize_cat_mixing: every conditioning fell below the probability floor");
  return res;
}

// ---------------------------------------------------------------------------
// Nonlinearity sweeps

struct SweepRow {
  double alpha = 0.0;
  double error_mean = 0.0;
  double error_std = 0.0;
  double probability_mean = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> errors;         // one per seed
  std::vector<double> probabilities;  // cat task only
  std::vector<double> betas;          // cat task with random beta draws
  std::vector<StateHealth> health;    // worst state report per seed (quantum runs)
  std::vector<double> unitarity;      // worst mixing unitarity error per seed (cat task)
};

struct BetaRange {
  double low = 1.0;
  double high = 1.4;
};

struct CatSweepTask {
  CatTaskConfig base;
  // When set, every seed draws one beta uniformly from the range in place of
  // base.beta_list.
  std::optional<BetaRange> random_beta = BetaRange{};
};

using SweepTask = std::variant<XorTaskConfig, CatSweepTask>;

namespace detail {

inline NetworkParams with_alpha(NetworkParams p, double alpha) {
  p.alpha = alpha;
  return p;
}

template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline void summarize(SweepRow& row) {
  const double n = static_cast<double>(row.errors.size());
  double mean = 0.0;
  for (double e : row.errors) mean += e / n;
  double var = 0.0;
  for (double e : row.errors) var += (e - mean) * (e - mean) / n;
  row.error_mean = mean;
  row.error_std = std::sqrt(var);
  if (!row.probabilities.empty()) {
    row.probability_mean = 0.0;
    for (double p : row.probabilities) row.probability_mean += p / static_cast<double>(row.probabilities.size());
  }
}

}  // namespace detail

// Retrains the task from scratch for every (alpha, seed). Each point owns the
// random stream mix(seed, point index). XOR errors are the max-case error
// (case errors averaged over noise draws first); cat errors are the mean delta.
inline std::vector<SweepRow> sweep_nonlinearity(const SweepTask& task, std::vector<double> alpha_values,
                                                const std::vector<std::uint64_t>& seeds, int jobs = 1) {
  if (alpha_values.empty() || seeds.empty()) throw InvalidArgument("sweep: alpha and seed lists must be non-empty");
  std::sort(alpha_values.begin(), alpha_values.end());
  const std::size_t na = alpha_values.size(), ns = seeds.size();
  std::vector<SweepRow> rows(na);
  for (std::size_t a = 0; a < na; ++a) {
    rows[a].alpha = alpha_values[a];
    rows[a].errors.assign(ns, 0.0);
    rows[a].health.assign(ns, StateHealth{});
  }
  const bool is_cat = std::holds_alternative<CatSweepTask>(task);
  if (is_cat)
    for (auto& r : rows) {
      r.probabilities.assign(ns, 0.0);
      r.betas.assign(ns, 0.0);
      r.unitarity.assign(ns, 0.0);
    }

  detail::parallel_for(na * ns, jobs, [&](std::size_t point) {
    const std::size_t a = point / ns, s = point % ns;
    const std::uint64_t stream = rng::mix(seeds[s], point);
    if (const auto* xor_cfg = std::get_if<XorTaskConfig>(&task)) {
      XorTaskConfig cfg = *xor_cfg;
      cfg.params = detail::with_alpha(cfg.params, alpha_values[a]);
      if (cfg.noise) cfg.noise->seed = stream;
      const XorTrainResult r = train_xor(cfg);
      rows[a].errors[s] = r.error.max_abs;
      for (const auto& h : r.health) rows[a].health[s] = worst_of(rows[a].health[s], h);
    } else {
      const auto& cat = std::get<CatSweepTask>(task);
      CatTaskConfig cfg = cat.base;
      cfg.params = detail::with_alpha(cfg.params, alpha_values[a]);
      if (cat.random_beta) {
        // The beta draw depends on the seed only, so every alpha sees the same inputs.
        cfg.beta_list = {rng::uniform(rng::substream(seeds[s], "beta"), 0, cat.random_beta->low, cat.random_beta->high)};
      }
      const auto r = optimize_cat_mixing(cfg);
      rows[a].errors[s] = r.mean_delta;
      rows[a].probabilities[s] = r.mean_probability;
      rows[a].betas[s] = std::abs(cfg.beta_list.front());
      for (const auto& c : r.cases) {
        rows[a].health[s] = worst_of(rows[a].health[s], c.health);
        rows[a].unitarity[s] = std::max(rows[a].unitarity[s], unitarity_error(unitary_from_generator(c.theta).W));
      }
    }
  });
  for (auto& r : rows) detail::summarize(r);
  return rows;
}

}  // namespace qnn
