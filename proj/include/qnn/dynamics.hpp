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

// Kerr-network Hamiltonians, the Lindblad master equation for photon loss,
// and the classical mean-field counterpart.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qnn/common.hpp"
#include "qnn/fock.hpp"
#include "qnn/integrators.hpp"

namespace qnn {

inline constexpr double kInfiniteKerr = std::numeric_limits<double>::infinity();

// All energies and rates in units of gamma, times in units of 1/gamma.
struct NetworkParams {
  int n_modes = 0;
  double E = 0.0;
  double alpha = 0.0;  // kInfiniteKerr selects hard-core (two-level) modes
  double gamma = 1.0;
  RealMatrix J;        // symmetric, zero diagonal
  Vector P;            // complex pump per mode
  double tau = 1.0;

  bool hard_core() const { return std::isinf(alpha); }

  static NetworkParams uncoupled(int n_modes) {
    NetworkParams p;
    p.n_modes = n_modes;
    p.J = RealMatrix::Zero(n_modes, n_modes);
    p.P = Vector::Zero(n_modes);
    return p;
  }

  void validate() const {
    if (n_modes < 1) throw InvalidArgument("network: n_modes must be >= 1");
    if (J.rows() != n_modes || J.cols() != n_modes)
      throw InvalidArgument("network: J must be n_modes x n_modes");
    if (P.size() != n_modes) throw InvalidArgument("network: P must have n_modes entries");
    if (!((J - J.transpose()).cwiseAbs().maxCoeff() <= 0.0))
      throw InvalidArgument("network: J must be symmetric");
    for (int i = 0; i < n_modes; ++i)
      if (J(i, i) != 0.0) throw InvalidArgument("network: J must have zero diagonal");
    if (!(gamma > 0.0)) throw InvalidArgument("network: gamma must be > 0");
    if (!(tau > 0.0)) throw InvalidArgument("network: tau must be > 0");
    if (!(alpha >= 0.0)) throw InvalidArgument("network: alpha must be >= 0 or infinite");
    if (!std::isfinite(E)) throw InvalidArgument("network: E must be finite");
  }
};

enum class Topology { kChain, kRing };
enum class CouplingDistribution { kUniform, kConstant };

// Nearest-neighbour couplings. Uniform draws lie in [0, j_max] and are a pure
// function of `seed`.
inline RealMatrix nearest_neighbour_couplings(int n_modes, double j_max, std::uint64_t seed,
                                              Topology topology = Topology::kChain,
                                              CouplingDistribution dist = CouplingDistribution::kUniform) {
  RealMatrix J = RealMatrix::Zero(n_modes, n_modes);
  const auto stream = rng::substream(seed, "couplings");
  const int bonds = (topology == Topology::kRing && n_modes > 2) ? n_modes : n_modes - 1;
  for (int b = 0; b < bonds; ++b) {
    const int i = b, j = (b + 1) % n_modes;
    const double v = dist == CouplingDistribution::kUniform
                         ? rng::uniform(stream, static_cast<std::uint64_t>(b), 0.0, j_max)
                         : j_max;
    J(i, j) = v;
    J(j, i) = v;
  }
  return J;
}

// H = sum_i (E n_i + alpha a_i^+ a_i^+ a_i a_i) + sum_{i<j} J_ij (a_i a_j^+ + a_i^+ a_j)
//     [+ sum_i (P_i a_i^+ + P_i^* a_i)].
// In the hard-core limit the Kerr term is dropped and every mode must be
// two-level.
inline Operator build_hamiltonian(const NetworkParams& params, const Basis& basis,
                                  bool include_pump) {
  params.validate();
  if (basis.n_modes() != params.n_modes)
    throw InvalidArgument("build_hamiltonian: basis has " + std::to_string(basis.n_modes()) +
                          " modes, params have " + std::to_string(params.n_modes));
  if (params.hard_core())
    for (int d : basis.mode_dims())
      if (d > 2) throw InvalidArgument("build_hamiltonian: infinite Kerr needs mode dims <= 2");

  const auto dim = static_cast<Eigen::Index>(basis.dim());
  SparseMatrix H(dim, dim);
  {
    std::vector<Triplet> diag;
    diag.reserve(static_cast<std::size_t>(dim));
    for (Eigen::Index s = 0; s < dim; ++s) {
      double e = 0.0;
      for (int i = 0; i < basis.n_modes(); ++i) {
        const double n = basis.occupation(static_cast<std::size_t>(s), i);
        e += params.E * n;
        if (!params.hard_core()) e += params.alpha * n * (n - 1.0);
      }
      diag.emplace_back(static_cast<int>(s), static_cast<int>(s), e);
    }
    H.setFromTriplets(diag.begin(), diag.end());
  }
  std::vector<Operator> a;
  for (int i = 0; i < basis.n_modes(); ++i) a.push_back(mode_annihilation(basis, i));
  for (int i = 0; i < basis.n_modes(); ++i)
    for (int j = i + 1; j < basis.n_modes(); ++j) {
      const double Jij = params.J(i, j);
      if (Jij == 0.0) continue;
      SparseMatrix hop = a[i].matrix.adjoint() * a[j].matrix;
      H += Jij * (hop + SparseMatrix(hop.adjoint()));
    }
  if (include_pump)
    for (int i = 0; i < basis.n_modes(); ++i) {
      const cplx Pi = params.P(i);
      if (Pi == cplx{0.0}) continue;
      H += Pi * SparseMatrix(a[i].matrix.adjoint()) + std::conj(Pi) * a[i].matrix;
    }
  H.prune(cplx{0.0});
  H.makeCompressed();
  return {basis, std::move(H)};
}

// Precomputed Lindblad generator
//   d rho/dt = -i[H, rho] + (gamma/2) sum_i (2 a_i rho a_i^+ - a_i^+ a_i rho - rho a_i^+ a_i)
// written as -i(H_eff rho - rho H_eff^+) + gamma sum_i a_i rho a_i^+ with
// H_eff = H - i(gamma/2) sum_i n_i. The superoperator is never materialized.
class LindbladGenerator {
 public:
  LindbladGenerator(const Operator& H, double gamma, bool dissipative = true)
      : basis_(H.basis), gamma_(dissipative ? gamma : 0.0) {
    const auto dim = static_cast<Eigen::Index>(basis_.dim());
    if (H.matrix.rows() != dim) throw InvalidArgument("lindblad: H does not match its basis");
    h_eff_ = H.matrix;
    if (gamma_ != 0.0) {
      SparseMatrix loss(dim, dim);
      std::vector<Triplet> diag;
      for (Eigen::Index s = 0; s < dim; ++s)
        diag.emplace_back(static_cast<int>(s), static_cast<int>(s),
                          cplx{0.0, -0.5 * gamma_ * basis_.total(static_cast<std::size_t>(s))});
      loss.setFromTriplets(diag.begin(), diag.end());
      h_eff_ += loss;
      for (int i = 0; i < basis_.n_modes(); ++i) {
        JumpMap jm;
        const Operator a = mode_annihilation(basis_, i);
        for (Eigen::Index r = 0; r < a.matrix.outerSize(); ++r)
          for (SparseMatrix::InnerIterator it(a.matrix, r); it; ++it) {
            jm.src.push_back(it.col());
            jm.dst.push_back(it.row());
            jm.coef.push_back(it.value().real());
          }
        sort_by_source(jm);
        jumps_.push_back(std::move(jm));
      }
    }
    h_eff_.makeCompressed();
  }

  const Basis& basis() const { return basis_; }
  const SparseMatrix& effective_hamiltonian() const { return h_eff_; }

  // d rho/dt for Hermitian rho; uses rho H_eff^+ = (H_eff rho)^+.
  void apply_hermitian(const Matrix& rho, Matrix& out) const {
    multiply(rho, work_);
    // out = -i (W - W^+), transposed in cache-sized tiles
    const Eigen::Index d = rho.rows();
    constexpr Eigen::Index kTile = 32;
    out.resize(d, d);
    for (Eigen::Index jb = 0; jb < d; jb += kTile)
      for (Eigen::Index ib = 0; ib < d; ib += kTile) {
        const Eigen::Index je = std::min(d, jb + kTile), ie = std::min(d, ib + kTile);
        for (Eigen::Index j = jb; j < je; ++j)
          for (Eigen::Index i = ib; i < ie; ++i) {
            const cplx a = work_(i, j), c = work_(j, i);
            out(i, j) = cplx{a.imag() + c.imag(), c.real() - a.real()};
          }
      }
    add_jumps(rho, out);
  }

  // d rho/dt for an arbitrary matrix.
  void apply(const Matrix& rho, Matrix& out) const {
    work_.noalias() = h_eff_ * rho;
    Matrix right = h_eff_ * rho.adjoint();
    out.noalias() = -kI * work_;
    out.noalias() += kI * right.adjoint();
    add_jumps(rho, out);
  }

 private:
  struct JumpMap {
    std::vector<Eigen::Index> src, dst;
    std::vector<double> coef;
  };

  // y = H_eff x, one contiguous column of x at a time.
  void multiply(const Matrix& x, Matrix& y) const {
    const Eigen::Index d = x.rows();
    y.resize(d, x.cols());
    const int* outer = h_eff_.outerIndexPtr();
    const int* inner = h_eff_.innerIndexPtr();
    const cplx* val = h_eff_.valuePtr();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const cplx* xc = x.col(j).data();
      cplx* yc = y.col(j).data();
      for (Eigen::Index i = 0; i < d; ++i) {
        cplx acc = 0.0;
        for (int k = outer[i]; k < outer[i + 1]; ++k) acc += val[k] * xc[inner[k]];
        yc[i] = acc;
      }
    }
  }

  static void sort_by_source(JumpMap& jm) {
    std::vector<std::size_t> order(jm.src.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return jm.src[x] < jm.src[y]; });
    JumpMap s;
    for (auto o : order) {
      s.src.push_back(jm.src[o]);
      s.dst.push_back(jm.dst[o]);
      s.coef.push_back(jm.coef[o]);
    }
    jm = std::move(s);
  }

  void add_jumps(const Matrix& rho, Matrix& out) const {
    for (const auto& jm : jumps_) {
      const std::size_t L = jm.src.size();
      for (std::size_t c = 0; c < L; ++c) {
        const double gc = gamma_ * jm.coef[c];
        const cplx* in_col = rho.col(jm.src[c]).data();
        cplx* out_col = out.col(jm.dst[c]).data();
        for (std::size_t r = 0; r < L; ++r) out_col[jm.dst[r]] += (gc * jm.coef[r]) * in_col[jm.src[r]];
      }
    }
  }

  Basis basis_;
  double gamma_;
  SparseMatrix h_eff_;
  std::vector<JumpMap> jumps_;
  mutable Matrix work_;
};

inline Matrix lindblad_derivative(const DensityMatrix& rho, const Operator& H,
                                  const NetworkParams& params) {
  if (!(rho.basis == H.basis)) throw InvalidArgument("lindblad_derivative: basis mismatch");
  LindbladGenerator gen(H, params.gamma);
  Matrix out;
  gen.apply(rho.entries, out);
  return out;
}

enum class Method { kRk4, kAdaptive };

struct EvolutionConfig {
  std::optional<double> dt;         // default tau / 1e4
  Method method = Method::kRk4;
  double atol = 1e-10;              // adaptive method only
  std::vector<double> record_times; // sorted, within (0, tau]
  bool dissipative = true;          // false switches the loss term off
  bool include_pump = true;
  double trace_tolerance = 1e-8;

  double step_for(double tau) const {
    const double h = dt.value_or(tau / 1e4);
    if (!(h > 0.0)) throw InvalidArgument("evolution: dt must be > 0");
    if (h > tau * (1.0 + 1e-12)) throw InvalidArgument("evolution: dt must not exceed tau");
    return h;
  }
};

struct Evolution {
  DensityMatrix final_state;
  std::vector<double> times;
  std::vector<DensityMatrix> samples;
  long steps = 0;
};

namespace detail {

// Breaks [0, tau] at the record times; returns the segment end points.
inline std::vector<double> checkpoints(const std::vector<double>& record, double tau) {
  std::vector<double> pts;
  double last = 0.0;
  for (double t : record) {
    if (!(t > last) || t > tau) throw InvalidArgument("evolution: record_times must increase within (0, tau]");
    pts.push_back(t);
    last = t;
  }
  if (pts.empty() || pts.back() < tau) pts.push_back(tau);
  return pts;
}

inline int steps_for(double span, double h) {
  return std::max(1, static_cast<int>(std::ceil(span / h - 1e-9)));
}

}  // namespace detail

inline Evolution evolve_master_equation(const DensityMatrix& rho0, const NetworkParams& params,
                                        const EvolutionConfig& cfg = {}) {
  params.validate();
  if (rho0.basis.n_modes() != params.n_modes)
    throw InvalidArgument("evolve_master_equation: basis/params mode count mismatch");
  const double h_nominal = cfg.step_for(params.tau);
  const Operator H = build_hamiltonian(params, rho0.basis, cfg.include_pump);
  const LindbladGenerator gen(H, params.gamma, cfg.dissipative);

  Matrix rho = rho0.entries;
  const cplx trace0 = rho.trace();
  auto rhs = [&gen](double, const Matrix& y, Matrix& dy) { gen.apply_hermitian(y, dy); };
  // |rho_ij| <= Tr rho for any density matrix; a blown-up step violates it
  // even when the diagonal (and hence the trace) is untouched.
  const double entry_bound = std::abs(trace0) * (1.0 + 1e-6);
  auto check = [&](double t) {
    const double drift = std::abs(rho.trace() - trace0);
    if (!(drift <= cfg.trace_tolerance))
      throw NumericalFailure("evolve_master_equation: trace drift " + std::to_string(drift) +
                             " at t=" + std::to_string(t) + "; reduce dt");
    const double peak = rho.cwiseAbs().maxCoeff();
    if (!(peak <= entry_bound))
      throw NumericalFailure("evolve_master_equation: step instability at t=" + std::to_string(t) +
                             " (|rho_ij| = " + std::to_string(peak) + "); reduce dt");
  };

  Evolution ev;
  const auto pts = detail::checkpoints(cfg.record_times, params.tau);
  ode::Rk4<Matrix> rk4;
  ode::Dopri5<Matrix> dopri(cfg.atol);
  double t = 0.0;
  for (double target : pts) {
    const double span = target - t;
    if (cfg.method == Method::kRk4) {
      const int n = detail::steps_for(span, h_nominal);
      const double h = span / n;
      for (int s = 0; s < n; ++s) {
        rk4.step(rhs, t + s * h, rho, h);
        rho = 0.5 * (rho + rho.adjoint()).eval();
        check(t + (s + 1) * h);
      }
      ev.steps += n;
    } else {
      ev.steps += dopri.integrate(rhs, t, target, rho, h_nominal);
      rho = 0.5 * (rho + rho.adjoint()).eval();
      check(target);
    }
    t = target;
    if (std::find(cfg.record_times.begin(), cfg.record_times.end(), target) != cfg.record_times.end()) {
      ev.times.push_back(target);
      ev.samples.push_back({rho0.basis, rho});
    }
  }
  ev.final_state = {rho0.basis, std::move(rho)};
  return ev;
}

struct MeanFieldState {
  Vector psi;
};

struct MeanFieldEvolution {
  MeanFieldState final_state;
  std::vector<double> times;
  std::vector<MeanFieldState> samples;
};

// i dpsi_i/dt = (E - i gamma/2) psi_i + 2 alpha |psi_i|^2 psi_i + sum_j J_ij psi_j + P_i
inline void mean_field_rhs(const NetworkParams& params, bool include_pump, const Vector& psi,
                           Vector& dpsi) {
  const cplx onsite{params.E, -0.5 * params.gamma};
  dpsi = params.J.cast<cplx>() * psi;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    dpsi(i) += onsite * psi(i) + 2.0 * params.alpha * std::norm(psi(i)) * psi(i);
    if (include_pump) dpsi(i) += params.P(i);
  }
  dpsi *= -kI;
}

inline MeanFieldEvolution evolve_mean_field(const MeanFieldState& psi0, const NetworkParams& params,
                                            const EvolutionConfig& cfg = {}) {
  params.validate();
  if (params.hard_core()) throw InvalidArgument("evolve_mean_field: infinite Kerr has no mean-field form");
  if (psi0.psi.size() != params.n_modes) throw InvalidArgument("evolve_mean_field: psi size mismatch");
  const double h_nominal = cfg.step_for(params.tau);
  auto rhs = [&](double, const Vector& y, Vector& dy) { mean_field_rhs(params, cfg.include_pump, y, dy); };
  Vector psi = psi0.psi;
  auto check = [&](double t) {
    const double m = psi.cwiseAbs().maxCoeff();
    if (!std::isfinite(m) || m > 1e150)
      throw NumericalFailure("evolve_mean_field: amplitude diverged at t=" + std::to_string(t));
  };
  MeanFieldEvolution ev;
  ode::Rk4<Vector> rk4;
  ode::Dopri5<Vector> dopri(cfg.atol);
  double t = 0.0;
  for (double target : detail::checkpoints(cfg.record_times, params.tau)) {
    const double span = target - t;
    if (cfg.method == Method::kRk4) {
      const int n = detail::steps_for(span, h_nominal);
      const double h = span / n;
      for (int s = 0; s < n; ++s) {
        rk4.step(rhs, t + s * h, psi, h);
        check(t + (s + 1) * h);
      }
    } else {
      dopri.integrate(rhs, t, target, psi, h_nominal);
      check(target);
    }
    t = target;
    if (std::find(cfg.record_times.begin(), cfg.record_times.end(), target) != cfg.record_times.end()) {
      ev.times.push_back(target);
      ev.samples.push_back({psi});
    }
  }
  ev.final_state = {std::move(psi)};
  return ev;
}

struct ThroughputReport {
  long applications = 0;
  double seconds = 0.0;
  double applications_per_second = 0.0;
};

// Times `steps` applications of the Lindblad generator on a fixed state.
inline ThroughputReport liouvillian_apply_count_benchmark(const NetworkParams& params,
                                                          const Basis& basis, long steps) {
  const Operator H = build_hamiltonian(params, basis, true);
  const LindbladGenerator gen(H, params.gamma);
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  Matrix rho = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  Matrix out(dim, dim);
  const auto start = std::chrono::steady_clock::now();
  for (long s = 0; s < steps; ++s) gen.apply_hermitian(rho, out);
  const auto stop = std::chrono::steady_clock::now();
  ThroughputReport r;
  r.applications = steps;
  r.seconds = std::max(std::chrono::duration<double>(stop - start).count(), 1e-12);
  r.applications_per_second = static_cast<double>(steps) / r.seconds;
  // Keeps the loop observable.
  if (!std::isfinite(out(0, 0).real())) r.applications_per_second = 0.0;
  return r;
}

}  // namespace qnn
