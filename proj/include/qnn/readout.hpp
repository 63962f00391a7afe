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

// Classical outputs (occupations, noisy measurement, affine readout) and
// quantum outputs (passive linear mixing and vacuum conditioning).

#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qnn/common.hpp"
#include "qnn/fock.hpp"

namespace qnn {

// <n_i> = Tr{a_i^+ a_i rho} for every mode.
inline RealVector occupations(const DensityMatrix& rho, double negativity_tolerance = 1e-8) {
  const Basis& b = rho.basis;
  RealVector n = RealVector::Zero(b.n_modes());
  for (std::size_t s = 0; s < b.dim(); ++s) {
    const double p = rho.entries(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
    for (int i = 0; i < b.n_modes(); ++i) n(i) += p * b.occupation(s, i);
  }
  for (int i = 0; i < n.size(); ++i) {
    if (n(i) < -negativity_tolerance)
      throw NumericalFailure("occupations: <n_" + std::to_string(i) + "> = " + std::to_string(n(i)) +
                             " is negative; the integrated state is unhealthy");
    n(i) = std::max(n(i), 0.0);
  }
  return n;
}

struct NoiseModel {
  double low = 0.0;
  double high = 0.8;
  std::uint64_t seed = 0;
  int samples = 100;

  void validate() const {
    if (!(0.0 <= low && low <= high)) throw InvalidArgument("noise: need 0 <= low <= high");
    if (samples < 1) throw InvalidArgument("noise: samples must be >= 1");
  }
};

// out_i = n_i (1 + u_i), u_i ~ U[low, high], addressed by (seed, draw_index, i).
inline RealVector apply_measurement_noise(const RealVector& n, const NoiseModel& model,
                                          std::uint64_t draw_index) {
  model.validate();
  const auto stream = rng::mix(model.seed, draw_index);
  RealVector out(n.size());
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    if (n(i) < 0.0) throw InvalidArgument("apply_measurement_noise: negative occupation");
    out(i) = n(i) * (1.0 + rng::uniform(stream, static_cast<std::uint64_t>(i), model.low, model.high));
  }
  return out;
}

inline RealVector linear_readout(const RealVector& features, const RealMatrix& weights,
                                 const RealVector& bias) {
  if (weights.cols() != features.size() || weights.rows() != bias.size())
    throw InvalidArgument("linear_readout: shape mismatch");
  return weights * features + bias;
}

inline double unitarity_error(const Matrix& W) {
  return (W.adjoint() * W - Matrix::Identity(W.rows(), W.cols())).cwiseAbs().maxCoeff();
}

// Unitary W = exp(-i h) on the mode space, with its Hermitian generator h.
struct MixingMatrix {
  Matrix W;
  Matrix generator;

  int n_modes() const { return static_cast<int>(W.rows()); }

  static MixingMatrix from_generator(const Matrix& h) {
    if (h.rows() != h.cols()) throw InvalidArgument("mixing: generator must be square");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidArgument("mixing: generator must be Hermitian");
    const Matrix herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    const Vector phases = (-kI * es.eigenvalues().cast<cplx>()).array().exp();
    return {es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint(), herm};
  }

  // Principal generator h = i log W from the (diagonal) Schur form of W.
  static MixingMatrix from_unitary(const Matrix& W, double tolerance = 1e-10) {
    if (W.rows() != W.cols()) throw InvalidArgument("mixing: W must be square");
    const double err = unitarity_error(W);
    if (err > tolerance)
      throw InvalidArgument("mixing: W is not unitary (max|W^+W - I| = " + std::to_string(err) + ")");
    Eigen::ComplexSchur<Matrix> schur(W);
    const Matrix& Q = schur.matrixU();
    Vector theta(W.rows());
    for (Eigen::Index k = 0; k < W.rows(); ++k) theta(k) = -std::arg(schur.matrixT()(k, k));
    Matrix h = Q * theta.asDiagonal() * Q.adjoint();
    h = 0.5 * (h + h.adjoint()).eval();
    return {W, h};
  }
};

namespace detail {

// Basis indices grouped by total excitation number.
inline std::map<int, std::vector<Eigen::Index>> number_sectors(const Basis& basis) {
  std::map<int, std::vector<Eigen::Index>> sectors;
  for (std::size_t s = 0; s < basis.dim(); ++s)
    sectors[basis.total(s)].push_back(static_cast<Eigen::Index>(s));
  return sectors;
}

}  // namespace detail

// Fock-space unitary U = exp(-i sum_ij h_ij a_i^+ a_j), so that
// U^+ a_k U = sum_j W_kj a_j. Built sector by sector in total excitation
// number; exact on total-capped bases.
inline Operator mixing_unitary(const MixingMatrix& mix, const Basis& basis) {
  if (mix.n_modes() != basis.n_modes()) throw InvalidArgument("mixing_unitary: mode count mismatch");
  const double err = unitarity_error(mix.W);
  if (err > 1e-10) throw InvalidArgument("mixing_unitary: W is not unitary");
  if (!basis.total_cap()) {
    const auto& d = basis.mode_dims();
    if (std::adjacent_find(d.begin(), d.end(), std::not_equal_to<>()) != d.end())
      throw InvalidArgument("mixing_unitary: product basis needs equal mode dims");
  }
  std::vector<Triplet> gen_trips;
  std::vector<Operator> a;
  for (int i = 0; i < basis.n_modes(); ++i) a.push_back(mode_annihilation(basis, i));
  SparseMatrix G(static_cast<Eigen::Index>(basis.dim()), static_cast<Eigen::Index>(basis.dim()));
  for (int i = 0; i < basis.n_modes(); ++i)
    for (int j = 0; j < basis.n_modes(); ++j) {
      const cplx hij = mix.generator(i, j);
      if (hij == cplx{0.0}) continue;
      G += hij * SparseMatrix(SparseMatrix(a[i].matrix.adjoint()) * a[j].matrix);
    }
  const Matrix Gd(G);
  std::vector<Triplet> trips;
  for (const auto& [n, idx] : detail::number_sectors(basis)) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix block(m, m);
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index c = 0; c < m; ++c) block(r, c) = Gd(idx[r], idx[c]);
    block = 0.5 * (block + block.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(block);
    const Vector phases = (-kI * es.eigenvalues().cast<cplx>()).array().exp();
    const Matrix U = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index c = 0; c < m; ++c)
        if (std::abs(U(r, c)) > 0.0)
          trips.emplace_back(static_cast<int>(idx[r]), static_cast<int>(idx[c]), U(r, c));
  }
  SparseMatrix U(G.rows(), G.cols());
  U.setFromTriplets(trips.begin(), trips.end());
  return {basis, std::move(U)};
}

struct ConditionedOutput {
  DensityMatrix rho_out;  // single mode
  double probability = 0.0;
};

inline constexpr double kProbabilityFloor = 1e-12;

namespace detail {

inline ConditionedOutput normalize_block(Matrix M, double floor) {
  const double p = M.trace().real();
  if (!(p >= floor))
    throw NumericalFailure("condition_on_vacuum: vacuum condition almost never satisfied (p = " +
                           std::to_string(p) + ")");
  M /= p;
  M = 0.5 * (M + M.adjoint()).eval();
  const int levels = static_cast<int>(M.rows());
  return {{build_basis({levels}), std::move(M)}, p};
}

// Smallest number-complete basis (all modes dims cap+1, total cap) that
// contains `basis`.
inline Basis number_complete(const Basis& basis) {
  const int cap = basis.max_total();
  return build_basis(std::vector<int>(basis.n_modes(), cap + 1), cap);
}

}  // namespace detail

// Mixes the network modes with U(W), then projects every mode except
// `output_mode` onto vacuum. The state is first embedded in a number-complete
// basis, so the mixing is exact even for per-mode (e.g. hard-core) truncations.
inline ConditionedOutput condition_on_vacuum(const DensityMatrix& rho, const MixingMatrix& mix,
                                             int output_mode, double floor = kProbabilityFloor) {
  check_mode(rho.basis, output_mode, "condition_on_vacuum");
  const Basis full = detail::number_complete(rho.basis);
  const DensityMatrix big = (full == rho.basis) ? rho : embed(rho, full);
  const Operator U = mixing_unitary(mix, full);
  const int cap = full.max_total();
  std::vector<int> occ(full.n_modes(), 0);
  Matrix V(cap + 1, static_cast<Eigen::Index>(full.dim()));
  for (int n = 0; n <= cap; ++n) {
    occ[output_mode] = n;
    const auto row = static_cast<Eigen::Index>(*full.index_of(occ));
    V.row(n) = Matrix(U.matrix.row(row));
  }
  return detail::normalize_block(V * big.entries * V.adjoint(), floor);
}

// Vacuum-conditioned output computed from the closed-form rows
//   <n, 0, ..., 0| U |m> = delta(n, |m|) sqrt(n! / prod m_j!) prod_j W_{o j}^{m_j},
// with the output mode in slot o. Equivalent to condition_on_vacuum but costs
// O(dim^2) and never builds U.
class VacuumConditioner {
 public:
  VacuumConditioner(const Basis& basis, int output_mode)
      : basis_(basis), output_mode_(output_mode), levels_(basis.max_total() + 1) {
    check_mode(basis, output_mode, "VacuumConditioner");
    log_multinomial_.resize(basis.dim());
    std::vector<double> lf(levels_ + 1, 0.0);
    for (int k = 1; k <= levels_; ++k) lf[k] = lf[k - 1] + std::log(static_cast<double>(k));
    for (std::size_t s = 0; s < basis.dim(); ++s) {
      double v = 0.5 * lf[basis.total(s)];
      for (int i = 0; i < basis.n_modes(); ++i) v -= 0.5 * lf[basis.occupation(s, i)];
      log_multinomial_[s] = v;
    }
  }

  int levels() const { return levels_; }

  // Unnormalized conditioned block M (levels x levels).
  Matrix block(const Matrix& rho, const Matrix& W) const {
    const auto dim = basis_.dim();
    Vector v(static_cast<Eigen::Index>(dim));
    const int nm = basis_.n_modes();
    for (std::size_t s = 0; s < dim; ++s) {
      cplx c = std::exp(log_multinomial_[s]);
      for (int j = 0; j < nm; ++j) {
        const int m = basis_.occupation(s, j);
        if (m) c *= std::pow(W(output_mode_, j), m);
      }
      v(static_cast<Eigen::Index>(s)) = c;
    }
    Matrix M = Matrix::Zero(levels_, levels_);
    for (std::size_t b = 0; b < dim; ++b) {
      const cplx vb = std::conj(v(static_cast<Eigen::Index>(b)));
      if (vb == cplx{0.0}) continue;
      const int nb = basis_.total(b);
      const cplx* col = rho.col(static_cast<Eigen::Index>(b)).data();
      for (std::size_t a = 0; a < dim; ++a)
        M(basis_.total(a), nb) += v(static_cast<Eigen::Index>(a)) * col[a] * vb;
    }
    return M;
  }

  ConditionedOutput condition(const DensityMatrix& rho, const MixingMatrix& mix,
                              double floor = kProbabilityFloor) const {
    if (!(rho.basis == basis_)) throw InvalidArgument("VacuumConditioner: basis mismatch");
    if (mix.n_modes() != basis_.n_modes()) throw InvalidArgument("VacuumConditioner: mode count mismatch");
    return detail::normalize_block(block(rho.entries, mix.W), floor);
  }

 private:
  Basis basis_;
  int output_mode_;
  int levels_;
  std::vector<double> log_multinomial_;
};

}  // namespace qnn
