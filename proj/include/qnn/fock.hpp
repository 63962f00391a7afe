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

// Truncated multimode Fock spaces: bases, ladder operators, and the
// canonical single-mode states (coherent, cat).

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qnn/common.hpp"

namespace qnn {

// Enumeration of admissible multi-indices (n_1, ..., n_N) with n_i < d_i and,
// optionally, sum n_i <= total_cap. States are ordered lexicographically with
// mode 0 varying slowest. Copies share the underlying tables.
class Basis {
 public:
  Basis() = default;

  Basis(std::vector<int> mode_dims, std::optional<int> total_cap)
      : data_(std::make_shared<Data>()) {
    if (mode_dims.empty()) throw InvalidArgument("basis: empty mode list");
    for (int d : mode_dims)
      if (d < 1) throw InvalidArgument("basis: mode dimension must be >= 1");
    if (total_cap && *total_cap < 0)
      throw InvalidArgument("basis: total_cap must be non-negative");
    auto& D = *data_;
    D.dims = std::move(mode_dims);
    D.cap = total_cap;
    const int n = static_cast<int>(D.dims.size());
    D.strides.assign(n, 1);
    for (int i = n - 2; i >= 0; --i)
      D.strides[i] = D.strides[i + 1] * static_cast<std::uint64_t>(D.dims[i + 1]);

    std::vector<int> occ(n, 0);
    int total = 0;
    // Odometer walk in lexicographic order, skipping over-cap branches.
    while (true) {
      if (!D.cap || total <= *D.cap) {
        D.codes.push_back(encode(occ));
        D.occupations.insert(D.occupations.end(), occ.begin(), occ.end());
        D.totals.push_back(total);
      }
      int i = n - 1;
      while (i >= 0) {
        if (occ[i] + 1 < D.dims[i] && (!D.cap || total + 1 <= *D.cap)) {
          ++occ[i];
          ++total;
          break;
        }
        total -= occ[i];
        occ[i] = 0;
        --i;
      }
      if (i < 0) break;
    }
  }

  std::size_t dim() const { return data_ ? data_->codes.size() : 0; }
  int n_modes() const { return static_cast<int>(data_->dims.size()); }
  const std::vector<int>& mode_dims() const { return data_->dims; }
  std::optional<int> total_cap() const { return data_->cap; }

  // Occupation of `mode` in basis state `index`.
  int occupation(std::size_t index, int mode) const {
    return data_->occupations[index * data_->dims.size() + mode];
  }

  std::span<const int> state(std::size_t index) const {
    const auto n = data_->dims.size();
    return {data_->occupations.data() + index * n, n};
  }

  int total(std::size_t index) const { return data_->totals[index]; }

  int max_total() const {
    return *std::max_element(data_->totals.begin(), data_->totals.end());
  }

  // Flat index of a multi-index, or nullopt when it lies outside the basis.
  std::optional<std::size_t> index_of(std::span<const int> occ) const {
    if (occ.size() != data_->dims.size()) return std::nullopt;
    int total = 0;
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (occ[i] < 0 || occ[i] >= data_->dims[i]) return std::nullopt;
      total += occ[i];
    }
    if (data_->cap && total > *data_->cap) return std::nullopt;
    const auto code = encode(occ);
    auto it = std::lower_bound(data_->codes.begin(), data_->codes.end(), code);
    if (it == data_->codes.end() || *it != code) return std::nullopt;
    return static_cast<std::size_t>(it - data_->codes.begin());
  }

  bool operator==(const Basis& other) const {
    if (data_ == other.data_) return true;
    if (!data_ || !other.data_) return false;
    return data_->dims == other.data_->dims && data_->cap == other.data_->cap;
  }

  std::string describe() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < data_->dims.size(); ++i)
      os << (i ? "," : "") << data_->dims[i];
    os << "]";
    if (data_->cap) os << " cap " << *data_->cap;
    return os.str();
  }

 private:
  struct Data {
    std::vector<int> dims;
    std::optional<int> cap;
    std::vector<std::uint64_t> strides;
    std::vector<std::uint64_t> codes;  // mixed-radix, sorted
    std::vector<int> occupations;      // dim x n_modes, row-major
    std::vector<int> totals;
  };

  std::uint64_t encode(std::span<const int> occ) const {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < occ.size(); ++i)
      code += static_cast<std::uint64_t>(occ[i]) * data_->strides[i];
    return code;
  }

  std::shared_ptr<Data> data_;
};

inline Basis build_basis(std::vector<int> mode_dims,
                         std::optional<int> total_cap = std::nullopt) {
  return Basis(std::move(mode_dims), total_cap);
}

// Sparse complex matrix acting on a basis.
struct Operator {
  Basis basis;
  SparseMatrix matrix;

  Operator adjoint() const { return {basis, SparseMatrix(matrix.adjoint())}; }
  Matrix dense() const { return Matrix(matrix); }
};

inline Operator operator*(const Operator& a, const Operator& b) {
  if (!(a.basis == b.basis)) throw InvalidArgument("operator product: basis mismatch");
  return {a.basis, SparseMatrix(a.matrix * b.matrix)};
}

inline Operator operator+(const Operator& a, const Operator& b) {
  if (!(a.basis == b.basis)) throw InvalidArgument("operator sum: basis mismatch");
  return {a.basis, SparseMatrix(a.matrix + b.matrix)};
}

struct StateVector {
  Basis basis;
  Vector amplitudes;
  // Norm^2 lost to truncation before renormalization.
  double truncated_weight = 0.0;
};

struct DensityMatrix {
  Basis basis;
  Matrix entries;

  double trace() const { return entries.trace().real(); }
};

inline DensityMatrix to_density(const StateVector& psi) {
  return {psi.basis, psi.amplitudes * psi.amplitudes.adjoint()};
}

// Fock state |n_1, ..., n_N> as a pure state.
inline StateVector fock_state(const Basis& basis, std::span<const int> occ) {
  auto idx = basis.index_of(occ);
  if (!idx) throw InvalidArgument("fock_state: occupation outside basis");
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));
  amps(static_cast<Eigen::Index>(*idx)) = 1.0;
  return {basis, std::move(amps), 0.0};
}

inline StateVector vacuum(const Basis& basis) {
  std::vector<int> zeros(basis.n_modes(), 0);
  return fock_state(basis, zeros);
}

inline void check_mode(const Basis& basis, int mode, const char* who) {
  if (mode < 0 || mode >= basis.n_modes())
    throw InvalidArgument(std::string(who) + ": mode " + std::to_string(mode) +
                          " out of range");
}

inline Operator mode_annihilation(const Basis& basis, int mode) {
  check_mode(basis, mode, "mode_annihilation");
  const auto dim = basis.dim();
  std::vector<Triplet> trips;
  trips.reserve(dim);
  std::vector<int> occ(basis.n_modes());
  for (std::size_t col = 0; col < dim; ++col) {
    const int n = basis.occupation(col, mode);
    if (n == 0) continue;
    auto s = basis.state(col);
    std::copy(s.begin(), s.end(), occ.begin());
    --occ[mode];
    // Lowering never leaves a lexicographic/capped basis.
    const auto row = *basis.index_of(occ);
    trips.emplace_back(static_cast<int>(row), static_cast<int>(col),
                       std::sqrt(static_cast<double>(n)));
  }
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(trips.begin(), trips.end());
  return {basis, std::move(m)};
}

inline Operator mode_creation(const Basis& basis, int mode) {
  return mode_annihilation(basis, mode).adjoint();
}

inline Operator number_operator(const Basis& basis, int mode) {
  check_mode(basis, mode, "number_operator");
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  SparseMatrix m(dim, dim);
  m.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (Eigen::Index i = 0; i < dim; ++i)
    m.insert(i, i) = static_cast<double>(basis.occupation(static_cast<std::size_t>(i), mode));
  m.makeCompressed();
  return {basis, std::move(m)};
}

inline Operator total_number_operator(const Basis& basis) {
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  SparseMatrix m(dim, dim);
  m.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (Eigen::Index i = 0; i < dim; ++i)
    m.insert(i, i) = static_cast<double>(basis.total(static_cast<std::size_t>(i)));
  m.makeCompressed();
  return {basis, std::move(m)};
}

inline Operator identity_operator(const Basis& basis) {
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  SparseMatrix m(dim, dim);
  m.setIdentity();
  return {basis, std::move(m)};
}

// Untruncated coherent-state coefficients e^{-|b|^2/2} b^n / sqrt(n!) for
// n < levels, by recurrence.
inline std::vector<cplx> coherent_coefficients(cplx beta, int levels) {
  std::vector<cplx> c(static_cast<std::size_t>(std::max(levels, 0)));
  if (levels <= 0) return c;
  c[0] = std::exp(-0.5 * std::norm(beta));
  for (int n = 1; n < levels; ++n)
    c[n] = c[n - 1] * beta / std::sqrt(static_cast<double>(n));
  return c;
}

inline constexpr double kTruncationWarnThreshold = 1e-6;

inline void report_truncation(double lost, const char* what) {
  if (lost > kTruncationWarnThreshold) {
    std::ostringstream os;
    os << what << ": truncated weight " << lost
       << " exceeds 1e-6; increase the Fock cutoff";
    warn(os.str());
  }
}

// Product coherent state with one amplitude per mode, restricted to the basis
// and renormalized.
inline StateVector coherent_state(const Basis& basis, std::span<const cplx> amplitudes) {
  if (static_cast<int>(amplitudes.size()) != basis.n_modes())
    throw InvalidArgument("coherent_state: need one amplitude per mode");
  std::vector<std::vector<cplx>> per_mode;
  for (int i = 0; i < basis.n_modes(); ++i) {
    if (!std::isfinite(amplitudes[i].real()) || !std::isfinite(amplitudes[i].imag()))
      throw InvalidArgument("coherent_state: non-finite amplitude");
    per_mode.push_back(coherent_coefficients(amplitudes[i], basis.mode_dims()[i]));
  }
  const auto dim = basis.dim();
  Vector amps(static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    cplx a = 1.0;
    for (int i = 0; i < basis.n_modes(); ++i) a *= per_mode[i][basis.occupation(s, i)];
    amps(static_cast<Eigen::Index>(s)) = a;
  }
  const double kept = amps.squaredNorm();
  const double lost = std::max(0.0, 1.0 - kept);
  report_truncation(lost, "coherent_state");
  if (kept <= 0.0) throw NumericalFailure("coherent_state: no weight inside the basis");
  amps /= std::sqrt(kept);
  return {basis, std::move(amps), lost};
}

inline StateVector coherent_state(const Basis& basis, std::initializer_list<cplx> amplitudes) {
  std::vector<cplx> v(amplitudes);
  return coherent_state(basis, std::span<const cplx>(v));
}

// Analytic normalization sqrt(2[1 + (-1)^k e^{-2|b|^2}]) of |b> + (-1)^k |-b>.
inline double cat_normalization(cplx beta, int k) {
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return std::sqrt(2.0 * (1.0 + sign * std::exp(-2.0 * std::norm(beta))));
}

// (|b> + (-1)^k |-b>) / N on a single mode with `dim` levels.
inline StateVector cat_state(cplx beta, int k, int dim) {
  if (k != 0 && k != 1) throw InvalidArgument("cat_state: parity k must be 0 or 1");
  if (dim < 1) throw InvalidArgument("cat_state: dim must be >= 1");
  const auto basis = build_basis({dim});
  const auto c = coherent_coefficients(beta, dim);
  Vector amps(dim);
  // <n|-b> = (-1)^n <n|b>, so only one parity survives.
  for (int n = 0; n < dim; ++n) {
    const bool keep = ((n + k) % 2 == 0);
    amps(n) = keep ? 2.0 * c[n] : cplx{0.0};
  }
  const double kept = amps.squaredNorm();
  const double norm = cat_normalization(beta, k);
  if (norm < 1e-150 || kept < 1e-300)
    throw NumericalFailure("cat_state: vanishing norm (odd cat with beta -> 0)");
  const double lost = std::max(0.0, 1.0 - kept / (norm * norm));
  report_truncation(lost, "cat_state");
  amps /= std::sqrt(kept);
  return {basis, std::move(amps), lost};
}

// Smallest single-mode cutoff whose truncated coherent weight at |beta| is
// below `tolerance`.
inline int cutoff_for(cplx beta, double tolerance = 1e-12, int max_dim = 400) {
  const double mean = std::norm(beta);
  double term = std::exp(-mean);
  double acc = term;
  for (int n = 1; n < max_dim; ++n) {
    if (1.0 - acc < tolerance && n > mean) return n;
    term *= mean / n;
    acc += term;
  }
  return max_dim;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const Basis& basis = rho.basis;
  if (keep.empty()) throw InvalidArgument("partial_trace: keep list is empty");
  std::vector<bool> kept(basis.n_modes(), false);
  for (int m : keep) {
    check_mode(basis, m, "partial_trace");
    if (kept[m]) throw InvalidArgument("partial_trace: duplicate mode index");
    kept[m] = true;
  }
  std::vector<int> keep_sorted(keep.begin(), keep.end());
  std::sort(keep_sorted.begin(), keep_sorted.end());
  std::vector<int> dims;
  for (int m : keep_sorted) dims.push_back(basis.mode_dims()[m]);
  const Basis reduced(dims, basis.total_cap());

  // Group full-basis states by their traced-out pattern; only pairs within a
  // group contribute.
  const auto dim = basis.dim();
  std::vector<std::pair<std::vector<int>, std::size_t>> tagged;
  std::vector<std::size_t> reduced_index(dim);
  std::vector<int> occ_keep(keep_sorted.size());
  tagged.reserve(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    std::vector<int> rest;
    for (int m = 0; m < basis.n_modes(); ++m)
      if (!kept[m]) rest.push_back(basis.occupation(s, m));
    for (std::size_t j = 0; j < keep_sorted.size(); ++j)
      occ_keep[j] = basis.occupation(s, keep_sorted[j]);
    reduced_index[s] = *reduced.index_of(occ_keep);
    tagged.emplace_back(std::move(rest), s);
  }
  std::stable_sort(tagged.begin(), tagged.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  const auto rdim = static_cast<Eigen::Index>(reduced.dim());
  Matrix out = Matrix::Zero(rdim, rdim);
  for (std::size_t g = 0; g < tagged.size();) {
    std::size_t e = g;
    while (e < tagged.size() && tagged[e].first == tagged[g].first) ++e;
    for (std::size_t a = g; a < e; ++a)
      for (std::size_t b = g; b < e; ++b) {
        const auto sa = tagged[a].second, sb = tagged[b].second;
        out(static_cast<Eigen::Index>(reduced_index[sa]),
            static_cast<Eigen::Index>(reduced_index[sb])) +=
            rho.entries(static_cast<Eigen::Index>(sa), static_cast<Eigen::Index>(sb));
      }
    g = e;
  }
  return {reduced, std::move(out)};
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  std::vector<int> v(keep);
  return partial_trace(rho, std::span<const int>(v));
}

// Tr{op rho}.
inline cplx expectation(const DensityMatrix& rho, const Operator& op) {
  if (!(rho.basis == op.basis)) throw InvalidArgument("expectation: basis mismatch");
  cplx acc = 0.0;
  for (Eigen::Index r = 0; r < op.matrix.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(op.matrix, r); it; ++it)
      acc += it.value() * rho.entries(it.col(), it.row());
  return acc;
}

// Copies rho into a larger basis over the same modes, zero-padding states
// that the source basis does not contain.
inline DensityMatrix embed(const DensityMatrix& rho, const Basis& target) {
  if (rho.basis.n_modes() != target.n_modes())
    throw InvalidArgument("embed: mode count mismatch");
  const auto dim = rho.basis.dim();
  std::vector<Eigen::Index> map(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    auto idx = target.index_of(rho.basis.state(s));
    if (!idx) throw InvalidArgument("embed: target basis does not contain the source");
    map[s] = static_cast<Eigen::Index>(*idx);
  }
  const auto tdim = static_cast<Eigen::Index>(target.dim());
  Matrix out = Matrix::Zero(tdim, tdim);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      out(map[a], map[b]) = rho.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return {target, std::move(out)};
}

struct StateHealth {
  double trace_error = 0.0;
  double hermiticity = 0.0;
  double min_eigenvalue = 0.0;

  bool ok(double trace_tol = 1e-8, double herm_tol = 1e-10, double eig_tol = 1e-8) const {
    return trace_error < trace_tol && hermiticity < herm_tol && min_eigenvalue >= -eig_tol;
  }
};

inline StateHealth state_health(const DensityMatrix& rho) {
  StateHealth h;
  h.trace_error = std::abs(rho.entries.trace() - cplx{1.0});
  h.hermiticity = (rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff();
  Matrix herm = 0.5 * (rho.entries + rho.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  h.min_eigenvalue = es.eigenvalues().minCoeff();
  return h;
}

// Componentwise worst of two reports.
inline StateHealth worst_of(const StateHealth& a, const StateHealth& b) {
  return {std::max(a.trace_error, b.trace_error), std::max(a.hermiticity, b.hermiticity),
          std::min(a.min_eigenvalue, b.min_eigenvalue)};
}

}  // namespace qnn
