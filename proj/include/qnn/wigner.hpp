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

// Single-mode Wigner functions on rectangular phase-space grids.
//
// Convention: x = (a + a^+)/sqrt(2), p = (a - a^+)/(i sqrt(2)), hbar = 1, and
// W is normalized so that the integral over dx dp equals Tr rho. A coherent
// state |b> is a Gaussian centred at (sqrt(2) Re b, sqrt(2) Im b).

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qnn/common.hpp"
#include "qnn/fock.hpp"

namespace qnn {

struct GridGeometry {
  double x_min = -6.0, x_max = 6.0;
  double p_min = -6.0, p_max = 6.0;
  int nx = 201, np = 201;

  double dx() const { return (x_max - x_min) / (nx - 1); }
  double dp() const { return (p_max - p_min) / (np - 1); }
  double x(int i) const { return x_min + i * dx(); }
  double p(int j) const { return p_min + j * dp(); }
  double cell_area() const { return dx() * dp(); }

  void validate() const {
    if (nx < 2 || np < 2) throw InvalidArgument("grid: need at least 2 points per axis");
    if (!(x_max > x_min) || !(p_max > p_min)) throw InvalidArgument("grid: axes must be strictly increasing");
  }

  bool operator==(const GridGeometry&) const = default;
};

struct WignerGrid {
  GridGeometry geometry;
  RealMatrix values;  // values(i, j) = W(x_i, p_j)

  double integral() const { return values.sum() * geometry.cell_area(); }
};

namespace detail {

// Calls f(i, j, m, n, K_mn(x_i, p_j)) for every grid point and m <= n < d.
// The kernels follow a three-term recurrence (associated-Laguerre form) that
// never forms factorials, so large cutoffs stay stable.
template <class F>
void for_each_kernel(const GridGeometry& geom, int d, F&& f) {
  std::vector<double> sq(d + 1);
  for (int k = 0; k <= d; ++k) sq[k] = std::sqrt(static_cast<double>(k));
  std::vector<cplx> w(d);
  for (int i = 0; i < geom.nx; ++i) {
    for (int j = 0; j < geom.np; ++j) {
      const cplx A = cplx{geom.x(i), geom.p(j)} / std::numbers::sqrt2;
      const cplx A2 = 2.0 * A, A2c = std::conj(A2);
      w[0] = std::exp(-2.0 * std::norm(A)) / std::numbers::pi;
      f(i, j, 0, 0, w[0]);
      for (int n = 1; n < d; ++n) {
        w[n] = A2 * w[n - 1] / sq[n];
        f(i, j, 0, n, w[n]);
      }
      for (int m = 1; m < d; ++m) {
        cplx temp = w[m];
        w[m] = (A2c * temp - sq[m] * w[m - 1]) / sq[m];
        f(i, j, m, m, w[m]);
        for (int n = m + 1; n < d; ++n) {
          const cplx next = (A2 * w[n - 1] - sq[m] * temp) / sq[n];
          temp = w[n];
          w[n] = next;
          f(i, j, m, n, w[n]);
        }
      }
    }
  }
}

}  // namespace detail

// W(x, p) of a single-mode density matrix,
//   W = sum_{m<=n} (2 - delta_mn) Re(rho_mn K_mn(x, p)).
inline WignerGrid wigner_of_state(const DensityMatrix& rho, const GridGeometry& geom = {}) {
  geom.validate();
  if (rho.basis.n_modes() != 1)
    throw InvalidArgument("wigner_of_state: expected a single-mode state, got " +
                          std::to_string(rho.basis.n_modes()) + " modes");
  const Matrix& r = rho.entries;
  const double herm = (r - r.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10)
    throw InvalidArgument("wigner_of_state: density matrix not Hermitian (" + std::to_string(herm) + ")");
  WignerGrid out{geom, RealMatrix::Zero(geom.nx, geom.np)};
  detail::for_each_kernel(geom, static_cast<int>(r.rows()), [&](int i, int j, int m, int n, cplx K) {
    out.values(i, j) += (m == n ? 1.0 : 2.0) * (r(m, n) * K).real();
  });
  return out;
}

// Half-width a grid needs to hold the Wigner function of |b> and |-b>.
inline double required_half_width(cplx beta) { return std::numbers::sqrt2 * std::abs(beta) + 4.0; }

inline WignerGrid target_cat_wigner(cplx beta, int k, const GridGeometry& geom = {},
                                    double leakage_tolerance = 1e-3) {
  geom.validate();
  const double need = required_half_width(beta);
  if (-geom.x_min < need || geom.x_max < need || -geom.p_min < need || geom.p_max < need)
    throw InvalidArgument("target_cat_wigner: grid must cover +/-" + std::to_string(need) +
                          " on both axes");
  const int dim = cutoff_for(beta, 1e-14) + 2;
  auto grid = wigner_of_state(to_density(cat_state(beta, k, dim)), geom);
  const double leak = std::abs(grid.integral() - 1.0);
  if (leak > leakage_tolerance)
    throw InvalidArgument("target_cat_wigner: support leakage " + std::to_string(leak) +
                          " exceeds tolerance; enlarge or refine the grid");
  return grid;
}

// Normalized distance int (Wo - Wt)^2 / int (Wo + Wt)^2 as a Riemann sum.
inline double wigner_error(const WignerGrid& out, const WignerGrid& target) {
  if (!(out.geometry == target.geometry)) throw InvalidArgument("wigner_error: grid geometry mismatch");
  const double num = (out.values - target.values).squaredNorm();
  const double den = (out.values + target.values).squaredNorm();
  if (!(den > 0.0)) throw NumericalFailure("wigner_error: zero denominator");
  return num / den;
}

// Evaluates wigner_error(W[rho], target) for many rho of a fixed dimension.
// W[rho] is linear in the d^2 real coordinates of rho, so both Riemann sums
// reduce to a quadratic form with a precomputed Gram matrix of the Fock
// kernels on the grid. Agrees with the direct route to rounding.
class WignerErrorEvaluator {
 public:
  WignerErrorEvaluator(int dim, const WignerGrid& target) : dim_(dim), geometry_(target.geometry) {
    if (dim < 1) throw InvalidArgument("WignerErrorEvaluator: dim must be >= 1");
    const int nc = dim * dim;
    for (int c = 0; c < nc; ++c) coords_.push_back(coordinate(c));
    const Eigen::Index npts = static_cast<Eigen::Index>(geometry_.nx) * geometry_.np;
    RealMatrix phi(npts, nc);
    std::vector<int> slot(static_cast<std::size_t>(dim) * dim);
    for (int c = 0; c < nc; ++c) {
      const auto [m, n, imag] = coordinate(c);
      if (!imag) slot[static_cast<std::size_t>(m) * dim + n] = c;
    }
    // Column c holds W of the Hermitian unit element with coordinate c:
    // Re K_mm on the diagonal, 2 Re K_mn and -2 Im K_mn off it.
    detail::for_each_kernel(geometry_, dim, [&](int i, int j, int m, int n, cplx K) {
      const Eigen::Index pt = i + static_cast<Eigen::Index>(j) * geometry_.nx;
      const int c = slot[static_cast<std::size_t>(m) * dim + n];
      if (m == n) {
        phi(pt, c) = K.real();
      } else {
        phi(pt, c) = 2.0 * K.real();
        phi(pt, c + 1) = -2.0 * K.imag();
      }
    });
    const double area = geometry_.cell_area();
    gram_ = (phi.transpose() * phi) * area;
    const RealVector t = Eigen::Map<const RealVector>(target.values.data(), npts);
    cross_ = (phi.transpose() * t) * area;
    target_sq_ = t.squaredNorm() * area;
  }

  int dim() const { return dim_; }

  double operator()(const Matrix& rho) const {
    if (rho.rows() != dim_) throw InvalidArgument("WignerErrorEvaluator: dimension mismatch");
    RealVector c(dim_ * dim_);
    for (int k = 0; k < dim_ * dim_; ++k) {
      const auto& [m, n, imag] = coords_[static_cast<std::size_t>(k)];
      c(k) = imag ? rho(m, n).imag() : rho(m, n).real();
    }
    const double oo = c.dot(gram_ * c);
    const double ot = c.dot(cross_);
    const double den = oo + 2.0 * ot + target_sq_;
    if (!(den > 0.0)) throw NumericalFailure("wigner_error: zero denominator");
    return std::max(0.0, (oo - 2.0 * ot + target_sq_) / den);
  }

 private:
  struct Coord {
    int m, n;
    bool imag;
  };

  // 0..d-1: diagonal; then (Re, Im) pairs of the strict upper triangle.
  Coord coordinate(int c) const {
    if (c < dim_) return {c, c, false};
    int k = (c - dim_) / 2;
    const bool imag = ((c - dim_) % 2) == 1;
    for (int m = 0; m < dim_; ++m) {
      const int row = dim_ - 1 - m;
      if (k < row) return {m, m + 1 + k, imag};
      k -= row;
    }
    return {0, 0, false};
  }

  int dim_;
  GridGeometry geometry_;
  std::vector<Coord> coords_;
  RealMatrix gram_;
  RealVector cross_;
  double target_sq_ = 0.0;
};

}  // namespace qnn
