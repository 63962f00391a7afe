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

#include "qnn/wigner.hpp"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

using namespace qnn;

namespace {

constexpr double kInvPi = 1.0 / std::numbers::pi;

GridGeometry square(double half, int n) { return {-half, half, -half, half, n, n}; }

DensityMatrix random_single_mode(int d, std::uint64_t seed) {
  Matrix A(d, 2);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < 2; ++j)
      A(i, j) = cplx{rng::uniform(seed, 4 * i + 2 * j, -1, 1), rng::uniform(seed, 4 * i + 2 * j + 1, -1, 1)} /
                (1.0 + i);
  Matrix rho = A * A.adjoint();
  rho /= rho.trace();
  return {build_basis({d}), rho};
}

// Analytic pure-state overlap: int W_rho W_sigma dx dp = Tr(rho sigma) / (2 pi).
double continuum_error(const Matrix& a, const Matrix& b) {
  const double aa = (a * a).trace().real(), bb = (b * b).trace().real(), ab = (a * b).trace().real();
  return (aa - 2 * ab + bb) / (aa + 2 * ab + bb);
}

}  // namespace

TEST(Wigner, vacuum_peak) {
  const auto w = wigner_of_state(to_density(vacuum(build_basis({5}))), square(3, 61));
  EXPECT_NEAR(w.values(30, 30), kInvPi, 1e-15);
}

TEST(Wigner, parity_at_origin) {
  const auto geom = square(2, 41);
  const auto even = wigner_of_state(to_density(cat_state(1.0, 0, 25)), geom);
  const auto odd = wigner_of_state(to_density(cat_state(1.0, 1, 25)), geom);
  EXPECT_NEAR(even.values(20, 20), kInvPi, 1e-13);
  EXPECT_NEAR(odd.values(20, 20), -kInvPi, 1e-13);
}

TEST(Wigner, coherent_state_is_displaced_gaussian) {
  const cplx beta{0.9, -0.6};
  const auto geom = square(5, 101);
  const auto w = wigner_of_state(to_density(coherent_state(build_basis({30}), {beta})), geom);
  const double x0 = std::numbers::sqrt2 * beta.real(), p0 = std::numbers::sqrt2 * beta.imag();
  double worst = 0.0;
  for (int i = 0; i < geom.nx; ++i)
    for (int j = 0; j < geom.np; ++j) {
      const double g = kInvPi * std::exp(-std::pow(geom.x(i) - x0, 2) - std::pow(geom.p(j) - p0, 2));
      worst = std::max(worst, std::abs(w.values(i, j) - g));
    }
  EXPECT_LT(worst, 1e-10);
  Eigen::Index ix, ip;
  w.values.maxCoeff(&ix, &ip);
  EXPECT_LE(std::abs(geom.x(static_cast<int>(ix)) - x0), geom.dx());
  EXPECT_LE(std::abs(geom.p(static_cast<int>(ip)) - p0), geom.dp());
}

TEST(Wigner, single_photon_closed_form) {
  const auto geom = square(4, 81);
  std::vector<int> one{1};
  const auto w = wigner_of_state(to_density(fock_state(build_basis({3}), one)), geom);
  for (int i = 0; i < geom.nx; i += 7)
    for (int j = 0; j < geom.np; j += 5) {
      const double r2 = geom.x(i) * geom.x(i) + geom.p(j) * geom.p(j);
      EXPECT_NEAR(w.values(i, j), kInvPi * (2 * r2 - 1) * std::exp(-r2), 1e-14);
    }
}

TEST(Wigner, large_cutoff_is_stable) {
  const auto w = wigner_of_state(to_density(coherent_state(build_basis({60}), {cplx{2.5, 1.0}})), {});
  EXPECT_TRUE(w.values.allFinite());
  EXPECT_NEAR(w.integral(), 1.0, 1e-3);
}

TEST(Wigner, normalization_and_linearity) {
  const auto geom = GridGeometry{};
  const auto a = random_single_mode(8, 1), b = random_single_mode(8, 2);
  const auto wa = wigner_of_state(a, geom), wb = wigner_of_state(b, geom);
  EXPECT_NEAR(wa.integral(), 1.0, 1e-3);
  EXPECT_NEAR(wb.integral(), 1.0, 1e-3);
  const DensityMatrix mix{a.basis, 0.3 * a.entries + 0.7 * b.entries};
  const auto wm = wigner_of_state(mix, geom);
  EXPECT_LT((wm.values - (0.3 * wa.values + 0.7 * wb.values)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Wigner, rejects_bad_input) {
  EXPECT_THROW(wigner_of_state(to_density(vacuum(build_basis({2, 2})))), InvalidArgument);
  EXPECT_THROW(wigner_of_state(to_density(vacuum(build_basis({2}))), {0, -1, 0, 1, 5, 5}), InvalidArgument);
  Matrix bad = Matrix::Identity(2, 2) / 2.0;
  bad(0, 1) = 0.1;
  EXPECT_THROW(wigner_of_state({build_basis({2}), bad}), InvalidArgument);
}

TEST(TargetCat, matches_direct_evaluation_and_symmetry) {
  const auto geom = GridGeometry{};
  const auto t = target_cat_wigner(1.0, 0, geom);
  const int dim = cutoff_for(1.0, 1e-14) + 2;
  const auto direct = wigner_of_state(to_density(cat_state(1.0, 0, dim)), geom);
  EXPECT_LT((t.values - direct.values).cwiseAbs().maxCoeff(), 1e-12);
  // Point reflection (x, p) -> (-x, -p) on a symmetric grid.
  const RealMatrix reflected = t.values.reverse();
  EXPECT_LT((t.values - reflected).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(t.integral(), 1.0, 1e-3);
}

TEST(TargetCat, interference_fringes) {
  const auto geom = GridGeometry{};
  const auto t = target_cat_wigner(1.0, 0, geom);
  const int ix0 = geom.nx / 2;
  int changes = 0;
  for (int j = 1; j < geom.np; ++j) {
    const double a = t.values(ix0, j - 1), b = t.values(ix0, j);
    if (std::abs(a) > 1e-8 && std::abs(b) > 1e-8 && (a < 0) != (b < 0)) ++changes;
  }
  EXPECT_GE(changes, 2);
}

TEST(TargetCat, grid_must_cover_support) {
  EXPECT_THROW(target_cat_wigner(1.4, 0, square(5, 101)), InvalidArgument);
  EXPECT_NO_THROW(target_cat_wigner(1.4, 0, square(6, 101)));
  // Too coarse a grid leaks normalization.
  EXPECT_THROW(target_cat_wigner(1.0, 0, square(6, 5)), InvalidArgument);
}

TEST(WignerError, identity_symmetry_and_disjoint_lobes) {
  const auto geom = GridGeometry{};
  const auto a = wigner_of_state(random_single_mode(6, 3), geom);
  const auto b = wigner_of_state(random_single_mode(6, 4), geom);
  EXPECT_EQ(wigner_error(a, a), 0.0);
  EXPECT_EQ(wigner_error(a, b), wigner_error(b, a));
  EXPECT_GT(wigner_error(a, b), 0.0);

  const auto wide = square(8, 241);
  const auto basis = build_basis({40});
  const auto left = wigner_of_state(to_density(coherent_state(basis, {-3.0})), wide);
  const auto right = wigner_of_state(to_density(coherent_state(basis, {3.0})), wide);
  EXPECT_NEAR(wigner_error(left, right), 1.0, 1e-3);
}

TEST(WignerError, errors) {
  const auto a = wigner_of_state(to_density(vacuum(build_basis({2}))), square(3, 11));
  const auto b = wigner_of_state(to_density(vacuum(build_basis({2}))), square(3, 13));
  EXPECT_THROW(wigner_error(a, b), InvalidArgument);
  WignerGrid z{a.geometry, RealMatrix::Zero(11, 11)};
  EXPECT_THROW(wigner_error(z, z), NumericalFailure);
}

TEST(WignerError, refinement_and_continuum_limit) {
  const auto rho = random_single_mode(10, 8);
  const auto cat = to_density(cat_state(1.0, 0, 20));
  Matrix padded = Matrix::Zero(20, 20);
  padded.topLeftCorner(10, 10) = rho.entries;
  const double coarse = wigner_error(wigner_of_state(rho, square(6, 201)), wigner_of_state(cat, square(6, 201)));
  const double fine = wigner_error(wigner_of_state(rho, square(6, 401)), wigner_of_state(cat, square(6, 401)));
  EXPECT_LT(std::abs(coarse - fine), 1e-3);
  EXPECT_NEAR(coarse, continuum_error(padded, cat.entries), 1e-6);
}

TEST(WignerError, invariant_under_joint_rescaling) {
  // Rescaling x, p by s and W by 1/s^2 (a change of convention) leaves the
  // ratio unchanged.
  const auto a = wigner_of_state(random_single_mode(5, 10), square(6, 101));
  const auto b = wigner_of_state(random_single_mode(5, 11), square(6, 101));
  const double s = std::numbers::sqrt2;
  auto rescale = [&](const WignerGrid& w) {
    GridGeometry g = w.geometry;
    g.x_min *= s, g.x_max *= s, g.p_min *= s, g.p_max *= s;
    return WignerGrid{g, w.values / (s * s)};
  };
  EXPECT_NEAR(wigner_error(rescale(a), rescale(b)), wigner_error(a, b), 1e-14);
}

TEST(WignerErrorEvaluator, matches_direct_route) {
  const auto geom = square(6, 121);
  const auto target = target_cat_wigner(1.2, 0, geom);
  for (int d : {1, 4, 9}) {
    const WignerErrorEvaluator eval(d, target);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto rho = random_single_mode(d, 50 + seed);
      EXPECT_NEAR(eval(rho.entries), wigner_error(wigner_of_state(rho, geom), target), 1e-12);
    }
  }
}
