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

#include "qnn/readout.hpp"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

using namespace qnn;

namespace {

Matrix random_complex(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) {
      const auto k = static_cast<std::uint64_t>(2 * (i * c + j));
      m(i, j) = cplx{rng::uniform(seed, k, -1, 1), rng::uniform(seed, k + 1, -1, 1)};
    }
  return m;
}

DensityMatrix random_state(const Basis& b, std::uint64_t seed, Eigen::Index rank = 3) {
  const Matrix A = random_complex(static_cast<Eigen::Index>(b.dim()), rank, seed);
  Matrix rho = A * A.adjoint();
  rho /= rho.trace();
  return {b, rho};
}

MixingMatrix random_mixing(int n, std::uint64_t seed) {
  const Matrix h = random_complex(n, n, seed);
  return MixingMatrix::from_generator(1.7 * (h + h.adjoint()));
}

MixingMatrix beam_splitter() {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = std::numbers::pi / 4.0;
  return MixingMatrix::from_generator(h);
}

}  // namespace

TEST(Occupations, basic_states) {
  const auto b = build_basis({3, 3});
  EXPECT_EQ(occupations(to_density(vacuum(b))), RealVector::Zero(2));
  std::vector<int> s10{1, 0};
  const RealVector n = occupations(to_density(fock_state(b, s10)));
  EXPECT_EQ(n(0), 1.0);
  EXPECT_EQ(n(1), 0.0);
  const auto b16 = build_basis({16, 16});
  const RealVector c = occupations(to_density(coherent_state(b16, {1.0, 0.5})));
  EXPECT_NEAR(c(0), 1.0, 1e-6);
  EXPECT_NEAR(c(1), 0.25, 1e-6);
}

TEST(Occupations, clamps_and_rejects_negativity) {
  const auto b = build_basis({2});
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0 + 1e-9;
  rho(1, 1) = -1e-9;
  EXPECT_EQ(occupations({b, rho})(0), 0.0);
  rho(1, 1) = -1e-6;
  EXPECT_THROW(occupations({b, rho}), NumericalFailure);
}

TEST(MeasurementNoise, contract) {
  NoiseModel model;
  model.seed = 42;
  const RealVector zero = RealVector::Zero(3);
  EXPECT_EQ(apply_measurement_noise(zero, model, 5), zero);
  RealVector n(3);
  n << 0.3, 1.2, 0.05;
  for (std::uint64_t d = 0; d < 500; ++d) {
    const RealVector out = apply_measurement_noise(n, model, d);
    for (int i = 0; i < 3; ++i) {
      ASSERT_GE(out(i), n(i));
      ASSERT_LE(out(i), 1.8 * n(i));
    }
    ASSERT_EQ(out, apply_measurement_noise(n, model, d));
    // Fixed draw: the model is multiplicative.
    const RealVector scaled = apply_measurement_noise(2.5 * n, model, d);
    ASSERT_LT((scaled - 2.5 * out).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_NE(apply_measurement_noise(n, model, 0), apply_measurement_noise(n, model, 1));
  NoiseModel other = model;
  other.seed = 43;
  EXPECT_NE(apply_measurement_noise(n, model, 0), apply_measurement_noise(n, other, 0));
  NoiseModel bad;
  bad.low = 0.5;
  bad.high = 0.1;
  EXPECT_THROW(apply_measurement_noise(n, bad, 0), InvalidArgument);
}

TEST(LinearReadout, arithmetic) {
  RealVector f(2);
  f << 2.0, 3.0;
  EXPECT_EQ(linear_readout(f, RealMatrix::Identity(2, 2), RealVector::Zero(2)), f);
  RealVector b(2);
  b << 0.25, -1.0;
  EXPECT_EQ(linear_readout(f, RealMatrix::Zero(2, 2), b), b);
  RealMatrix w(1, 2);
  w << 1.0, -1.0;
  EXPECT_DOUBLE_EQ(linear_readout(f, w, RealVector::Constant(1, 0.5))(0), -0.5);
  EXPECT_THROW(linear_readout(f, RealMatrix::Zero(1, 3), RealVector::Zero(1)), InvalidArgument);
}

TEST(MixingMatrix, generator_round_trip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = random_mixing(3, seed);
    EXPECT_LT(unitarity_error(m.W), 1e-12);
    const auto back = MixingMatrix::from_unitary(m.W);
    EXPECT_LT(unitarity_error(back.W), 1e-12);
    EXPECT_LT((MixingMatrix::from_generator(back.generator).W - m.W).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_THROW(MixingMatrix::from_unitary(2.0 * Matrix::Identity(2, 2)), InvalidArgument);
  EXPECT_THROW(MixingMatrix::from_generator(random_complex(2, 2, 1)), InvalidArgument);
}

TEST(MixingUnitary, identity_and_beam_splitter) {
  const auto b = build_basis({3, 3}, 2);
  const auto id = mixing_unitary(MixingMatrix::from_generator(Matrix::Zero(2, 2)), b);
  EXPECT_LT((id.dense() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-15);

  const auto U = mixing_unitary(beam_splitter(), b);
  std::vector<int> s10{1, 0}, s01{0, 1};
  const Vector out = U.dense() * fock_state(b, s10).amplitudes;
  EXPECT_NEAR(std::norm(out(static_cast<Eigen::Index>(*b.index_of(s10)))), 0.5, 1e-14);
  EXPECT_NEAR(std::norm(out(static_cast<Eigen::Index>(*b.index_of(s01)))), 0.5, 1e-14);
}

TEST(MixingUnitary, conserves_number_and_is_homomorphic) {
  const auto b = build_basis({5, 5, 5}, 4);
  const Matrix N = total_number_operator(b).dense();
  const auto m1 = random_mixing(3, 3), m2 = random_mixing(3, 4);
  const Matrix U1 = mixing_unitary(m1, b).dense();
  const Matrix U2 = mixing_unitary(m2, b).dense();
  EXPECT_LT((U1 * N - N * U1).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(unitarity_error(U1), 1e-12);
  const auto m12 = MixingMatrix::from_unitary(m1.W * m2.W);
  EXPECT_LT((mixing_unitary(m12, b).dense() - U1 * U2).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(MixingUnitary, heisenberg_action_on_modes) {
  // U^+ a_k U = sum_j W_kj a_j, exact on a number-capped basis.
  const auto b = build_basis({4, 4, 4}, 3);
  const auto m = random_mixing(3, 9);
  const Matrix U = mixing_unitary(m, b).dense();
  for (int k = 0; k < 3; ++k) {
    Matrix rhs = Matrix::Zero(U.rows(), U.cols());
    for (int j = 0; j < 3; ++j) rhs += m.W(k, j) * mode_annihilation(b, j).dense();
    EXPECT_LT((U.adjoint() * mode_annihilation(b, k).dense() * U - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ConditionOnVacuum, product_state_passthrough) {
  const auto b = build_basis({4, 4}, 3);
  const auto psi = coherent_state(b, {0.4, 0.0});
  const auto out = condition_on_vacuum(to_density(psi), MixingMatrix::from_generator(Matrix::Zero(2, 2)), 0);
  EXPECT_NEAR(out.probability, 1.0, 1e-12);
  const auto single = coherent_state(build_basis({4}), {0.4});
  EXPECT_LT((out.rho_out.entries - to_density(single).entries).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ConditionOnVacuum, beam_splitter_single_photon) {
  const auto b = build_basis({2, 2});
  std::vector<int> s10{1, 0};
  const auto out = condition_on_vacuum(to_density(fock_state(b, s10)), beam_splitter(), 0);
  EXPECT_NEAR(out.probability, 0.5, 1e-14);
  ASSERT_EQ(out.rho_out.entries.rows(), 3);  // output levels 0..2 after mixing
  EXPECT_NEAR(out.rho_out.entries(1, 1).real(), 1.0, 1e-14);
  EXPECT_NEAR(out.rho_out.trace(), 1.0, 1e-12);
}

TEST(ConditionOnVacuum, vanishing_probability_is_an_error) {
  const auto b = build_basis({2, 2});
  std::vector<int> s01{0, 1};
  EXPECT_THROW(condition_on_vacuum(to_density(fock_state(b, s01)), MixingMatrix::from_generator(Matrix::Zero(2, 2)), 0),
               NumericalFailure);
  EXPECT_THROW(condition_on_vacuum(to_density(fock_state(b, s01)), beam_splitter(), 2), InvalidArgument);
}

TEST(ConditionOnVacuum, probability_bounds_and_completeness) {
  const auto b = build_basis({4, 4, 4}, 3);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto rho = random_state(b, 1000 + seed);
    const auto mix = random_mixing(3, 2000 + seed);
    const int out_mode = static_cast<int>(seed % 3);
    const auto res = condition_on_vacuum(rho, mix, out_mode);
    ASSERT_GE(res.probability, 0.0);
    ASSERT_LE(res.probability, 1.0 + 1e-10);
    ASSERT_NEAR(res.rho_out.trace(), 1.0, 1e-10);
    if (seed < 5) {
      // Summing the conditioned blocks over every pattern of the other modes
      // recovers the full trace.
      const Matrix U = mixing_unitary(mix, b).dense();
      const Matrix mixed = U * rho.entries * U.adjoint();
      std::map<std::vector<int>, double> blocks;
      for (std::size_t s = 0; s < b.dim(); ++s) {
        std::vector<int> others;
        for (int m = 0; m < 3; ++m)
          if (m != out_mode) others.push_back(b.occupation(s, m));
        blocks[others] += mixed(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
      }
      double total = 0.0;
      for (const auto& [k, v] : blocks) total += v;
      EXPECT_NEAR(total, 1.0, 1e-8);
      EXPECT_NEAR(blocks[(std::vector<int>{0, 0})], res.probability, 1e-12);
    }
  }
}

TEST(VacuumConditioner, agrees_with_generator_route) {
  for (const auto& b : {build_basis({6, 6, 6}, 5), build_basis({3, 3}), build_basis({2, 2, 2})}) {
    const VacuumConditioner fast(b, 0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto rho = random_state(b, 77 + seed);
      const auto mix = random_mixing(b.n_modes(), 88 + seed);
      const auto slow = condition_on_vacuum(rho, mix, 0);
      const auto quick = fast.condition(rho, mix);
      EXPECT_NEAR(quick.probability, slow.probability, 1e-10);
      ASSERT_EQ(quick.rho_out.entries.rows(), slow.rho_out.entries.rows());
      EXPECT_LT((quick.rho_out.entries - slow.rho_out.entries).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}
