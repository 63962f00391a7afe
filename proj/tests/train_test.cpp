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

#include "qnn/train.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace qnn;

namespace {

RealMatrix random_real(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  RealMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng::uniform(seed, static_cast<std::uint64_t>(i * c + j), -1, 1);
  return m;
}

XorTaskConfig small_xor(Encoding enc) {
  XorTaskConfig c;
  c.encoding = enc;
  c.params = NetworkParams::uncoupled(4);
  c.params.E = 1.0;
  c.params.J = nearest_neighbour_couplings(4, 2.0, 8);
  c.params.tau = 2.0;
  c.basis.mode_dims = {4, 4, 4, 4};
  c.evolution.dt = 5e-3;
  return c;
}

CatTaskConfig small_cat() {
  CatTaskConfig c;
  c.params = NetworkParams::uncoupled(2);
  c.params.alpha = 2.0;
  c.params.J(0, 1) = c.params.J(1, 0) = 1.0;
  c.params.tau = 0.3;
  c.basis.mode_dims = {8, 8};
  c.basis.total_cap = 7;
  c.evolution.dt = 1e-3;
  c.grid = GridGeometry{-6, 6, -6, 6, 61, 61};
  c.optimizer.max_iterations = 60;
  return c;
}

}  // namespace

TEST(Readout, ExactAffineFit) {
  const RealMatrix f = random_real(6, 2, 1);
  RealMatrix t(6, 2);
  t.col(0) = 0.3 * f.col(0) - 1.2 * f.col(1) + RealVector::Constant(6, 0.7);
  t.col(1) = 2.0 * f.col(1) - RealVector::Constant(6, 0.1);
  const auto w = solve_readout_weights(f, t);
  EXPECT_LT((apply_readout(f, w) - t).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Readout, MatchesPseudoInverse) {
  const RealMatrix f = random_real(12, 3, 2);
  const RealMatrix t = random_real(12, 1, 3);
  RealMatrix A(12, 4);
  A << f, RealVector::Ones(12);
  const RealMatrix coef = A.completeOrthogonalDecomposition().pseudoInverse() * t;
  const auto w = solve_readout_weights(f, t);
  const RealMatrix oracle = A * coef;
  EXPECT_LT((apply_readout(f, w) - oracle).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Readout, RankDeficientFeaturesSolve) {
  RealMatrix f(4, 2);
  f << 1, 2, 1, 2, 1, 2, 1, 2;
  const auto w = solve_readout_weights(f, xor_truth_table());
  EXPECT_TRUE(w.weights.allFinite());
  EXPECT_NEAR(xor_task_error(apply_readout(f, w), xor_truth_table()).max_abs, 0.5, 1e-6);
}

TEST(Readout, RejectsTooFewRows) {
  EXPECT_THROW(solve_readout_weights(RealMatrix::Zero(3, 2), RealMatrix::Zero(3, 1)), InvalidArgument);
}

TEST(Xor, RawInputsAreLinearlyInseparable) {
  RealMatrix x(4, 2);
  x << 0, 0, 0, 1, 1, 0, 1, 1;
  const auto w = solve_readout_weights(x, xor_truth_table());
  EXPECT_GE(xor_task_error(apply_readout(x, w), xor_truth_table()).max_abs, 0.5 - 1e-9);
  double best = 1e9;
  for (double w1 = -2; w1 <= 2; w1 += 0.05)
    for (double w2 = -2; w2 <= 2; w2 += 0.05)
      for (double b = -1; b <= 2; b += 0.05) {
        double worst = 0;
        for (int c = 0; c < 4; ++c)
          worst = std::max(worst, std::abs(w1 * x(c, 0) + w2 * x(c, 1) + b - xor_truth_table()(c, 0)));
        best = std::min(best, worst);
      }
  EXPECT_GE(best, 0.5 - 1e-9);
}

TEST(Xor, TaskErrorExamples) {
  const RealMatrix t = xor_truth_table();
  const auto zero = xor_task_error(t, t);
  EXPECT_EQ(zero.mean_abs, 0.0);
  EXPECT_EQ(zero.max_abs, 0.0);
  EXPECT_TRUE(zero.success());
  const auto half = xor_task_error(RealMatrix::Constant(4, 1, 0.5), t);
  EXPECT_DOUBLE_EQ(half.max_abs, 0.5);
  EXPECT_FALSE(half.success());
  EXPECT_THROW(xor_task_error(RealMatrix::Zero(4, 2), t), InvalidArgument);
}

TEST(Xor, VacuumIsFixedPoint) {
  auto c = small_xor(Encoding::kOccupation);
  const RealVector f = run_xor_forward(c, {0, 0});
  EXPECT_LT(f.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Xor, SymmetricNetworkSwapsFeatures) {
  // The permutation (0 1)(2 3) maps this network onto itself.
  auto c = small_xor(Encoding::kOccupation);
  c.basis.mode_dims = {3, 3, 3, 3};
  c.basis.total_cap = 3;
  c.params.alpha = 1.5;
  c.params.J.setZero();
  c.params.J(0, 2) = c.params.J(2, 0) = 1.1;
  c.params.J(1, 3) = c.params.J(3, 1) = 1.1;
  c.params.J(2, 3) = c.params.J(3, 2) = 0.6;
  c.params.J(0, 1) = c.params.J(1, 0) = 0.4;
  c.params.tau = 0.5;
  set_warning_handler([](std::string_view) {});
  const RealVector a = run_xor_forward(c, {0, 1});
  const RealVector b = run_xor_forward(c, {1, 0});
  reset_warning_handler();
  EXPECT_NEAR(a(0), b(1), 1e-10);
  EXPECT_NEAR(a(1), b(0), 1e-10);
}

TEST(Xor, PumpEncodingMatchesMeanFieldWhenLinear) {
  auto q = small_xor(Encoding::kPumpAmplitude);
  q.pump_on = 0.2;
  auto m = q;
  m.encoding = Encoding::kMeanFieldIntensity;
  const RealVector fq = run_xor_forward(q, {1, 1});
  const RealVector fm = run_xor_forward(m, {1, 1});
  EXPECT_LT((fq - fm).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Xor, PumpEncodingWithoutKerrSolvesXor) {
  const auto r = train_xor(small_xor(Encoding::kPumpAmplitude));
  EXPECT_LT(r.error.max_abs, 0.1);
  EXPECT_TRUE(r.error.success());
  EXPECT_EQ(r.features.rows(), 4);
  EXPECT_EQ(r.features.cols(), 2);
}

TEST(Xor, MeanFieldAmplitudeReadoutFails) {
  const auto r = train_xor(small_xor(Encoding::kMeanFieldAmplitude));
  EXPECT_EQ(r.features.cols(), 4);
  EXPECT_GE(r.error.max_abs, 0.5 - 1e-9);
}

TEST(Xor, NoisyTrainingIsDeterministic) {
  auto c = small_xor(Encoding::kMeanFieldIntensity);
  c.noise = NoiseModel{0.0, 0.8, 99, 20};
  const auto a = train_xor(c);
  const auto b = train_xor(c);
  EXPECT_EQ(a.readout.weights, b.readout.weights);
  EXPECT_EQ(a.error.max_abs, b.error.max_abs);
  EXPECT_EQ(a.draw_max_errors.size(), 20u);
  c.noise->seed = 100;
  EXPECT_NE(train_xor(c).error.max_abs, a.error.max_abs);
}

TEST(Xor, ValidatesModes) {
  auto c = small_xor(Encoding::kPumpAmplitude);
  c.output_modes = {2, 4};
  EXPECT_THROW(run_xor_forward(c, {0, 1}), InvalidArgument);
  EXPECT_THROW(encoding_from_string("bogus"), InvalidArgument);
  EXPECT_EQ(encoding_from_string("occupation"), Encoding::kOccupation);
}

TEST(Generator, ZeroIsIdentity) {
  const auto m = unitary_from_generator(RealVector::Zero(9));
  EXPECT_LT((m.W - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Generator, RandomThetaIsUnitary) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    RealVector th(16);
    for (int i = 0; i < 16; ++i) th(i) = rng::uniform(s, i, -3, 3);
    const auto m = unitary_from_generator(th);
    EXPECT_LT(unitarity_error(m.W), 1e-12);
    Eigen::ComplexEigenSolver<Matrix> es(m.W);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(es.eigenvalues()(i)), 1.0, 1e-10);
  }
}

TEST(Generator, LayoutAndLength) {
  RealVector th = RealVector::Zero(4);
  th(2) = 0.3;
  th(3) = -0.2;
  const auto m = unitary_from_generator(th);
  EXPECT_NEAR(std::abs(m.generator(0, 1) - cplx(0.3, -0.2)), 0.0, 1e-12);
  EXPECT_THROW(unitary_from_generator(RealVector::Zero(5)), InvalidArgument);
}

TEST(Cat, OptimizerNeverWorsens) {
  const auto r = optimize_cat_mixing(small_cat());
  ASSERT_EQ(r.cases.size(), 1u);
  EXPECT_LE(r.mean_delta, r.mean_initial_delta + 1e-12);
  EXPECT_GT(r.cases[0].probability, 0.0);
  EXPECT_FALSE(r.cases[0].history.empty());
}

TEST(Cat, DeltaRecomputesFromTheta) {
  const auto cfg = small_cat();
  const auto r = optimize_cat_mixing(cfg);
  const auto& c = r.cases[0];
  const CatScorer scorer(cfg, evolve_cat_input(cfg, c.beta), c.beta);
  EXPECT_NEAR(scorer.evaluate(c.theta).first, c.delta, 1e-10);
  EXPECT_NEAR(scorer.cost(c.theta), c.delta, 1e-10);
}

TEST(Cat, Deterministic) {
  const auto a = optimize_cat_mixing(small_cat());
  const auto b = optimize_cat_mixing(small_cat());
  EXPECT_EQ(a.cases[0].theta, b.cases[0].theta);
  EXPECT_EQ(a.mean_delta, b.mean_delta);
}

TEST(Cat, SharedMixingUsesOneTheta) {
  auto cfg = small_cat();
  cfg.beta_list = {1.0, 1.2};
  cfg.shared_mixing = true;
  cfg.optimizer.max_iterations = 20;
  const auto r = optimize_cat_mixing(cfg);
  ASSERT_EQ(r.cases.size(), 2u);
  EXPECT_EQ(r.cases[0].theta, r.cases[1].theta);
}

TEST(Cat, AbortsWhenEveryConditioningIsBelowFloor) {
  auto cfg = small_cat();
  cfg.probability_floor = 1.5;
  cfg.optimizer.max_iterations = 3;
  EXPECT_THROW(optimize_cat_mixing(cfg), NumericalFailure);
}

TEST(Cat, ValidatesConfig) {
  auto cfg = small_cat();
  cfg.k = 2;
  EXPECT_THROW(optimize_cat_mixing(cfg), InvalidArgument);
  cfg = small_cat();
  cfg.beta_list = {3.0};
  EXPECT_THROW(optimize_cat_mixing(cfg), InvalidArgument);
  cfg = small_cat();
  cfg.optimizer.max_iterations = 0;
  EXPECT_THROW(optimize_cat_mixing(cfg), InvalidArgument);
}

TEST(Sweep, SingleRow) {
  const auto rows = sweep_nonlinearity(small_xor(Encoding::kMeanFieldIntensity), {0.0}, {1});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].errors.size(), 1u);
  EXPECT_EQ(rows[0].error_std, 0.0);
  EXPECT_TRUE(std::isnan(rows[0].probability_mean));
}

TEST(Sweep, RowsSortedAndParallelMatchesSerial) {
  auto c = small_xor(Encoding::kMeanFieldIntensity);
  c.noise = NoiseModel{0.0, 0.8, 0, 10};
  const std::vector<double> alphas{0.5, 0.0, 0.2};
  const auto serial = sweep_nonlinearity(c, alphas, {1, 2}, 1);
  const auto parallel = sweep_nonlinearity(c, alphas, {1, 2}, 3);
  ASSERT_EQ(serial.size(), 3u);
  EXPECT_EQ(serial[0].alpha, 0.0);
  EXPECT_EQ(serial[2].alpha, 0.5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(serial[i].errors, parallel[i].errors);
}

TEST(Sweep, CatDrawsBetaInRange) {
  CatSweepTask task{small_cat(), BetaRange{}};
  task.base.optimizer.max_iterations = 10;
  const auto rows = sweep_nonlinearity(task, {1.0}, {3, 4});
  ASSERT_EQ(rows[0].betas.size(), 2u);
  for (double b : rows[0].betas) {
    EXPECT_GE(b, 1.0);
    EXPECT_LE(b, 1.4);
  }
  EXPECT_FALSE(std::isnan(rows[0].probability_mean));
}

TEST(Sweep, RejectsEmptyLists) {
  EXPECT_THROW(sweep_nonlinearity(small_xor(Encoding::kMeanFieldIntensity), {}, {1}), InvalidArgument);
}
