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

// Explicit Runge-Kutta steppers over any Eigen dense state type. The
// right-hand side has the signature `void(double t, const State& y, State& dydt)`.

#include <algorithm>
#include <cmath>

#include "qnn/common.hpp"

namespace qnn::ode {

template <class State>
class Rk4 {
 public:
  // Advances y from t to t + h in place.
  template <class Rhs>
  void step(Rhs&& rhs, double t, State& y, double h) {
    resize_like(y);
    rhs(t, y, k1_);
    tmp_ = y + (0.5 * h) * k1_;
    rhs(t + 0.5 * h, tmp_, k2_);
    tmp_ = y + (0.5 * h) * k2_;
    rhs(t + 0.5 * h, tmp_, k3_);
    tmp_ = y + h * k3_;
    rhs(t + h, tmp_, k4_);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  void resize_like(const State& y) {
    if (k1_.rows() != y.rows() || k1_.cols() != y.cols()) {
      k1_.resize(y.rows(), y.cols());
      k2_.resize(y.rows(), y.cols());
      k3_.resize(y.rows(), y.cols());
      k4_.resize(y.rows(), y.cols());
      tmp_.resize(y.rows(), y.cols());
    }
  }

  State k1_, k2_, k3_, k4_, tmp_;
};

// Dormand-Prince 5(4) with elementwise max-norm absolute error control.
template <class State>
class Dopri5 {
 public:
  explicit Dopri5(double atol, double h_min = 1e-14) : atol_(atol), h_min_(h_min) {}

  // Integrates from t0 to t1, starting with trial step `h`. Returns the number
  // of accepted steps.
  template <class Rhs>
  int integrate(Rhs&& rhs, double t0, double t1, State& y, double h) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    int accepted = 0;
    double t = t0;
    h = std::min(h, t1 - t0);
    rhs(t, y, k1_);
    while (t < t1) {
      if (t + h > t1) h = t1 - t;
      tmp_ = y + h * a21 * k1_;
      rhs(t + c2 * h, tmp_, k2_);
      tmp_ = y + h * (a31 * k1_ + a32 * k2_);
      rhs(t + c3 * h, tmp_, k3_);
      tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      rhs(t + c4 * h, tmp_, k4_);
      tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      rhs(t + c5 * h, tmp_, k5_);
      tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
      rhs(t + h, tmp_, k6_);
      ynew_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      rhs(t + h, ynew_, k7_);
      const double err =
          (h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_))
              .cwiseAbs()
              .maxCoeff();
      if (!std::isfinite(err)) throw NumericalFailure("dopri5: non-finite error estimate");
      if (err <= atol_) {
        t += h;
        y = ynew_;
        k1_ = k7_;  // first-same-as-last
        ++accepted;
      }
      const double scale = err > 0.0 ? 0.9 * std::pow(atol_ / err, 0.2) : 5.0;
      h *= std::clamp(scale, 0.2, 5.0);
      if (h < h_min_ && t < t1) throw NumericalFailure("dopri5: step size underflow");
    }
    return accepted;
  }

 private:
  double atol_;
  double h_min_;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_;
};

}  // namespace qnn::ode
