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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qnn/common.hpp"

namespace qnn {

struct NelderMeadOptions {
  int max_iterations = 2000;
  double initial_scale = 0.1;
  double x_tolerance = 1e-6;  // simplex diameter
  double f_tolerance = 1e-8;  // spread of vertex values
};

struct NelderMeadResult {
  RealVector x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> history;  // best value after each iteration
};

// Derivative-free minimization with the standard reflection (1), expansion
// (2), contraction (1/2) and shrink (1/2) coefficients. Deterministic: the
// initial simplex is x0 plus initial_scale along each coordinate axis.
template <class Cost>
NelderMeadResult nelder_mead(Cost&& cost, const RealVector& x0, const NelderMeadOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  if (n < 1) throw InvalidArgument("nelder_mead: empty parameter vector");
  NelderMeadResult res;
  std::vector<RealVector> pts;
  std::vector<double> vals;
  auto eval = [&](const RealVector& x) {
    ++res.evaluations;
    const double v = cost(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  pts.push_back(x0);
  vals.push_back(eval(x0));
  for (Eigen::Index i = 0; i < n; ++i) {
    RealVector x = x0;
    x(i) += opt.initial_scale;
    pts.push_back(x);
    vals.push_back(eval(x));
  }
  std::vector<std::size_t> order(pts.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    std::vector<RealVector> p2;
    std::vector<double> v2;
    for (auto o : order) {
      p2.push_back(pts[o]);
      v2.push_back(vals[o]);
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) d = std::max(d, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
    return d;
  };

  sort_simplex();
  while (res.iterations < opt.max_iterations) {
    if (diameter() < opt.x_tolerance || vals.back() - vals.front() < opt.f_tolerance) {
      res.converged = true;
      break;
    }
    ++res.iterations;
    RealVector centroid = RealVector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += pts[static_cast<std::size_t>(i)];
    centroid /= static_cast<double>(n);
    const RealVector& worst = pts.back();

    const RealVector xr = centroid + (centroid - worst);
    const double fr = eval(xr);
    if (fr < vals.front()) {
      const RealVector xe = centroid + 2.0 * (centroid - worst);
      const double fe = eval(xe);
      if (fe < fr) {
        pts.back() = xe;
        vals.back() = fe;
      } else {
        pts.back() = xr;
        vals.back() = fr;
      }
    } else if (fr < vals[vals.size() - 2]) {
      pts.back() = xr;
      vals.back() = fr;
    } else {
      const bool outside = fr < vals.back();
      const RealVector xc = outside ? RealVector(centroid + 0.5 * (xr - centroid))
                                    : RealVector(centroid + 0.5 * (worst - centroid));
      const double fc = eval(xc);
      if (fc < (outside ? fr : vals.back())) {
        pts.back() = xc;
        vals.back() = fc;
      } else {
        for (std::size_t i = 1; i < pts.size(); ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = eval(pts[i]);
        }
      }
    }
    sort_simplex();
    res.history.push_back(vals.front());
  }
  res.x = pts.front();
  res.f = vals.front();
  return res;
}

}  // namespace qnn
