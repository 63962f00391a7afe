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

#include <complex>
#include <cstdint>
#include <functional>
#include <iostream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qnn {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<cplx>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr const char* kVersion = "0.3.0";

// Precondition violations: bad shapes, out-of-range indices, mismatched bases.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Integrator instability, negativity beyond tolerance, vanishing norms.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment configuration rejected by the schema.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(std::string_view)>;

namespace detail {
// Prints each distinct message once per process.
inline void stderr_warning(std::string_view msg) {
  static std::mutex mu;
  static std::set<std::string, std::less<>> seen;
  std::lock_guard<std::mutex> lock(mu);
  if (seen.insert(std::string(msg)).second) std::cerr << "qnn warning: " << msg << '\n';
}

inline WarningHandler& warning_handler() {
  static WarningHandler handler = stderr_warning;
  return handler;
}
}  // namespace detail

inline void reset_warning_handler() { detail::warning_handler() = detail::stderr_warning; }

// Replaces the process-wide warning sink. Pass an empty function to silence.
inline void set_warning_handler(WarningHandler handler) {
  detail::warning_handler() = std::move(handler);
}

inline void warn(std::string_view msg) {
  if (auto& h = detail::warning_handler()) h(msg);
}

// Counter-based random streams. Every random quantity in the project is a
// pure function of (seed, stream tag, index), so results never depend on
// call order or thread scheduling.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t tag(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives the seed of a named sub-stream.
inline std::uint64_t substream(std::uint64_t seed, std::string_view name) {
  return mix(seed, tag(name));
}

// Uniform double in [0, 1) addressed by (seed, index).
inline double uniform01(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(mix(seed, index) >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t index, double lo,
                      double hi) {
  return lo + (hi - lo) * uniform01(seed, index);
}

}  // namespace rng
}  // namespace qnn
