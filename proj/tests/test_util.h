// Copyright 2026 The Slimkit Authors. All Rights Reserved.
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

// Shared helpers for the test binaries: seeded random tensors and the
// central finite-difference oracle.

#ifndef SLIMKIT_TESTS_TEST_UTIL_H_
#define SLIMKIT_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "slimkit/graph/graph_model.h"
#include "slimkit/nn/tensor.h"

namespace slimkit::testing {

inline nn::Tensor4 RandomTensor(nn::Shape4 shape, std::mt19937_64& rng,
                                double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  nn::Tensor4 t(shape);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

inline std::vector<double> RandomVector(std::size_t n, std::mt19937_64& rng,
                                        double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

// Sum of elementwise products; a random projection makes every gradient
// component non-trivial.
inline double Dot(const nn::Tensor4& a, const nn::Tensor4& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

// (L(p + h) - L(p - h)) / 2h, restoring p afterwards.
template <typename Loss>
double CentralDifference(Loss&& loss, double& param, double h = 1e-5) {
  const double saved = param;
  param = saved + h;
  const double plus = loss();
  param = saved - h;
  const double minus = loss();
  param = saved;
  return (plus - minus) / (2.0 * h);
}

inline double RelativeError(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

inline std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("slimkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Gammas shaped like the end of sparse training: most channels collapse
// towards zero, the rest stay spread out.
inline void SparseStyleGammas(graph::GraphModel& model, std::mt19937_64& rng,
                              double collapsed_fraction = 0.6) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> small(0.0, 0.01);
  for (graph::NodeSpec& n : model.nodes) {
    if (n.kind != graph::NodeKind::kBatchNorm) continue;
    for (double& g : n.bn_params().gamma) {
      g = u(rng) < collapsed_fraction ? small(rng) : 0.2 + 0.8 * u(rng);
    }
  }
}

inline std::filesystem::path DataDir() {
  return std::filesystem::path(SLIMKIT_SOURCE_DIR) / "data";
}

}  // namespace slimkit::testing

#endif  // SLIMKIT_TESTS_TEST_UTIL_H_
