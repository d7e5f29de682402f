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

#ifndef SLIMKIT_NN_TENSOR_H_
#define SLIMKIT_NN_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace slimkit::nn {

struct Shape4 {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  std::size_t numel() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  friend bool operator==(const Shape4&, const Shape4&) = default;
  std::string str() const;
};

// Dense rank-4 array of doubles in (batch, channel, row, column) order.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Shape4 shape, double fill = 0.0);
  Tensor4(int n, int c, int h, int w, double fill = 0.0)
      : Tensor4(Shape4{n, c, h, w}, fill) {}
  Tensor4(Shape4 shape, std::vector<double> data);

  const Shape4& shape() const { return shape_; }
  int n() const { return shape_.n; }
  int c() const { return shape_.c; }
  int h() const { return shape_.h; }
  int w() const { return shape_.w; }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  std::size_t offset(int b, int ch, int y, int x) const {
    return ((static_cast<std::size_t>(b) * shape_.c + ch) * shape_.h + y) *
               shape_.w +
           x;
  }
  double& at(int b, int ch, int y, int x) { return data_[offset(b, ch, y, x)]; }
  double at(int b, int ch, int y, int x) const {
    return data_[offset(b, ch, y, x)];
  }

  std::span<double> plane(int b, int ch) {
    return {data_.data() + offset(b, ch, 0, 0), shape_.plane()};
  }
  std::span<const double> plane(int b, int ch) const {
    return {data_.data() + offset(b, ch, 0, 0), shape_.plane()};
  }

  bool all_finite() const;

 private:
  Shape4 shape_;
  std::vector<double> data_;
};

}  // namespace slimkit::nn

#endif  // SLIMKIT_NN_TENSOR_H_
