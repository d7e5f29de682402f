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

// Forward and backward kernels. Every kernel here is OpenMP-parallel over an
// axis whose outputs are owned by exactly one thread, so results are bitwise
// identical for any thread count. Serial counterparts for testing live in
// reference_kernels.h.

#ifndef SLIMKIT_NN_KERNELS_H_
#define SLIMKIT_NN_KERNELS_H_

#include <span>
#include <string_view>
#include <vector>

#include "slimkit/nn/layer_tensors.h"
#include "slimkit/nn/tensor.h"

namespace slimkit::nn {

struct ConvGeometry {
  int stride = 1;
  int pad = 0;
};

// Output extent along one axis, or <= 0 when the kernel does not fit.
inline int ConvOutputExtent(int in, int kernel, int stride, int pad) {
  const int span = in + 2 * pad - kernel;
  if (span < 0) return 0;
  return span / stride + 1;
}

Tensor4 Conv2dForward(const Tensor4& input, const ConvParams& params,
                      ConvGeometry geom, std::string_view node = "conv");

struct Conv2dBackwardResult {
  Tensor4 input_grad;  // empty when not requested
  ConvGrads grads;
};

Conv2dBackwardResult Conv2dBackward(const Tensor4& input,
                                    const ConvParams& params,
                                    ConvGeometry geom, const Tensor4& out_grad,
                                    bool want_input_grad = true);

enum class BnMode { kTrain, kInference };

// Values the backward pass needs from a batch-norm forward call.
struct BatchNormCache {
  BnMode mode = BnMode::kInference;
  std::vector<double> inv_std;  // per channel
  Tensor4 normalized;           // pre-affine x-hat
};

// Train mode normalizes with batch statistics and folds them into the
// running statistics with momentum kBatchNormMomentum (unbiased variance).
Tensor4 BatchNormForward(const Tensor4& input, BatchNormParams& params,
                         BnMode mode, BatchNormCache* cache = nullptr,
                         std::string_view node = "batchnorm");
Tensor4 BatchNormInference(const Tensor4& input, const BatchNormParams& params,
                           BatchNormCache* cache = nullptr,
                           std::string_view node = "batchnorm");

struct BatchNormBackwardResult {
  Tensor4 input_grad;
  BatchNormGrads grads;
};

BatchNormBackwardResult BatchNormBackward(const Tensor4& out_grad,
                                          const BatchNormParams& params,
                                          const BatchNormCache& cache);

Tensor4 SiluForward(const Tensor4& input);
Tensor4 SiluBackward(const Tensor4& input, const Tensor4& out_grad);
Tensor4 ReluForward(const Tensor4& input);
Tensor4 ReluBackward(const Tensor4& input, const Tensor4& out_grad);

struct PoolGeometry {
  int kernel = 2;
  int stride = 2;
  int pad = 0;
};

// Padding cells never win the max. `argmax` receives, per output element,
// the flat offset of the winning input element.
Tensor4 MaxPoolForward(const Tensor4& input, PoolGeometry geom,
                       std::vector<std::size_t>* argmax = nullptr,
                       std::string_view node = "maxpool2");
Tensor4 MaxPoolBackward(const Shape4& input_shape,
                        const std::vector<std::size_t>& argmax,
                        const Tensor4& out_grad);

Tensor4 UpsampleNearest2Forward(const Tensor4& input);
Tensor4 UpsampleNearest2Backward(const Tensor4& out_grad);

Tensor4 ConcatForward(std::span<const Tensor4* const> inputs,
                      std::string_view node = "concat");
std::vector<Tensor4> ConcatBackward(const Tensor4& out_grad,
                                    std::span<const int> channel_counts);

Tensor4 AddForward(std::span<const Tensor4* const> inputs,
                   std::string_view node = "add");

}  // namespace slimkit::nn

#endif  // SLIMKIT_NN_KERNELS_H_
