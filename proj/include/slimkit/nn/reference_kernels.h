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

// Serial, deliberately naive kernels. They exist as oracles for the tests and
// as the baseline in the kernel benchmark; nothing in the pipeline calls them.

#ifndef SLIMKIT_NN_REFERENCE_KERNELS_H_
#define SLIMKIT_NN_REFERENCE_KERNELS_H_

#include "slimkit/nn/kernels.h"

namespace slimkit::nn::reference {

// Six nested loops over (b, oc, oy, ox, ic, ky, kx) with a bounds test per tap.
Tensor4 Conv2dForward(const Tensor4& input, const ConvParams& params,
                      ConvGeometry geom);

Conv2dBackwardResult Conv2dBackward(const Tensor4& input,
                                    const ConvParams& params,
                                    ConvGeometry geom, const Tensor4& out_grad);

// Batch statistics computed with a two-pass loop per channel.
Tensor4 BatchNormTrainForward(const Tensor4& input,
                              const BatchNormParams& params);

}  // namespace slimkit::nn::reference

#endif  // SLIMKIT_NN_REFERENCE_KERNELS_H_
