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

#include "slimkit/nn/reference_kernels.h"

#include <cmath>

namespace slimkit::nn::reference {

Tensor4 Conv2dForward(const Tensor4& input, const ConvParams& params,
                      ConvGeometry geom) {
  const int ho = ConvOutputExtent(input.h(), params.kh, geom.stride, geom.pad);
  const int wo = ConvOutputExtent(input.w(), params.kw, geom.stride, geom.pad);
  Tensor4 out(input.n(), params.out_ch, ho, wo);
  for (int b = 0; b < input.n(); ++b) {
    for (int oc = 0; oc < params.out_ch; ++oc) {
      for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
          double acc = params.has_bias() ? params.bias[oc] : 0.0;
          for (int ic = 0; ic < params.in_ch; ++ic) {
            for (int ky = 0; ky < params.kh; ++ky) {
              for (int kx = 0; kx < params.kw; ++kx) {
                const int iy = oy * geom.stride - geom.pad + ky;
                const int ix = ox * geom.stride - geom.pad + kx;
                if (iy < 0 || iy >= input.h() || ix < 0 || ix >= input.w()) {
                  continue;
                }
                const std::size_t wi =
                    ((static_cast<std::size_t>(oc) * params.in_ch + ic) *
                         params.kh +
                     ky) *
                        params.kw +
                    kx;
                acc += params.weight[wi] * input.at(b, ic, iy, ix);
              }
            }
          }
          out.at(b, oc, oy, ox) = acc;
        }
      }
    }
  }
  return out;
}

Conv2dBackwardResult Conv2dBackward(const Tensor4& input,
                                    const ConvParams& params,
                                    ConvGeometry geom,
                                    const Tensor4& out_grad) {
  Conv2dBackwardResult r;
  r.input_grad = Tensor4(input.shape());
  r.grads.weight.assign(params.weight.size(), 0.0);
  if (params.has_bias()) r.grads.bias.assign(params.out_ch, 0.0);
  for (int b = 0; b < out_grad.n(); ++b) {
    for (int oc = 0; oc < params.out_ch; ++oc) {
      for (int oy = 0; oy < out_grad.h(); ++oy) {
        for (int ox = 0; ox < out_grad.w(); ++ox) {
          const double dy = out_grad.at(b, oc, oy, ox);
          if (params.has_bias()) r.grads.bias[oc] += dy;
          for (int ic = 0; ic < params.in_ch; ++ic) {
            for (int ky = 0; ky < params.kh; ++ky) {
              for (int kx = 0; kx < params.kw; ++kx) {
                const int iy = oy * geom.stride - geom.pad + ky;
                const int ix = ox * geom.stride - geom.pad + kx;
                if (iy < 0 || iy >= input.h() || ix < 0 || ix >= input.w()) {
                  continue;
                }
                const std::size_t wi =
                    ((static_cast<std::size_t>(oc) * params.in_ch + ic) *
                         params.kh +
                     ky) *
                        params.kw +
                    kx;
                r.grads.weight[wi] += dy * input.at(b, ic, iy, ix);
                r.input_grad.at(b, ic, iy, ix) += dy * params.weight[wi];
              }
            }
          }
        }
      }
    }
  }
  return r;
}

Tensor4 BatchNormTrainForward(const Tensor4& input,
                              const BatchNormParams& params) {
  Tensor4 out(input.shape());
  const double count = static_cast<double>(input.n()) * input.h() * input.w();
  for (int c = 0; c < input.c(); ++c) {
    double mean = 0.0;
    for (int b = 0; b < input.n(); ++b)
      for (int y = 0; y < input.h(); ++y)
        for (int x = 0; x < input.w(); ++x) mean += input.at(b, c, y, x);
    mean /= count;
    double var = 0.0;
    for (int b = 0; b < input.n(); ++b)
      for (int y = 0; y < input.h(); ++y)
        for (int x = 0; x < input.w(); ++x) {
          const double d = input.at(b, c, y, x) - mean;
          var += d * d;
        }
    var /= count;
    for (int b = 0; b < input.n(); ++b)
      for (int y = 0; y < input.h(); ++y)
        for (int x = 0; x < input.w(); ++x) {
          out.at(b, c, y, x) =
              params.gamma[c] * (input.at(b, c, y, x) - mean) /
                  std::sqrt(var + params.eps) +
              params.beta[c];
        }
  }
  return out;
}

}  // namespace slimkit::nn::reference
