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

#include "slimkit/nn/kernels.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slimkit/util/errors.h"

namespace slimkit::nn {
namespace {

std::string Where(std::string_view node) {
  return "node '" + std::string(node) + "': ";
}

// Range [lo, hi) of output positions whose input tap `k` lands inside
// [0, in_extent).
inline void TapRange(int k, int stride, int pad, int in_extent, int out_extent,
                     int* lo, int* hi) {
  // in = out * stride - pad + k, need 0 <= in < in_extent.
  int first = pad - k;
  *lo = first <= 0 ? 0 : (first + stride - 1) / stride;
  int last = in_extent - 1 + pad - k;
  *hi = last < 0 ? 0 : std::min(out_extent, last / stride + 1);
  if (*lo > *hi) *lo = *hi;
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor4 Conv2dForward(const Tensor4& input, const ConvParams& params,
                      ConvGeometry geom, std::string_view node) {
  params.check();
  if (input.c() != params.in_ch) {
    throw ShapeError(Where(node) + "input has " + std::to_string(input.c()) +
                     " channels, conv expects " +
                     std::to_string(params.in_ch));
  }
  if (geom.stride <= 0 || geom.pad < 0) {
    throw ShapeError(Where(node) + "invalid stride/padding");
  }
  const int ho = ConvOutputExtent(input.h(), params.kh, geom.stride, geom.pad);
  const int wo = ConvOutputExtent(input.w(), params.kw, geom.stride, geom.pad);
  if (ho <= 0 || wo <= 0) {
    throw ShapeError(Where(node) + "kernel does not fit padded input " +
                     input.shape().str());
  }
  Tensor4 out(input.n(), params.out_ch, ho, wo);
  const int batch = input.n();
  const int oc_count = params.out_ch;
  const int hi_in = input.h();
  const int wi_in = input.w();
  const int s = geom.stride;
  const int p = geom.pad;

#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < batch; ++b) {
    for (int oc = 0; oc < oc_count; ++oc) {
      double* dst = out.data() + out.offset(b, oc, 0, 0);
      const double bias = params.has_bias() ? params.bias[oc] : 0.0;
      std::fill(dst, dst + static_cast<std::size_t>(ho) * wo, bias);
      const double* wbase =
          params.weight.data() + static_cast<std::size_t>(oc) * params.filter_size();
      for (int ic = 0; ic < params.in_ch; ++ic) {
        const double* src = input.data() + input.offset(b, ic, 0, 0);
        for (int ky = 0; ky < params.kh; ++ky) {
          int oy_lo, oy_hi;
          TapRange(ky, s, p, hi_in, ho, &oy_lo, &oy_hi);
          for (int kx = 0; kx < params.kw; ++kx) {
            const double wv =
                wbase[(static_cast<std::size_t>(ic) * params.kh + ky) *
                          params.kw +
                      kx];
            int ox_lo, ox_hi;
            TapRange(kx, s, p, wi_in, wo, &ox_lo, &ox_hi);
            for (int oy = oy_lo; oy < oy_hi; ++oy) {
              const double* row =
                  src + static_cast<std::size_t>(oy * s - p + ky) * wi_in;
              double* orow = dst + static_cast<std::size_t>(oy) * wo;
              if (s == 1) {
                const double* r = row + (kx - p);
                for (int ox = ox_lo; ox < ox_hi; ++ox) orow[ox] += wv * r[ox];
              } else {
                for (int ox = ox_lo; ox < ox_hi; ++ox) {
                  orow[ox] += wv * row[ox * s - p + kx];
                }
              }
            }
          }
        }
      }
    }
  }
  return out;
}

Conv2dBackwardResult Conv2dBackward(const Tensor4& input,
                                    const ConvParams& params,
                                    ConvGeometry geom, const Tensor4& out_grad,
                                    bool want_input_grad) {
  const int ho = ConvOutputExtent(input.h(), params.kh, geom.stride, geom.pad);
  const int wo = ConvOutputExtent(input.w(), params.kw, geom.stride, geom.pad);
  if (out_grad.shape() != Shape4{input.n(), params.out_ch, ho, wo}) {
    throw ShapeError("conv backward: gradient shape " +
                     out_grad.shape().str() + " does not match output");
  }
  const int batch = input.n();
  const int s = geom.stride;
  const int p = geom.pad;
  const int hi_in = input.h();
  const int wi_in = input.w();
  const int kh = params.kh;
  const int kw = params.kw;
  const int in_ch = params.in_ch;
  const int out_ch = params.out_ch;

  Conv2dBackwardResult result;
  result.grads.weight.assign(params.weight.size(), 0.0);
  if (params.has_bias()) result.grads.bias.assign(out_ch, 0.0);

  // Weight and bias gradients: each output channel owns its filter.
#pragma omp parallel for schedule(static)
  for (int oc = 0; oc < out_ch; ++oc) {
    double* gw = result.grads.weight.data() +
                 static_cast<std::size_t>(oc) * params.filter_size();
    double bias_acc = 0.0;
    for (int b = 0; b < batch; ++b) {
      const double* dy = out_grad.data() + out_grad.offset(b, oc, 0, 0);
      if (params.has_bias()) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(ho) * wo; ++i) {
          bias_acc += dy[i];
        }
      }
      for (int ic = 0; ic < in_ch; ++ic) {
        const double* src = input.data() + input.offset(b, ic, 0, 0);
        for (int ky = 0; ky < kh; ++ky) {
          int oy_lo, oy_hi;
          TapRange(ky, s, p, hi_in, ho, &oy_lo, &oy_hi);
          for (int kx = 0; kx < kw; ++kx) {
            int ox_lo, ox_hi;
            TapRange(kx, s, p, wi_in, wo, &ox_lo, &ox_hi);
            double acc = 0.0;
            for (int oy = oy_lo; oy < oy_hi; ++oy) {
              const double* row =
                  src + static_cast<std::size_t>(oy * s - p + ky) * wi_in;
              const double* grow = dy + static_cast<std::size_t>(oy) * wo;
              for (int ox = ox_lo; ox < ox_hi; ++ox) {
                acc += grow[ox] * row[ox * s - p + kx];
              }
            }
            gw[(static_cast<std::size_t>(ic) * kh + ky) * kw + kx] += acc;
          }
        }
      }
    }
    if (params.has_bias()) result.grads.bias[oc] = bias_acc;
  }

  if (want_input_grad) {
    result.input_grad = Tensor4(input.shape());
    Tensor4& dx = result.input_grad;
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < batch; ++b) {
      for (int ic = 0; ic < in_ch; ++ic) {
        double* dst = dx.data() + dx.offset(b, ic, 0, 0);
        for (int oc = 0; oc < out_ch; ++oc) {
          const double* dy = out_grad.data() + out_grad.offset(b, oc, 0, 0);
          const double* wbase = params.weight.data() +
                                static_cast<std::size_t>(oc) * params.filter_size() +
                                static_cast<std::size_t>(ic) * kh * kw;
          for (int ky = 0; ky < kh; ++ky) {
            int oy_lo, oy_hi;
            TapRange(ky, s, p, hi_in, ho, &oy_lo, &oy_hi);
            for (int kx = 0; kx < kw; ++kx) {
              const double wv = wbase[ky * kw + kx];
              int ox_lo, ox_hi;
              TapRange(kx, s, p, wi_in, wo, &ox_lo, &ox_hi);
              for (int oy = oy_lo; oy < oy_hi; ++oy) {
                double* row =
                    dst + static_cast<std::size_t>(oy * s - p + ky) * wi_in;
                const double* grow = dy + static_cast<std::size_t>(oy) * wo;
                if (s == 1) {
                  double* r = row + (kx - p);
                  for (int ox = ox_lo; ox < ox_hi; ++ox) r[ox] += wv * grow[ox];
                } else {
                  for (int ox = ox_lo; ox < ox_hi; ++ox) {
                    row[ox * s - p + kx] += wv * grow[ox];
                  }
                }
              }
            }
          }
        }
      }
    }
  }
  return result;
}

Tensor4 BatchNormForward(const Tensor4& input, BatchNormParams& params,
                         BnMode mode, BatchNormCache* cache,
                         std::string_view node) {
  if (mode == BnMode::kInference) {
    return BatchNormInference(input, params, cache, node);
  }
  params.check();
  if (input.c() != params.channels()) {
    throw ShapeError(Where(node) + "input has " + std::to_string(input.c()) +
                     " channels, batchnorm has " +
                     std::to_string(params.channels()));
  }
  const int batch = input.n();
  const int channels = input.c();
  const std::size_t plane = input.shape().plane();
  const double count = static_cast<double>(batch) * plane;
  if (count <= 0) throw ShapeError(Where(node) + "empty batch");

  Tensor4 out(input.shape());
  Tensor4 normalized(input.shape());
  std::vector<double> inv_std(channels);

#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (int b = 0; b < batch; ++b) {
      for (double v : input.plane(b, c)) sum += v;
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (int b = 0; b < batch; ++b) {
      for (double v : input.plane(b, c)) sq += (v - mean) * (v - mean);
    }
    const double var = sq / count;
    const double istd = 1.0 / std::sqrt(var + params.eps);
    inv_std[c] = istd;
    const double g = params.gamma[c];
    const double be = params.beta[c];
    for (int b = 0; b < batch; ++b) {
      auto src = input.plane(b, c);
      auto xh = normalized.plane(b, c);
      auto dst = out.plane(b, c);
      for (std::size_t i = 0; i < plane; ++i) {
        xh[i] = (src[i] - mean) * istd;
        dst[i] = g * xh[i] + be;
      }
    }
    const double unbiased = count > 1 ? var * count / (count - 1) : var;
    params.running_mean[c] = (1.0 - kBatchNormMomentum) *
                                 params.running_mean[c] +
                             kBatchNormMomentum * mean;
    params.running_var[c] = (1.0 - kBatchNormMomentum) * params.running_var[c] +
                            kBatchNormMomentum * unbiased;
  }
  if (cache != nullptr) {
    cache->mode = BnMode::kTrain;
    cache->inv_std = std::move(inv_std);
    cache->normalized = std::move(normalized);
  }
  return out;
}

Tensor4 BatchNormInference(const Tensor4& input, const BatchNormParams& params,
                           BatchNormCache* cache, std::string_view node) {
  params.check();
  if (input.c() != params.channels()) {
    throw ShapeError(Where(node) + "input has " + std::to_string(input.c()) +
                     " channels, batchnorm has " +
                     std::to_string(params.channels()));
  }
  const int batch = input.n();
  const int channels = input.c();
  const std::size_t plane = input.shape().plane();
  Tensor4 out(input.shape());
  std::vector<double> inv_std(channels);
  Tensor4 normalized;
  if (cache != nullptr) normalized = Tensor4(input.shape());

#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    const double istd = 1.0 / std::sqrt(params.running_var[c] + params.eps);
    inv_std[c] = istd;
    const double mean = params.running_mean[c];
    const double g = params.gamma[c];
    const double be = params.beta[c];
    for (int b = 0; b < batch; ++b) {
      auto src = input.plane(b, c);
      auto dst = out.plane(b, c);
      for (std::size_t i = 0; i < plane; ++i) {
        const double xh = (src[i] - mean) * istd;
        dst[i] = g * xh + be;
      }
      if (cache != nullptr) {
        auto xh = normalized.plane(b, c);
        for (std::size_t i = 0; i < plane; ++i) xh[i] = (src[i] - mean) * istd;
      }
    }
  }
  if (cache != nullptr) {
    cache->mode = BnMode::kInference;
    cache->inv_std = std::move(inv_std);
    cache->normalized = std::move(normalized);
  }
  return out;
}

BatchNormBackwardResult BatchNormBackward(const Tensor4& out_grad,
                                          const BatchNormParams& params,
                                          const BatchNormCache& cache) {
  const Tensor4& xhat = cache.normalized;
  if (out_grad.shape() != xhat.shape()) {
    throw ShapeError("batchnorm backward: gradient shape mismatch");
  }
  const int batch = out_grad.n();
  const int channels = out_grad.c();
  const std::size_t plane = out_grad.shape().plane();
  const double count = static_cast<double>(batch) * plane;

  BatchNormBackwardResult r;
  r.input_grad = Tensor4(out_grad.shape());
  r.grads.gamma.assign(channels, 0.0);
  r.grads.beta.assign(channels, 0.0);

#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (int b = 0; b < batch; ++b) {
      auto dy = out_grad.plane(b, c);
      auto xh = xhat.plane(b, c);
      for (std::size_t i = 0; i < plane; ++i) {
        sum_dy += dy[i];
        sum_dy_xhat += dy[i] * xh[i];
      }
    }
    r.grads.beta[c] = sum_dy;
    r.grads.gamma[c] = sum_dy_xhat;
    const double scale = params.gamma[c] * cache.inv_std[c];
    for (int b = 0; b < batch; ++b) {
      auto dy = out_grad.plane(b, c);
      auto xh = xhat.plane(b, c);
      auto dx = r.input_grad.plane(b, c);
      if (cache.mode == BnMode::kTrain) {
        for (std::size_t i = 0; i < plane; ++i) {
          dx[i] = scale *
                  (dy[i] - sum_dy / count - xh[i] * sum_dy_xhat / count);
        }
      } else {
        for (std::size_t i = 0; i < plane; ++i) dx[i] = scale * dy[i];
      }
    }
  }
  return r;
}

Tensor4 SiluForward(const Tensor4& input) {
  Tensor4 out(input.shape());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(input.size());
  const double* x = input.data();
  double* y = out.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] * Sigmoid(x[i]);
  return out;
}

Tensor4 SiluBackward(const Tensor4& input, const Tensor4& out_grad) {
  Tensor4 dx(input.shape());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(input.size());
  const double* x = input.data();
  const double* dy = out_grad.data();
  double* d = dx.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double sg = Sigmoid(x[i]);
    d[i] = dy[i] * sg * (1.0 + x[i] * (1.0 - sg));
  }
  return dx;
}

Tensor4 ReluForward(const Tensor4& input) {
  Tensor4 out(input.shape());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(input.size());
  const double* x = input.data();
  double* y = out.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return out;
}

Tensor4 ReluBackward(const Tensor4& input, const Tensor4& out_grad) {
  Tensor4 dx(input.shape());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(input.size());
  const double* x = input.data();
  const double* dy = out_grad.data();
  double* d = dx.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) d[i] = x[i] > 0.0 ? dy[i] : 0.0;
  return dx;
}

Tensor4 MaxPoolForward(const Tensor4& input, PoolGeometry geom,
                       std::vector<std::size_t>* argmax,
                       std::string_view node) {
  if (geom.kernel <= 0 || geom.stride <= 0 || geom.pad < 0 ||
      geom.pad >= geom.kernel) {
    throw ShapeError(Where(node) + "invalid pooling geometry");
  }
  const int ho = ConvOutputExtent(input.h(), geom.kernel, geom.stride, geom.pad);
  const int wo = ConvOutputExtent(input.w(), geom.kernel, geom.stride, geom.pad);
  if (ho <= 0 || wo <= 0) {
    throw ShapeError(Where(node) + "pooling window does not fit input " +
                     input.shape().str());
  }
  Tensor4 out(input.n(), input.c(), ho, wo);
  if (argmax != nullptr) argmax->assign(out.size(), 0);
  const int batch = input.n();
  const int channels = input.c();
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < channels; ++c) {
      for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_at = 0;
          bool found = false;
          for (int ky = 0; ky < geom.kernel; ++ky) {
            const int iy = oy * geom.stride - geom.pad + ky;
            if (iy < 0 || iy >= input.h()) continue;
            for (int kx = 0; kx < geom.kernel; ++kx) {
              const int ix = ox * geom.stride - geom.pad + kx;
              if (ix < 0 || ix >= input.w()) continue;
              const std::size_t at = input.offset(b, c, iy, ix);
              if (!found || input.data()[at] > best) {
                best = input.data()[at];
                best_at = at;
                found = true;
              }
            }
          }
          const std::size_t o = out.offset(b, c, oy, ox);
          out.data()[o] = best;
          if (argmax != nullptr) (*argmax)[o] = best_at;
        }
      }
    }
  }
  return out;
}

Tensor4 MaxPoolBackward(const Shape4& input_shape,
                        const std::vector<std::size_t>& argmax,
                        const Tensor4& out_grad) {
  if (argmax.size() != out_grad.size()) {
    throw ShapeError("maxpool backward: argmax/gradient size mismatch");
  }
  Tensor4 dx(input_shape);
  const int batch = out_grad.n();
  const int channels = out_grad.c();
  const std::size_t oplane = out_grad.shape().plane();
  // Winners of one (b, c) output plane always lie in the same input plane.
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < channels; ++c) {
      const std::size_t base = out_grad.offset(b, c, 0, 0);
      for (std::size_t i = 0; i < oplane; ++i) {
        dx.data()[argmax[base + i]] += out_grad.data()[base + i];
      }
    }
  }
  return dx;
}

Tensor4 UpsampleNearest2Forward(const Tensor4& input) {
  Tensor4 out(input.n(), input.c(), input.h() * 2, input.w() * 2);
  const int batch = input.n();
  const int channels = input.c();
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < channels; ++c) {
      for (int y = 0; y < out.h(); ++y) {
        for (int x = 0; x < out.w(); ++x) {
          out.at(b, c, y, x) = input.at(b, c, y / 2, x / 2);
        }
      }
    }
  }
  return out;
}

Tensor4 UpsampleNearest2Backward(const Tensor4& out_grad) {
  Tensor4 dx(out_grad.n(), out_grad.c(), out_grad.h() / 2, out_grad.w() / 2);
  const int batch = dx.n();
  const int channels = dx.c();
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < channels; ++c) {
      for (int y = 0; y < dx.h(); ++y) {
        for (int x = 0; x < dx.w(); ++x) {
          dx.at(b, c, y, x) = out_grad.at(b, c, 2 * y, 2 * x) +
                              out_grad.at(b, c, 2 * y, 2 * x + 1) +
                              out_grad.at(b, c, 2 * y + 1, 2 * x) +
                              out_grad.at(b, c, 2 * y + 1, 2 * x + 1);
        }
      }
    }
  }
  return dx;
}

Tensor4 ConcatForward(std::span<const Tensor4* const> inputs,
                      std::string_view node) {
  if (inputs.empty()) throw ShapeError(Where(node) + "concat of nothing");
  const Shape4 first = inputs.front()->shape();
  int channels = 0;
  for (const Tensor4* t : inputs) {
    const Shape4 s = t->shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w) {
      throw ShapeError(Where(node) + "concat inputs " + first.str() + " and " +
                       s.str() + " disagree outside the channel axis");
    }
    channels += s.c;
  }
  Tensor4 out(first.n, channels, first.h, first.w);
  const std::size_t plane = first.plane();
  for (int b = 0; b < first.n; ++b) {
    int at = 0;
    for (const Tensor4* t : inputs) {
      const std::size_t len = static_cast<std::size_t>(t->c()) * plane;
      std::copy_n(t->data() + t->offset(b, 0, 0, 0), len,
                  out.data() + out.offset(b, at, 0, 0));
      at += t->c();
    }
  }
  return out;
}

std::vector<Tensor4> ConcatBackward(const Tensor4& out_grad,
                                    std::span<const int> channel_counts) {
  std::vector<Tensor4> grads;
  grads.reserve(channel_counts.size());
  const std::size_t plane = out_grad.shape().plane();
  int at = 0;
  for (int cc : channel_counts) {
    Tensor4 g(out_grad.n(), cc, out_grad.h(), out_grad.w());
    for (int b = 0; b < out_grad.n(); ++b) {
      std::copy_n(out_grad.data() + out_grad.offset(b, at, 0, 0),
                  static_cast<std::size_t>(cc) * plane,
                  g.data() + g.offset(b, 0, 0, 0));
    }
    at += cc;
    grads.push_back(std::move(g));
  }
  if (at != out_grad.c()) {
    throw ShapeError("concat backward: channel counts do not sum to " +
                     std::to_string(out_grad.c()));
  }
  return grads;
}

Tensor4 AddForward(std::span<const Tensor4* const> inputs,
                   std::string_view node) {
  if (inputs.empty()) throw ShapeError(Where(node) + "add of nothing");
  Tensor4 out = *inputs.front();
  for (std::size_t k = 1; k < inputs.size(); ++k) {
    if (inputs[k]->shape() != out.shape()) {
      throw ShapeError(Where(node) + "add inputs " + out.shape().str() +
                       " and " + inputs[k]->shape().str() + " differ");
    }
    const double* src = inputs[k]->data();
    double* dst = out.data();
    for (std::size_t i = 0; i < out.size(); ++i) dst[i] += src[i];
  }
  return out;
}

}  // namespace slimkit::nn
