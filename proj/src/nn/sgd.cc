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

#include "slimkit/nn/sgd.h"

#include <string>

#include "slimkit/util/errors.h"

namespace slimkit::nn {
namespace {

void Update(std::vector<double>& p, const std::vector<double>& g,
            std::vector<double>& v, double lr, double momentum,
            const char* what) {
  if (g.size() != p.size()) {
    throw ShapeError(std::string("sgd: ") + what + " gradient length " +
                     std::to_string(g.size()) + " != parameter length " +
                     std::to_string(p.size()));
  }
  if (v.empty()) v.assign(p.size(), 0.0);
  if (v.size() != p.size()) {
    throw ShapeError(std::string("sgd: ") + what +
                     " velocity no longer mirrors its parameter");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    v[i] = momentum * v[i] + g[i];
    p[i] -= lr * v[i];
  }
}

}  // namespace

void OptState::validate() const {
  if (!(learning_rate > 0.0)) {
    throw ConfigError("learning rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
}

void SgdStep(std::span<LayerTensors* const> params,
             std::span<const LayerGrads> grads, OptState& opt) {
  opt.validate();
  if (params.size() != grads.size()) {
    throw ShapeError("sgd: " + std::to_string(params.size()) +
                     " parameter sets but " + std::to_string(grads.size()) +
                     " gradient sets");
  }
  if (opt.velocity.empty()) opt.velocity.resize(params.size());
  if (opt.velocity.size() != params.size()) {
    throw ShapeError("sgd: velocity list does not mirror parameter list");
  }
  const double lr = opt.learning_rate;
  const double mu = opt.momentum;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const LayerGrads& g = grads[i];
    if (std::holds_alternative<std::monostate>(g)) continue;
    LayerTensors& p = *params[i];
    LayerGrads& v = opt.velocity[i];
    if (const auto* cg = std::get_if<ConvGrads>(&g)) {
      auto* cp = std::get_if<ConvParams>(&p);
      if (cp == nullptr) throw ShapeError("sgd: conv gradient for non-conv");
      if (std::holds_alternative<std::monostate>(v)) v = ConvGrads{};
      auto& cv = std::get<ConvGrads>(v);
      Update(cp->weight, cg->weight, cv.weight, lr, mu, "conv weight");
      if (cp->has_bias() || !cg->bias.empty()) {
        Update(cp->bias, cg->bias, cv.bias, lr, mu, "conv bias");
      }
    } else {
      const auto& bg = std::get<BatchNormGrads>(g);
      auto* bp = std::get_if<BatchNormParams>(&p);
      if (bp == nullptr) throw ShapeError("sgd: batchnorm gradient for non-bn");
      if (std::holds_alternative<std::monostate>(v)) v = BatchNormGrads{};
      auto& bv = std::get<BatchNormGrads>(v);
      Update(bp->gamma, bg.gamma, bv.gamma, lr, mu, "gamma");
      Update(bp->beta, bg.beta, bv.beta, lr, mu, "beta");
    }
  }
}

}  // namespace slimkit::nn
