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


#include "slimkit/detbench/dataset.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <json.hpp>

#include "slimkit/util/errors.h"
#include "slimkit/util/runtime_env.h"

namespace slimkit::detbench {
namespace {

using metrics::Box;
using metrics::BoxDet;

struct Rgb {
  double r, g, b;
};

double Luma(const Rgb& c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

// Inside test in the shape's own unit square, u and v in [0, 1].
bool InsideShape(int cls, double u, double v) {
  const double x = u - 0.5;
  const double y = v - 0.5;
  switch (cls) {
    case 0:  // square
      return true;
    case 1:  // disc
      return x * x + y * y <= 0.25;
    case 2:  // triangle, apex up
      return std::abs(x) <= 0.5 * v;
    case 3:  // cross
      return std::abs(x) <= 1.0 / 6 || std::abs(y) <= 1.0 / 6;
    case 4:  // diamond
      return std::abs(x) + std::abs(y) <= 0.5;
    case 5: {  // ring
      const double r2 = x * x + y * y;
      return r2 <= 0.25 && r2 >= 0.0625;
    }
  }
  return false;
}

class Canvas {
 public:
  Canvas(int size, Rgb bg) : size_(size), px_(static_cast<std::size_t>(size) * size, bg) {}

  void Set(int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < size_ && y < size_) px_[y * size_ + x] = c;
  }
  Rgb& at(int x, int y) { return px_[y * size_ + x]; }
  int size() const { return size_; }

 private:
  int size_;
  std::vector<Rgb> px_;
};

Rgb RandomColor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {u(rng), u(rng), u(rng)};
}

Sample RenderSample(const SceneConfig& cfg, std::uint64_t seed, int image_id,
                    std::string name) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int size = cfg.image_size;
  const double grey = 0.15 + 0.7 * u(rng);
  const Rgb bg{grey, grey, grey};
  Canvas canvas(size, bg);

  // Clutter: short strokes of random colour, painted before objects.
  const int strokes = static_cast<int>(std::lround(cfg.clutter * 12));
  for (int s = 0; s < strokes; ++s) {
    const Rgb c = RandomColor(rng);
    int x = static_cast<int>(u(rng) * size);
    int y = static_cast<int>(u(rng) * size);
    const int len = 3 + static_cast<int>(u(rng) * 6);
    const int dx = u(rng) < 0.5 ? 1 : 0;
    for (int k = 0; k < len; ++k) canvas.Set(x + k * dx, y + k * (1 - dx), c);
  }

  Sample sample;
  sample.name = std::move(name);
  const int count = cfg.min_objects +
                    static_cast<int>(rng() % (cfg.max_objects - cfg.min_objects + 1));
  const double min_side = size / 6.0;
  const double max_side = size * 0.375;
  std::vector<Box> placed;
  for (int k = 0; k < count; ++k) {
    const int cls = static_cast<int>(rng() % cfg.classes);
    Rgb color = RandomColor(rng);
    while (std::abs(Luma(color) - grey) < 0.25) color = RandomColor(rng);
    const double side = min_side + (max_side - min_side) * u(rng);
    const double w = side * (0.8 + 0.2 * u(rng));
    const double h = side * (0.8 + 0.2 * u(rng));
    bool ok = false;
    double x0 = 0, y0 = 0;
    for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
      x0 = 1 + u(rng) * (size - 2 - w);
      y0 = 1 + u(rng) * (size - 2 - h);
      ok = true;
      for (const Box& b : placed) {
        if (x0 - 2 < b.x2 && b.x1 < x0 + w + 2 && y0 - 2 < b.y2 && b.y1 < y0 + h + 2) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;
    // Rasterize at pixel centres; the label box is the pixel extent.
    int minx = size, miny = size, maxx = -1, maxy = -1;
    for (int y = static_cast<int>(y0); y <= static_cast<int>(y0 + h) && y < size; ++y) {
      for (int x = static_cast<int>(x0); x <= static_cast<int>(x0 + w) && x < size; ++x) {
        const double uu = (x + 0.5 - x0) / w;
        const double vv = (y + 0.5 - y0) / h;
        if (uu < 0 || uu > 1 || vv < 0 || vv > 1 || !InsideShape(cls, uu, vv)) continue;
        canvas.Set(x, y, color);
        minx = std::min(minx, x);
        miny = std::min(miny, y);
        maxx = std::max(maxx, x);
        maxy = std::max(maxy, y);
      }
    }
    if (maxx < 0) continue;
    const Box tight{static_cast<double>(minx), static_cast<double>(miny),
                    static_cast<double>(maxx + 1), static_cast<double>(maxy + 1)};
    placed.push_back({x0, y0, x0 + w, y0 + h});
    sample.labels.push_back({image_id, cls, tight, 1.0});
  }

  std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
  sample.image.width = size;
  sample.image.height = size;
  sample.image.rgb.resize(static_cast<std::size_t>(size) * size * 3);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const Rgb c = canvas.at(x, y);
      const double ch[3] = {c.r, c.g, c.b};
      for (int k = 0; k < 3; ++k) {
        double v = ch[k];
        if (cfg.noise_sigma > 0) v += noise(rng);
        v = std::clamp(v, 0.0, 1.0);
        sample.image.rgb[(static_cast<std::size_t>(y) * size + x) * 3 + k] =
            static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
    }
  }
  return sample;
}

std::vector<Sample> GenerateSplit(const SceneConfig& cfg, const std::string& split,
                                  int n) {
  std::vector<Sample> out(n);
  const std::uint64_t root = ChildSeed(cfg.seed, "data");
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "%04d", i);
    out[i] = RenderSample(cfg, ChildSeed(root, split + "/" + name), i, name);
  }
  return out;
}

nlohmann::ordered_json ConfigJson(const SceneConfig& c) {
  return {{"image_size", c.image_size}, {"classes", c.classes},
          {"min_objects", c.min_objects}, {"max_objects", c.max_objects},
          {"clutter", c.clutter}, {"noise_sigma", c.noise_sigma},
          {"seed", c.seed}};
}

}  // namespace

void SceneConfig::validate() const {
  if (image_size < 32) throw ConfigError("image_size must be >= 32");
  if (classes < 2 || classes > kMaxShapeClasses) {
    throw ConfigError("classes must lie in [2, " + std::to_string(kMaxShapeClasses) + "]");
  }
  if (min_objects < 0 || max_objects < min_objects || max_objects > 8) {
    throw ConfigError("objects per image must satisfy 0 <= min <= max <= 8");
  }
  if (!(clutter >= 0.0 && clutter <= 1.0)) throw ConfigError("clutter must lie in [0, 1]");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
}

const std::vector<std::string>& ShapeNames() {
  static const std::vector<std::string> names{"square", "disc", "triangle",
                                              "cross", "diamond", "ring"};
  return names;
}

Dataset GenerateDataset(const SceneConfig& cfg, int n_train, int n_val) {
  cfg.validate();
  if (n_train < 1 || n_val < 1) throw ConfigError("splits need at least one image");
  Dataset d;
  d.config = cfg;
  d.train = GenerateSplit(cfg, "train", n_train);
  d.val = GenerateSplit(cfg, "val", n_val);
  return d;
}

std::vector<std::uint8_t> EncodePng(const Image& image) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = image.width;
  img.height = image.height;
  img.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.rgb.data(), 0,
                                 nullptr)) {
    throw RuntimeFailure(std::string("png encode failed: ") + img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.rgb.data(), 0,
                                 nullptr)) {
    throw RuntimeFailure(std::string("png encode failed: ") + img.message);
  }
  out.resize(size);
  return out;
}

Image DecodePng(const std::vector<std::uint8_t>& bytes) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw InputError(std::string("png decode failed: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  Image out;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.rgb.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr)) {
    throw InputError(std::string("png decode failed: ") + img.message);
  }
  return out;
}

std::string ManifestJson(const Dataset& data) {
  nlohmann::ordered_json j;
  j["schema"] = "slimkit_dataset_v1";
  j["config"] = ConfigJson(data.config);
  j["classes"] = std::vector<std::string>(ShapeNames().begin(),
                                          ShapeNames().begin() + data.config.classes);
  for (const char* split : {"train", "val"}) {
    const auto& samples = std::string(split) == "train" ? data.train : data.val;
    auto& arr = j[split] = nlohmann::ordered_json::array();
    for (const Sample& s : samples) {
      arr.push_back({{"image", std::string(split) + "/" + s.name + ".png"},
                     {"labels", std::string(split) + "/" + s.name + ".txt"}});
    }
  }
  return j.dump(2) + "\n";
}

void SaveDataset(const Dataset& data, const std::filesystem::path& dir) {
  for (const char* split : {"train", "val"}) {
    std::filesystem::create_directories(dir / split);
    const auto& samples = std::string(split) == "train" ? data.train : data.val;
    for (const Sample& s : samples) {
      const auto png = EncodePng(s.image);
      WriteFileAtomic(dir / split / (s.name + ".png"),
                      std::string(png.begin(), png.end()));
      WriteFileAtomic(dir / split / (s.name + ".txt"),
                      metrics::FormatLabels(s.labels, s.image.width,
                                            s.image.height, false));
    }
  }
  WriteFileAtomic(dir / "manifest.json", ManifestJson(data));
}

Dataset LoadDataset(const std::filesystem::path& dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("dataset manifest: " + std::string(e.what()));
  }
  Dataset d;
  try {
    const auto& c = j.at("config");
    d.config.image_size = c.at("image_size").get<int>();
    d.config.classes = c.at("classes").get<int>();
    d.config.min_objects = c.at("min_objects").get<int>();
    d.config.max_objects = c.at("max_objects").get<int>();
    d.config.clutter = c.at("clutter").get<double>();
    d.config.noise_sigma = c.at("noise_sigma").get<double>();
    d.config.seed = c.at("seed").get<std::uint64_t>();
    for (const char* split : {"train", "val"}) {
      auto& samples = std::string(split) == "train" ? d.train : d.val;
      for (const auto& entry : j.at(split)) {
        Sample s;
        const std::filesystem::path image_path = entry.at("image").get<std::string>();
        s.name = image_path.stem().string();
        const std::string bytes = ReadFile(dir / image_path);
        s.image = DecodePng(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
        s.labels = metrics::ParseLabels(
            ReadFile(dir / entry.at("labels").get<std::string>()),
            static_cast<int>(samples.size()), s.image.width, s.image.height);
        samples.push_back(std::move(s));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("dataset manifest: " + std::string(e.what()));
  }
  d.config.validate();
  return d;
}

nn::Tensor4 ToTensor(const std::vector<const Sample*>& samples) {
  if (samples.empty()) return {};
  const int w = samples.front()->image.width;
  const int h = samples.front()->image.height;
  nn::Tensor4 t(static_cast<int>(samples.size()), 3, h, w);
  for (std::size_t b = 0; b < samples.size(); ++b) {
    const Image& img = samples[b]->image;
    if (img.width != w || img.height != h) {
      throw ShapeError("sample '" + samples[b]->name + "' has a different size");
    }
    for (int c = 0; c < 3; ++c) {
      auto plane = t.plane(static_cast<int>(b), c);
      for (int i = 0; i < w * h; ++i) plane[i] = img.rgb[i * 3 + c] / 255.0;
    }
  }
  return t;
}

}  // namespace slimkit::detbench
