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

#ifndef SLIMKIT_UTIL_BASE64_H_
#define SLIMKIT_UTIL_BASE64_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slimkit {

// Standard alphabet with '=' padding.
std::string Base64Encode(std::span<const unsigned char> bytes);
std::optional<std::vector<unsigned char>> Base64Decode(std::string_view text);

// Doubles as little-endian IEEE-754 binary64, base64 encoded.
std::string EncodeDoubles(std::span<const double> values);
std::optional<std::vector<double>> DecodeDoubles(std::string_view text);

}  // namespace slimkit

#endif  // SLIMKIT_UTIL_BASE64_H_
