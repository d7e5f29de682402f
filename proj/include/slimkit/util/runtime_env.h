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

#ifndef SLIMKIT_UTIL_RUNTIME_ENV_H_
#define SLIMKIT_UTIL_RUNTIME_ENV_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace slimkit {

// Applies SLIMKIT_THREADS (if set and positive) as the OpenMP thread cap and
// returns the resulting cap.
int ConfigureThreadsFromEnv();
int MaxThreads();
void SetMaxThreads(int n);

// Named child seed: stable function of (root, name), used so data
// generation, initialization and shuffling draw independent streams.
std::uint64_t ChildSeed(std::uint64_t root, std::string_view name);

// Writes `contents` to a sibling temp file and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace slimkit

#endif  // SLIMKIT_UTIL_RUNTIME_ENV_H_
