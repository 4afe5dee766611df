// Copyright (c) 2026 The sqagen Authors
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

#ifndef SQAGEN_MANIFEST_HPP_
#define SQAGEN_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sqagen/core_model.hpp"
#include "sqagen/random.hpp"

namespace sqagen {

// Reads a JSONL file into raw rows. Blank lines are skipped; any other line
// must hold one JSON object. Errors carry the 1-based line number.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

// Writes one compact JSON object per line, LF terminated. An empty list
// produces an empty file.
void write_jsonl(std::span<const Json> rows, const std::filesystem::path& path);

std::vector<UtteranceRecord> read_manifest(const std::filesystem::path& path);
std::vector<QATriplet> read_triplets(const std::filesystem::path& path);

void write_manifest(std::span<const UtteranceRecord> records, const std::filesystem::path& path);
void write_manifest(std::span<const QATriplet> records, const std::filesystem::path& path);

template <typename T>
struct DatasetSplit {
  std::vector<T> train;
  std::vector<T> dev;
  std::vector<T> test;
};

// Seeded shuffle, then prefix slices in the order test, dev, train.
template <typename T>
DatasetSplit<T> split_dataset(std::vector<T> records, std::uint64_t seed, std::size_t dev_size,
                              std::size_t test_size) {
  if (dev_size > records.size() || test_size > records.size() - dev_size) {
    throw ConfigError("split sizes dev=" + std::to_string(dev_size) + " test=" +
                      std::to_string(test_size) + " exceed corpus of " +
                      std::to_string(records.size()));
  }
  Rng rng(seed);
  seeded_shuffle(std::span<T>(records), rng);

  DatasetSplit<T> out;
  auto first = std::make_move_iterator(records.begin());
  out.test.assign(first, first + static_cast<std::ptrdiff_t>(test_size));
  first += static_cast<std::ptrdiff_t>(test_size);
  out.dev.assign(first, first + static_cast<std::ptrdiff_t>(dev_size));
  first += static_cast<std::ptrdiff_t>(dev_size);
  out.train.assign(first, std::make_move_iterator(records.end()));
  return out;
}

}  // namespace sqagen

#endif  // SQAGEN_MANIFEST_HPP_
