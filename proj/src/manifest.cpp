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

#include "sqagen/manifest.hpp"

#include <fstream>
#include <string>

namespace sqagen {
namespace {

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

template <typename T, typename Convert>
std::vector<T> read_rows(const std::filesystem::path& path, Convert convert) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    Json row;
    try {
      row = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ManifestError(path.string(), lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!row.is_object()) throw ManifestError(path.string(), lineno, "line is not a JSON object");
    try {
      out.push_back(convert(std::move(row)));
    } catch (const InvariantViolation& e) {
      throw ManifestError(path.string(), lineno, e.what());
    } catch (const Json::exception& e) {
      throw ManifestError(path.string(), lineno, e.what());
    }
  }
  if (in.bad()) throw IoError("read failure on " + path.string());
  return out;
}

template <typename T>
void write_rows(std::span<const T> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& r : rows) {
    if constexpr (std::is_same_v<T, Json>) {
      out << r.dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
    } else {
      out << to_json(r).dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
    }
  }
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  return read_rows<Json>(path, [](Json row) { return row; });
}

void write_jsonl(std::span<const Json> rows, const std::filesystem::path& path) {
  write_rows(rows, path);
}

std::vector<UtteranceRecord> read_manifest(const std::filesystem::path& path) {
  return read_rows<UtteranceRecord>(path, [](const Json& row) { return utterance_from_json(row); });
}

std::vector<QATriplet> read_triplets(const std::filesystem::path& path) {
  return read_rows<QATriplet>(path, [](const Json& row) { return triplet_from_json(row); });
}

void write_manifest(std::span<const UtteranceRecord> records, const std::filesystem::path& path) {
  for (const auto& r : records) r.validate();
  write_rows(records, path);
}

void write_manifest(std::span<const QATriplet> records, const std::filesystem::path& path) {
  for (const auto& t : records) t.validate();
  write_rows(records, path);
}

}  // namespace sqagen
