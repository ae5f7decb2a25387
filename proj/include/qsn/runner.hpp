// Copyright 2026 The qsn Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qsn/scenario.hpp"

namespace qsn {

inline constexpr const char* kVersion = "0.1.0";

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct TaskResult {
  Table table;
  std::vector<PlotSeries> plots;
  std::vector<std::pair<std::string, double>> summary;
};

// Computes the task's table in memory. Results do not depend on `threads`.
TaskResult compute_task(const Scenario& s, std::size_t threads);

// 17 significant digits, '.' decimal separator.
std::string format_number(double x);
std::string format_csv(const Table& table);

// FNV-1a, used for the content hashes in the manifest.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);

struct RunOptions {
  std::filesystem::path out_dir = "qsn_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

struct RunArtifacts {
  std::filesystem::path csv;
  std::filesystem::path manifest;
  std::filesystem::path resolved;
  std::vector<std::filesystem::path> plots;
  TaskResult result;
};

// Writes <output>.csv, <output>.manifest.json, <output>.resolved.toml and,
// when plots are enabled, <output>.<series>.dat into out_dir.
RunArtifacts run_scenario(Scenario s, const RunOptions& options);

}  // namespace qsn
