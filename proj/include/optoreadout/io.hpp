// Copyright 2026 The optoreadout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPTOREADOUT_IO_HPP
#define OPTOREADOUT_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "optoreadout/budget.hpp"
#include "optoreadout/detection.hpp"
#include "optoreadout/dynamics.hpp"

namespace optoreadout::io {

enum class Format { csv, bin };
Format parse_format(std::string_view text);
std::string_view format_extension(Format f);

using ColumnData =
    std::variant<std::vector<double>, std::vector<std::uint64_t>, std::vector<std::uint8_t>>;

struct Column {
  std::string name;
  ColumnData data;

  std::size_t size() const;
  bool operator==(const Column&) const = default;
};

/// Column-oriented table. `header` lines are written as `# ` comments in CSV
/// and as one newline-joined text block in the binary format.
struct Table {
  std::vector<std::string> header;
  std::vector<Column> columns;

  std::size_t rows() const;
  template <class T>
  void add(std::string name, std::vector<T> values) {
    columns.push_back({std::move(name), ColumnData{std::move(values)}});
  }
  bool operator==(const Table&) const = default;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

void write_csv(const Table& t, std::ostream& out);

// Binary layout, little-endian throughout:
//   "ORXCOL1\0"  u32 version  u32 header_len  header bytes
//   u64 n_rows   u32 n_cols
//   per column: u32 name_len  name bytes  u8 dtype (0 f64, 1 u64, 2 u8)  data
void write_binary(const Table& t, std::ostream& out);
/// Throws ErrorKind::io on a malformed stream.
Table read_binary(std::istream& in);

/// Writes `<stem>.<ext>`; returns the path. Throws ErrorKind::io.
std::filesystem::path write_table(const Table& t, const std::filesystem::path& dir,
                                  std::string_view stem, Format f);

// ------------------------------------------------------------ artifacts

Table trajectory_table(const dynamics::ScenarioResult& r);
Table shots_table(const detection::ShotRunResult& r);
/// Fixed-width histogram of both classes with the fitted mixture curves
/// (expected counts per bin).
Table histogram_table(const detection::ShotRunResult& r, std::size_t bins = 100);
Table budget_table(budget::SweepVariable var, std::span<const double> values,
                   std::span<const budget::Prediction> rows);

/// Key = value reports.
std::string steady_state_report(const dynamics::ScenarioResult& g,
                                const dynamics::ScenarioResult& e);
std::string fidelity_report(const detection::ShotRunResult& r);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace optoreadout::io

#endif  // OPTOREADOUT_IO_HPP
