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

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "optoreadout/error.hpp"
#include "optoreadout/io.hpp"

namespace optoreadout::io {

namespace {

constexpr std::array<char, 8> kMagic{'O', 'R', 'X', 'C', 'O', 'L', '1', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v, int bytes = 8) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, bytes);
}

std::uint64_t get_u64(std::istream& in, int bytes = 8) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), bytes))
    fail(ErrorKind::io, "columnar: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

std::string get_bytes(std::istream& in, std::uint64_t n) {
  if (n > (1ULL << 32)) fail(ErrorKind::io, "columnar: implausible length field");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n)))
    fail(ErrorKind::io, "columnar: truncated stream");
  return s;
}

}  // namespace

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::csv;
  if (text == "bin") return Format::bin;
  fail(ErrorKind::argument, "unknown format '" + std::string(text) + "' (expected csv or bin)");
}

std::string_view format_extension(Format f) { return f == Format::csv ? "csv" : "orx"; }

std::size_t Column::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

std::size_t Table::rows() const { return columns.empty() ? 0 : columns.front().size(); }

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

void write_csv(const Table& t, std::ostream& out) {
  for (const auto& line : t.header) out << "# " << line << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c].name;
  out << '\n';
  const std::size_t n = t.rows();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = typename std::decay_t<decltype(v)>::value_type;
            if constexpr (std::is_same_v<T, double>)
              out << format_double(v[r]);
            else
              out << static_cast<std::uint64_t>(v[r]);
          },
          t.columns[c].data);
    }
    out << '\n';
  }
}

void write_binary(const Table& t, std::ostream& out) {
  const std::size_t n = t.rows();
  for (const auto& c : t.columns)
    if (c.size() != n) fail(ErrorKind::argument, "columnar: column '" + c.name + "' has a different length");
  std::string header;
  for (std::size_t k = 0; k < t.header.size(); ++k) header += (k ? "\n" : "") + t.header[k];
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, kVersion, 4);
  put_u64(out, header.size(), 4);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  put_u64(out, n);
  put_u64(out, t.columns.size(), 4);
  for (const auto& c : t.columns) {
    put_u64(out, c.name.size(), 4);
    out.write(c.name.data(), static_cast<std::streamsize>(c.name.size()));
    put_u64(out, c.data.index(), 1);
    std::visit(
        [&](const auto& v) {
          using T = typename std::decay_t<decltype(v)>::value_type;
          for (const T& x : v) {
            if constexpr (std::is_same_v<T, double>)
              put_u64(out, std::bit_cast<std::uint64_t>(x));
            else
              put_u64(out, x, sizeof(T));
          }
        },
        c.data);
  }
  if (!out) fail(ErrorKind::io, "columnar: write failed");
}

Table read_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    fail(ErrorKind::io, "columnar: bad magic, not an ORXCOL1 stream");
  const auto version = get_u64(in, 4);
  if (version != kVersion)
    fail(ErrorKind::io, "columnar: unsupported version " + std::to_string(version));
  Table t;
  const std::string header = get_bytes(in, get_u64(in, 4));
  if (!header.empty()) {
    std::istringstream hs(header);
    for (std::string line; std::getline(hs, line);) t.header.push_back(line);
  }
  const auto n = get_u64(in);
  const auto n_cols = get_u64(in, 4);
  for (std::uint64_t c = 0; c < n_cols; ++c) {
    Column col;
    col.name = get_bytes(in, get_u64(in, 4));
    const auto dtype = get_u64(in, 1);
    switch (dtype) {
      case 0: {
        std::vector<double> v(n);
        for (auto& x : v) x = std::bit_cast<double>(get_u64(in));
        col.data = std::move(v);
        break;
      }
      case 1: {
        std::vector<std::uint64_t> v(n);
        for (auto& x : v) x = get_u64(in);
        col.data = std::move(v);
        break;
      }
      case 2: {
        std::vector<std::uint8_t> v(n);
        for (auto& x : v) x = static_cast<std::uint8_t>(get_u64(in, 1));
        col.data = std::move(v);
        break;
      }
      default:
        fail(ErrorKind::io, "columnar: unknown dtype " + std::to_string(dtype));
    }
    t.columns.push_back(std::move(col));
  }
  return t;
}

std::filesystem::path write_table(const Table& t, const std::filesystem::path& dir,
                                  std::string_view stem, Format f) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create directory " + dir.string() + ": " + ec.message());
  const auto path = dir / (std::string(stem) + "." + std::string(format_extension(f)));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
  if (f == Format::csv)
    write_csv(t, out);
  else
    write_binary(t, out);
  out.flush();
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
  return path;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::io, "cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace optoreadout::io
