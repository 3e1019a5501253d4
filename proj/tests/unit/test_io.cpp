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

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>

#include "optoreadout/error.hpp"
#include "optoreadout/io.hpp"

using namespace optoreadout;
using namespace optoreadout::io;

namespace {

Table sample_table() {
  Table t;
  t.header = {"manifest_id = abc", "seed = 7"};
  t.add<double>("x", {0.1, -2.5e-300, 1.0 / 3.0, std::numeric_limits<double>::max()});
  t.add<std::uint64_t>("n", {0, 1, 18446744073709551615ULL, 42});
  t.add<std::uint8_t>("flag", {0, 1, 1, 0});
  return t;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return static_cast<ErrorKind>(0);
}

}  // namespace

TEST_CASE("binary round trip is exact") {
  const Table t = sample_table();
  std::stringstream ss;
  write_binary(t, ss);
  const Table back = read_binary(ss);
  CHECK(back == t);
  CHECK(back.rows() == 4);
}

TEST_CASE("binary layout header") {
  std::stringstream ss;
  write_binary(sample_table(), ss);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 8) == std::string("ORXCOL1\0", 8));
  CHECK(static_cast<unsigned char>(bytes[8]) == 1);  // version, little-endian
  CHECK(bytes[9] == 0);
}

TEST_CASE("malformed streams are io errors") {
  std::stringstream bad("NOTMAGIC........");
  CHECK(kind_of([&] { read_binary(bad); }) == ErrorKind::io);
  std::stringstream ss;
  write_binary(sample_table(), ss);
  const std::string full = ss.str();
  std::stringstream cut(full.substr(0, full.size() - 3));
  CHECK(kind_of([&] { read_binary(cut); }) == ErrorKind::io);
  std::string wrong = full;
  wrong[8] = 9;
  std::stringstream ver(wrong);
  CHECK(kind_of([&] { read_binary(ver); }) == ErrorKind::io);
}

TEST_CASE("CSV layout") {
  std::ostringstream out;
  write_csv(sample_table(), out);
  const std::string s = out.str();
  CHECK(s.rfind("# manifest_id = abc\n# seed = 7\nx,n,flag\n0.1,0,0\n", 0) == 0);
  CHECK(s.find("18446744073709551615") != std::string::npos);
}

TEST_CASE("doubles print in shortest round-trip form") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -1e-310, 0.0}) {
    const std::string text = format_double(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("files and formats") {
  CHECK(parse_format("csv") == Format::csv);
  CHECK(parse_format("bin") == Format::bin);
  CHECK(format_extension(Format::bin) == "orx");
  CHECK(kind_of([] { parse_format("json"); }) == ErrorKind::argument);

  const auto dir = std::filesystem::temp_directory_path() / "orx_io_test";
  std::filesystem::remove_all(dir);
  const auto path = write_table(sample_table(), dir / "nested", "t", Format::bin);
  CHECK(path.filename() == "t.orx");
  const std::string bytes = read_text(path);
  std::istringstream in(bytes);
  CHECK(read_binary(in) == sample_table());
  write_text(dir / "r.txt", "a = 1\n");
  CHECK(read_text(dir / "r.txt") == "a = 1\n");
  CHECK(kind_of([&] { read_text(dir / "missing.txt"); }) == ErrorKind::io);
  std::filesystem::remove_all(dir);
}

TEST_CASE("mismatched columns are rejected") {
  Table t;
  t.add<double>("a", {1.0, 2.0});
  t.add<double>("b", {1.0});
  std::stringstream ss;
  CHECK(kind_of([&] { write_binary(t, ss); }) == ErrorKind::argument);
}
