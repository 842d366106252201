// Copyright 2026 The ftmr Authors
// SPDX-License-Identifier: Apache-2.0
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

#include <doctest.h>

#include <random>

#include "ftmr/core.hpp"

using namespace ftmr;

namespace {
std::string bytes(std::initializer_list<int> b) {
  std::string s;
  for (int x : b) s.push_back(static_cast<char>(x));
  return s;
}
}  // namespace

TEST_CASE("encode empty record is eight zero bytes") {
  CHECK(encode_record(Record{"", ""}) == std::string(8, '\0'));
}

TEST_CASE("encode follows the length-prefixed layout") {
  CHECK(encode_record(Record{"a", ""}) == bytes({1, 0, 0, 0, 0x61, 0, 0, 0, 0}));
  CHECK(encode_record(Record{"k", "vv"}) == bytes({1, 0, 0, 0, 'k', 2, 0, 0, 0, 'v', 'v'}));
}

TEST_CASE("decode eight zero bytes") {
  const auto d = decode_record(std::string(8, '\0'));
  CHECK(d.record == Record{"", ""});
  CHECK(d.consumed == 8);
}

TEST_CASE("round trip over random records") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    Record r;
    r.key.resize(rng() % 40);
    r.value.resize(rng() % 300);
    for (auto& c : r.key) c = static_cast<char>(rng());
    for (auto& c : r.value) c = static_cast<char>(rng());
    const auto enc = encode_record(r);
    CHECK(enc.size() == 8 + record_size(r));
    const auto d = decode_record(enc);
    REQUIRE(d.record == r);
    CHECK(d.consumed == enc.size());
  }
}

TEST_CASE("concatenated records decode in order") {
  const std::vector<Record> rs{{"x", "1"}, {"", "yy"}, {"zzz", ""}};
  CHECK(decode_records(encode_records(rs)) == rs);
}

TEST_CASE("truncated input reports the field offset") {
  try {
    decode_record(std::string(7, '\0'));
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.offset() == 4);
  }
  // key length claims more bytes than present
  try {
    decode_record(bytes({5, 0, 0, 0, 'a'}));
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.offset() == 4);
  }
  // offsets are relative to the enclosing buffer
  std::string buf = encode_record(Record{"ab", "c"});
  buf += bytes({1, 0});
  try {
    decode_records(buf);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.offset() == 11);
  }
}

TEST_CASE("record size counts key and value bytes") {
  CHECK(record_size(Record{"abc", "de"}) == 5);
  CHECK(record_size(Record{}) == 0);
}

TEST_CASE("scalar helpers are little-endian") {
  CHECK(u64_bytes(0x0102030405060708ULL) == bytes({8, 7, 6, 5, 4, 3, 2, 1}));
  CHECK(get_u64(u64_bytes(42)) == 42);
  std::string s;
  put_f64(s, 0.15);
  CHECK(get_f64(s) == 0.15);
}
