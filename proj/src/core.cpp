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

#include "ftmr/core.hpp"

#include <bit>
#include <cstring>
#include <limits>

namespace ftmr {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  return v;
}

void put_field(std::string& out, const std::string& field, const char* name) {
  if (field.size() > std::numeric_limits<std::uint32_t>::max())
    throw EncodingError(std::string(name) + " longer than 2^32-1 bytes");
  put_u32(out, static_cast<std::uint32_t>(field.size()));
  out.append(field);
}

}  // namespace

void encode_record(const Record& r, std::string& out) {
  put_field(out, r.key, "key");
  put_field(out, r.value, "value");
}

std::string encode_record(const Record& r) {
  std::string out;
  out.reserve(8 + r.key.size() + r.value.size());
  encode_record(r, out);
  return out;
}

Decoded decode_record(std::string_view bytes, std::size_t base_offset) {
  std::size_t pos = 0;
  auto field = [&](const char* name) {
    if (bytes.size() - pos < 4)
      throw DecodeError(base_offset + pos, std::string("truncated ") + name + " length");
    const std::uint32_t len = get_u32(bytes, pos);
    pos += 4;
    if (bytes.size() - pos < len)
      throw DecodeError(base_offset + pos, std::string("truncated ") + name + " bytes");
    std::string s(bytes.substr(pos, len));
    pos += len;
    return s;
  };
  Decoded d;
  d.record.key = field("key");
  d.record.value = field("value");
  d.consumed = pos;
  return d;
}

std::string encode_records(const std::vector<Record>& records) {
  std::string out;
  for (const auto& r : records) encode_record(r, out);
  return out;
}

std::vector<Record> decode_records(std::string_view bytes) {
  std::vector<Record> out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    auto d = decode_record(bytes.substr(pos), pos);
    pos += d.consumed;
    out.push_back(std::move(d.record));
  }
  return out;
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(std::string_view bytes, std::size_t pos) {
  if (bytes.size() < pos + 8) throw DecodeError(pos, "truncated u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  return v;
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

double get_f64(std::string_view bytes, std::size_t pos) {
  return std::bit_cast<double>(get_u64(bytes, pos));
}

std::string u64_bytes(std::uint64_t v) {
  std::string s;
  put_u64(s, v);
  return s;
}

}  // namespace ftmr
