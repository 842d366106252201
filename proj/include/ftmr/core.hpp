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

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ftmr {

/// Identifier of a processing element. Stable for the whole job; a failed
/// PE's id is never handed out again.
struct PeId {
  std::uint32_t value = 0;

  constexpr PeId() = default;
  constexpr explicit PeId(std::uint32_t v) : value(v) {}
  constexpr auto operator<=>(const PeId&) const = default;
};

/// Step 0 is input ingestion, step k >= 1 is the k-th MapReduce step.
struct StepId {
  std::uint32_t value = 0;

  constexpr StepId() = default;
  constexpr explicit StepId(std::uint32_t v) : value(v) {}
  constexpr auto operator<=>(const StepId&) const = default;
  constexpr StepId next() const { return StepId(value + 1); }
};

/// A key/value pair. Both halves are opaque byte strings.
struct Record {
  std::string key;
  std::string value;

  bool operator==(const Record&) const = default;
  auto operator<=>(const Record&) const = default;
};

/// Volume accounting unit: key bytes plus value bytes.
inline std::uint64_t record_size(const Record& r) {
  return r.key.size() + r.value.size();
}

class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public std::runtime_error {
 public:
  DecodeError(std::size_t offset, const std::string& what)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Invalid configuration (bad flag values, inconsistent plans).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A failure pattern whose lost state cannot be reconstructed.
class UnrecoverableFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A user Map/Reduce function threw.
class JobError : public std::runtime_error {
 public:
  JobError(PeId pe, StepId step, const std::string& where,
           const std::string& what)
      : std::runtime_error("PE " + std::to_string(pe.value) + ", step " +
                           std::to_string(step.value) + ", " + where + ": " +
                           what),
        pe_(pe),
        step_(step) {}

  PeId pe() const { return pe_; }
  StepId step() const { return step_; }

 private:
  PeId pe_;
  StepId step_;
};

// Wire format: [key_len u32 LE][key][value_len u32 LE][value].
void encode_record(const Record& r, std::string& out);
std::string encode_record(const Record& r);

struct Decoded {
  Record record;
  std::size_t consumed = 0;
};

/// Decodes one record from the front of `bytes`. `base_offset` is added to
/// offsets reported in errors, for decoding inside a larger buffer.
Decoded decode_record(std::string_view bytes, std::size_t base_offset = 0);

std::string encode_records(const std::vector<Record>& records);
std::vector<Record> decode_records(std::string_view bytes);

// Little-endian scalar helpers used by the typed benchmark encodings.
void put_u64(std::string& out, std::uint64_t v);
std::uint64_t get_u64(std::string_view bytes, std::size_t pos = 0);
void put_f64(std::string& out, double v);
double get_f64(std::string_view bytes, std::size_t pos = 0);
std::string u64_bytes(std::uint64_t v);

}  // namespace ftmr
