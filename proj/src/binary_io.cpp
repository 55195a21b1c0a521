// Copyright 2026 The seqrec Authors
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

#include "seqrec/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "seqrec/errors.hpp"

namespace seqrec {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) noexcept {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

namespace {

template <typename T>
void append_raw(std::string& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.append(raw, sizeof(T));
}

}  // namespace

void ByteWriter::u32(std::uint32_t value) { append_raw(buffer_, value); }
void ByteWriter::u64(std::uint64_t value) { append_raw(buffer_, value); }
void ByteWriter::f32(float value) { append_raw(buffer_, value); }
void ByteWriter::f64(double value) { append_raw(buffer_, value); }

void ByteWriter::str(std::string_view value) {
  u32(static_cast<std::uint32_t>(value.size()));
  buffer_.append(value);
}

void ByteReader::need(std::size_t n) const {
  if (data_.size() - pos_ < n) {
    throw ParseError(fmt::format("{}: truncated at byte {}", source_, pos_));
  }
}

std::string_view ByteReader::bytes(std::size_t n) {
  need(n);
  auto out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

namespace {

template <typename T>
T read_raw(ByteReader& reader) {
  T value;
  std::memcpy(&value, reader.bytes(sizeof(T)).data(), sizeof(T));
  return value;
}

}  // namespace

std::uint32_t ByteReader::u32() { return read_raw<std::uint32_t>(*this); }
std::uint64_t ByteReader::u64() { return read_raw<std::uint64_t>(*this); }
float ByteReader::f32() { return read_raw<float>(*this); }
double ByteReader::f64() { return read_raw<double>(*this); }

std::string ByteReader::str() {
  auto n = u32();
  return std::string(bytes(n));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("read failed for {}", path.string()));
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

}  // namespace seqrec
