/*
 * Copyright 2026 The Privver Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRIVVER_COMMON_BYTES_H_
#define PRIVVER_COMMON_BYTES_H_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace privver {

using Bytes = std::vector<uint8_t>;

// Append-only binary encoder. Multi-byte integers are written in the byte
// order named by the method; the wire and file formats mix both orders.
class ByteWriter {
 public:
  ByteWriter() = default;

  void U8(uint8_t v) { out_.push_back(v); }
  void I8(int8_t v) { out_.push_back(static_cast<uint8_t>(v)); }
  void U16Le(uint16_t v);
  void I16Le(int16_t v) { U16Le(static_cast<uint16_t>(v)); }
  void U32Le(uint32_t v);
  void U32Be(uint32_t v);
  void U64Le(uint64_t v);
  void F64Le(double v);
  void Raw(std::span<const uint8_t> data);
  void Raw(std::string_view data);

  // 4-byte big-endian length followed by the big-endian magnitude.
  void MagnitudeBe(const mpz_class& v);
  // Magnitude encoding followed by one sign byte (0 = non-negative, 1 = negative).
  void SignedBigInt(const mpz_class& v);
  // u32 length (little-endian) + raw bytes; used to nest self-contained blobs.
  void Blob(std::span<const uint8_t> data);

  size_t size() const { return out_.size(); }
  const Bytes& bytes() const { return out_; }
  Bytes Take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Bounds-checked decoder; every short read raises kParseError.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t U8();
  int8_t I8() { return static_cast<int8_t>(U8()); }
  uint16_t U16Le();
  int16_t I16Le() { return static_cast<int16_t>(U16Le()); }
  uint32_t U32Le();
  uint32_t U32Be();
  uint64_t U64Le();
  double F64Le();
  std::span<const uint8_t> Raw(size_t n);
  void Expect(std::string_view magic);

  mpz_class MagnitudeBe();
  mpz_class SignedBigInt();
  std::span<const uint8_t> Blob();

  size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  void ExpectDone() const;

 private:
  void Need(size_t n) const;

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

Bytes MpzToBytesBe(const mpz_class& v);
mpz_class MpzFromBytesBe(std::span<const uint8_t> bytes);

std::string HexEncode(std::span<const uint8_t> data);

Bytes ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::span<const uint8_t> data);

}  // namespace privver

#endif  // PRIVVER_COMMON_BYTES_H_
