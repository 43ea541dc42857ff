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

#include "privver/common/bytes.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "privver/common/error.h"

namespace privver {

void ByteWriter::U16Le(uint16_t v) {
  out_.push_back(static_cast<uint8_t>(v));
  out_.push_back(static_cast<uint8_t>(v >> 8));
}

void ByteWriter::U32Le(uint32_t v) {
  for (int i = 0; i < 4; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::U32Be(uint32_t v) {
  for (int i = 3; i >= 0; --i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::U64Le(uint64_t v) {
  for (int i = 0; i < 8; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::F64Le(double v) { U64Le(std::bit_cast<uint64_t>(v)); }

void ByteWriter::Raw(std::span<const uint8_t> data) {
  out_.insert(out_.end(), data.begin(), data.end());
}

void ByteWriter::Raw(std::string_view data) {
  out_.insert(out_.end(), data.begin(), data.end());
}

void ByteWriter::MagnitudeBe(const mpz_class& v) {
  Bytes mag = MpzToBytesBe(abs(v));
  U32Be(static_cast<uint32_t>(mag.size()));
  Raw(mag);
}

void ByteWriter::SignedBigInt(const mpz_class& v) {
  MagnitudeBe(v);
  U8(sgn(v) < 0 ? 1 : 0);
}

void ByteWriter::Blob(std::span<const uint8_t> data) {
  U32Le(static_cast<uint32_t>(data.size()));
  Raw(data);
}

void ByteReader::Need(size_t n) const {
  if (data_.size() - pos_ < n) {
    Fail(ErrorCode::kParseError, "truncated input");
  }
}

uint8_t ByteReader::U8() {
  Need(1);
  return data_[pos_++];
}

uint16_t ByteReader::U16Le() {
  Need(2);
  uint16_t v = static_cast<uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
  pos_ += 2;
  return v;
}

uint32_t ByteReader::U32Le() {
  Need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

uint32_t ByteReader::U32Be() {
  Need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 4;
  return v;
}

uint64_t ByteReader::U64Le() {
  Need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

double ByteReader::F64Le() { return std::bit_cast<double>(U64Le()); }

std::span<const uint8_t> ByteReader::Raw(size_t n) {
  Need(n);
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

void ByteReader::Expect(std::string_view magic) {
  auto got = Raw(magic.size());
  if (std::memcmp(got.data(), magic.data(), magic.size()) != 0) {
    Fail(ErrorCode::kParseError, "bad magic, expected " + std::string(magic));
  }
}

mpz_class ByteReader::MagnitudeBe() {
  uint32_t len = U32Be();
  return MpzFromBytesBe(Raw(len));
}

mpz_class ByteReader::SignedBigInt() {
  mpz_class v = MagnitudeBe();
  uint8_t sign = U8();
  if (sign > 1) Fail(ErrorCode::kParseError, "bad sign byte");
  return sign ? mpz_class(-v) : v;
}

std::span<const uint8_t> ByteReader::Blob() {
  uint32_t len = U32Le();
  return Raw(len);
}

void ByteReader::ExpectDone() const {
  if (!done()) Fail(ErrorCode::kParseError, "trailing bytes");
}

Bytes MpzToBytesBe(const mpz_class& v) {
  if (sgn(v) == 0) return {};
  size_t count = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  Bytes out(count);
  size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
  out.resize(written);
  return out;
}

mpz_class MpzFromBytesBe(std::span<const uint8_t> bytes) {
  mpz_class v;
  if (!bytes.empty()) {
    mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  return v;
}

std::string HexEncode(std::span<const uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

Bytes ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoFailure, "cannot open " + path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorCode::kIoFailure, "read failed: " + path);
  return data;
}

void WriteFile(const std::string& path, std::span<const uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoFailure, "cannot open " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) Fail(ErrorCode::kIoFailure, "write failed: " + path);
}

}  // namespace privver
