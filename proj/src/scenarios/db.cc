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

#include "privver/scenarios/db.h"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "privver/common/error.h"

namespace privver::scenarios {
namespace {

constexpr std::string_view kMagic = "PVDB";
constexpr uint8_t kVersion = 1;
constexpr uint64_t kHeaderBytes = 5;
constexpr uint8_t kRecordEntry = 1;
constexpr uint8_t kTombstoneEntry = 2;

[[noreturn]] void FailErrno(ErrorCode code, const std::string& what) {
  Fail(code, what + ": " + std::strerror(errno));
}

void WriteAll(int fd, const uint8_t* data, size_t n) {
  while (n > 0) {
    ssize_t k = ::write(fd, data, n);
    if (k < 0) {
      if (errno == EINTR) continue;
      FailErrno(ErrorCode::kDbWriteFailure, "database write failed");
    }
    data += k;
    n -= static_cast<size_t>(k);
  }
}

void ReadAllAt(int fd, uint8_t* data, size_t n, uint64_t offset) {
  while (n > 0) {
    ssize_t k = ::pread(fd, data, n, static_cast<off_t>(offset));
    if (k < 0 && errno == EINTR) continue;
    if (k <= 0) FailErrno(ErrorCode::kIoFailure, "database read failed");
    data += k;
    n -= static_cast<size_t>(k);
    offset += static_cast<uint64_t>(k);
  }
}

}  // namespace

Database::Database(std::string path) : path_(std::move(path)) {}

Database::~Database() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Database> Database::Open(const std::string& path) {
  std::unique_ptr<Database> db(new Database(path));
  db->Load();
  return db;
}

void Database::Load() {
  Bytes header;
  header.insert(header.end(), kMagic.begin(), kMagic.end());
  header.push_back(kVersion);
  if (path_.empty()) {
    memory_ = header;
    end_ = memory_.size();
    return;
  }
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
  if (fd_ < 0) FailErrno(ErrorCode::kIoFailure, "cannot open database " + path_);
  struct stat st {};
  if (::fstat(fd_, &st) != 0) FailErrno(ErrorCode::kIoFailure, "cannot stat database " + path_);
  const uint64_t size = static_cast<uint64_t>(st.st_size);
  if (size == 0) {
    WriteAll(fd_, header.data(), header.size());
    if (::fsync(fd_) != 0) FailErrno(ErrorCode::kDbWriteFailure, "database sync failed");
    end_ = header.size();
    return;
  }
  if (size < kHeaderBytes) Fail(ErrorCode::kParseError, path_ + " is not a registration database");
  Bytes got(kHeaderBytes);
  ReadAllAt(fd_, got.data(), got.size(), 0);
  if (got != header) Fail(ErrorCode::kParseError, path_ + " is not a version 1 registration database");

  uint64_t pos = kHeaderBytes;
  while (pos < size) {
    // A torn final frame from an interrupted append is dropped.
    if (size - pos < 4) break;
    uint8_t len_bytes[4];
    ReadAllAt(fd_, len_bytes, 4, pos);
    const uint32_t len = (uint32_t{len_bytes[0]} << 24) | (uint32_t{len_bytes[1]} << 16) |
                         (uint32_t{len_bytes[2]} << 8) | uint32_t{len_bytes[3]};
    if (len < 9 || size - pos - 4 < len) break;
    uint8_t head[9];
    ReadAllAt(fd_, head, 9, pos + 4);
    uint64_t index = 0;
    for (int i = 0; i < 8; ++i) index |= uint64_t{head[1 + i]} << (8 * i);
    if (head[0] == kRecordEntry) {
      index_[index] = {pos + 5, len - 1};
    } else if (head[0] == kTombstoneEntry) {
      index_.erase(index);
    } else {
      Fail(ErrorCode::kParseError, "corrupt database entry at offset " + std::to_string(pos));
    }
    next_index_ = std::max(next_index_, index + 1);
    pos += 4 + len;
  }
  if (pos != size && ::ftruncate(fd_, static_cast<off_t>(pos)) != 0) {
    FailErrno(ErrorCode::kDbWriteFailure, "cannot drop torn database tail");
  }
  end_ = pos;
}

void Database::WriteFrame(const Bytes& entry) {
  const uint32_t len = static_cast<uint32_t>(entry.size());
  Bytes frame{static_cast<uint8_t>(len >> 24), static_cast<uint8_t>(len >> 16), static_cast<uint8_t>(len >> 8),
              static_cast<uint8_t>(len)};
  frame.insert(frame.end(), entry.begin(), entry.end());
  if (path_.empty()) {
    memory_.insert(memory_.end(), frame.begin(), frame.end());
  } else {
    if (::lseek(fd_, static_cast<off_t>(end_), SEEK_SET) < 0) FailErrno(ErrorCode::kDbWriteFailure, "seek failed");
    WriteAll(fd_, frame.data(), frame.size());
    if (::fdatasync(fd_) != 0) FailErrno(ErrorCode::kDbWriteFailure, "database sync failed");
  }
  end_ += frame.size();
}

Bytes Database::ReadEntry(const Location& loc) const {
  if (path_.empty()) {
    return Bytes(memory_.begin() + static_cast<ptrdiff_t>(loc.offset),
                 memory_.begin() + static_cast<ptrdiff_t>(loc.offset + loc.length));
  }
  Bytes out(loc.length);
  ReadAllAt(fd_, out.data(), out.size(), loc.offset);
  return out;
}

uint64_t Database::Append(RegistrationRecord record) {
  std::lock_guard writer(writer_mu_);
  record.index = next_index_;
  Bytes entry{kRecordEntry};
  Bytes body = SerializeRecord(record);
  entry.insert(entry.end(), body.begin(), body.end());
  const uint64_t offset = end_ + 5;
  {
    // The in-memory buffer may reallocate, so readers are excluded while it grows.
    std::unique_lock lock(index_mu_, std::defer_lock);
    if (path_.empty()) lock.lock();
    WriteFrame(entry);
  }
  std::unique_lock lock(index_mu_);
  index_[record.index] = {offset, static_cast<uint32_t>(body.size())};
  return next_index_++;
}

void Database::Revoke(uint64_t index) {
  std::lock_guard writer(writer_mu_);
  if (!Contains(index)) Fail(ErrorCode::kUnknownId, "unknown id");
  Bytes entry{kTombstoneEntry};
  for (int i = 0; i < 8; ++i) entry.push_back(static_cast<uint8_t>(index >> (8 * i)));
  {
    std::unique_lock lock(index_mu_, std::defer_lock);
    if (path_.empty()) lock.lock();
    WriteFrame(entry);
  }
  std::unique_lock lock(index_mu_);
  index_.erase(index);
}

std::optional<RegistrationRecord> Database::Lookup(uint64_t index) const {
  std::shared_lock lock(index_mu_);
  auto it = index_.find(index);
  if (it == index_.end()) return std::nullopt;
  return ParseRecord(ReadEntry(it->second));
}

bool Database::Contains(uint64_t index) const {
  std::shared_lock lock(index_mu_);
  return index_.count(index) != 0;
}

size_t Database::size() const {
  std::shared_lock lock(index_mu_);
  return index_.size();
}

std::unique_lock<std::mutex> Database::LockIndex(uint64_t index) {
  std::mutex* mu;
  {
    std::lock_guard guard(locks_mu_);
    auto& slot = locks_[index];
    if (!slot) slot = std::make_unique<std::mutex>();
    mu = slot.get();
  }
  return std::unique_lock(*mu);
}

}  // namespace privver::scenarios
