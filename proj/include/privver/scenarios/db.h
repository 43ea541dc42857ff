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

#ifndef PRIVVER_SCENARIOS_DB_H_
#define PRIVVER_SCENARIOS_DB_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "privver/scenarios/types.h"

namespace privver::scenarios {

// Append-only registration log. The file is "PVDB", a version byte, then
// frames of (u32 big-endian length, entry). An entry is a record or a
// tombstone revoking an index. The in-memory index maps each live resident to
// the location of its record and is rebuilt when the file is opened; records
// are read back from disk on lookup. An empty path keeps everything in memory.
class Database {
 public:
  static std::unique_ptr<Database> Open(const std::string& path);
  static std::unique_ptr<Database> InMemory() { return Open(""); }
  ~Database();
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;

  // Assigns the next index, writes the record durably and returns the index.
  uint64_t Append(RegistrationRecord record);
  std::optional<RegistrationRecord> Lookup(uint64_t index) const;
  void Revoke(uint64_t index);
  bool Contains(uint64_t index) const;
  size_t size() const;

  // Serializes sessions that touch the same resident.
  std::unique_lock<std::mutex> LockIndex(uint64_t index);

 private:
  struct Location {
    uint64_t offset = 0;
    uint32_t length = 0;
  };

  explicit Database(std::string path);
  void Load();
  void WriteFrame(const Bytes& entry);
  Bytes ReadEntry(const Location& loc) const;

  std::string path_;
  int fd_ = -1;
  uint64_t end_ = 0;
  Bytes memory_;
  uint64_t next_index_ = 1;
  std::map<uint64_t, Location> index_;
  mutable std::shared_mutex index_mu_;
  std::mutex writer_mu_;
  std::mutex locks_mu_;
  std::map<uint64_t, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace privver::scenarios

#endif  // PRIVVER_SCENARIOS_DB_H_
