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

#ifndef PRIVVER_PROTOCOLS_CHANNEL_H_
#define PRIVVER_PROTOCOLS_CHANNEL_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "privver/common/bytes.h"
#include "privver/common/digest.h"

namespace privver::protocols {

enum class MessageType : uint8_t {
  kHello = 1,
  kRegisterReq = 2,
  kRegisterFeatures = 3,
  kIdCard = 4,
  kVerifyReq = 5,
  kVerifyFeatures = 6,
  kSubprotocol = 7,
  kDecision = 8,
  kError = 9,
};

const char* MessageTypeName(MessageType type);

inline constexpr uint8_t kProtocolVersion = 0x01;
inline constexpr size_t kMaxFrameBytes = size_t{1} << 30;

struct Message {
  MessageType type = MessageType::kHello;
  Bytes payload;
};

// 4-byte big-endian length of (version, type, payload), then those bytes.
Bytes EncodeFrame(const Message& message);
// Parses one complete frame; ProtocolAbort on malformed input.
Message DecodeFrame(std::span<const uint8_t> frame);

enum class Direction : uint8_t { kSent = 0, kReceived = 1 };

struct TranscriptEntry {
  Direction direction = Direction::kSent;
  MessageType type = MessageType::kHello;
  uint32_t length = 0;
  Digest digest{};
  uint64_t timestamp = 0;
};

// Append-only log of one endpoint's traffic. Timestamps are nanoseconds since
// the channel opened, or a logical counter in test mode so that seeded runs
// serialize identically.
class SessionTranscript {
 public:
  SessionTranscript();

  void Append(Direction direction, MessageType type, std::span<const uint8_t> frame);
  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  Bytes Serialize() const;

 private:
  bool logical_;
  std::chrono::steady_clock::time_point start_;
  std::vector<TranscriptEntry> entries_;
};

// Ordered, reliable, bidirectional message stream. Every message passing
// through an endpoint is logged to its transcript. Time spent blocked in
// Receive is accumulated so callers can report compute time without waiting.
class Channel {
 public:
  virtual ~Channel();

  void Send(const Message& message);
  Message Receive();

  const SessionTranscript& transcript() const { return transcript_; }
  double blocked_seconds() const { return blocked_seconds_; }
  size_t messages_sent() const { return messages_sent_; }
  size_t messages_received() const { return messages_received_; }
  size_t messages() const { return messages_sent_ + messages_received_; }
  size_t bytes_sent() const { return bytes_sent_; }
  size_t bytes_received() const { return bytes_received_; }

 protected:
  virtual void SendFrame(Bytes frame) = 0;
  virtual Bytes ReceiveFrame() = 0;

 private:
  SessionTranscript transcript_;
  double blocked_seconds_ = 0;
  size_t messages_sent_ = 0;
  size_t messages_received_ = 0;
  size_t bytes_sent_ = 0;
  size_t bytes_received_ = 0;
};

// Two connected in-memory endpoints. Receiving on an endpoint whose peer has
// been destroyed raises ProtocolAbort.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> CreateInProcessPair();

struct TwoPartyRun {
  SessionTranscript alice;
  SessionTranscript bob;
  std::exception_ptr alice_error;
  std::exception_ptr bob_error;

  // Rethrows the root failure: an error other than the ProtocolAbort that the
  // surviving party sees when its peer goes away.
  void Rethrow() const;
};

// Runs Bob on a worker thread and Alice on the calling thread over an
// in-process pair. A party that throws closes its endpoint so the peer aborts
// instead of blocking.
TwoPartyRun RunInProcess(const std::function<void(Channel&)>& alice,
                         const std::function<void(Channel&)>& bob);

// TCP endpoint over a connected socket.
std::unique_ptr<Channel> ConnectTcp(const std::string& host, uint16_t port);

class TcpListener {
 public:
  // Port 0 picks an ephemeral port.
  TcpListener(const std::string& host, uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  uint16_t port() const { return port_; }
  std::unique_ptr<Channel> Accept();
  // Unblocks a pending Accept, which then throws IoFailure.
  void Close();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

}  // namespace privver::protocols

#endif  // PRIVVER_PROTOCOLS_CHANNEL_H_
