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

#include "privver/protocols/channel.h"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "privver/common/error.h"
#include "privver/common/test_mode.h"
#include "privver/common/timer.h"

namespace privver::protocols {

const char* MessageTypeName(MessageType type) {
  switch (type) {
    case MessageType::kHello: return "HELLO";
    case MessageType::kRegisterReq: return "REGISTER_REQ";
    case MessageType::kRegisterFeatures: return "REGISTER_FEATURES";
    case MessageType::kIdCard: return "ID_CARD";
    case MessageType::kVerifyReq: return "VERIFY_REQ";
    case MessageType::kVerifyFeatures: return "VERIFY_FEATURES";
    case MessageType::kSubprotocol: return "SUBPROTOCOL";
    case MessageType::kDecision: return "DECISION";
    case MessageType::kError: return "ERROR";
  }
  return "UNKNOWN";
}

Bytes EncodeFrame(const Message& message) {
  const size_t body = message.payload.size() + 2;
  if (body > kMaxFrameBytes) Fail(ErrorCode::kProtocolAbort, "frame too large");
  ByteWriter w;
  w.U32Be(static_cast<uint32_t>(body));
  w.U8(kProtocolVersion);
  w.U8(static_cast<uint8_t>(message.type));
  w.Raw(message.payload);
  return w.Take();
}

Message DecodeFrame(std::span<const uint8_t> frame) {
  if (frame.size() < 6) Fail(ErrorCode::kProtocolAbort, "short frame");
  ByteReader r(frame);
  uint32_t body = r.U32Be();
  if (body != frame.size() - 4) Fail(ErrorCode::kProtocolAbort, "frame length mismatch");
  uint8_t version = r.U8();
  if (version != kProtocolVersion) {
    Fail(ErrorCode::kProtocolAbort, "unsupported protocol version " + std::to_string(version));
  }
  uint8_t type = r.U8();
  if (type < 1 || type > 9) Fail(ErrorCode::kProtocolAbort, "unknown message type " + std::to_string(type));
  Message m;
  m.type = static_cast<MessageType>(type);
  auto rest = r.Raw(r.remaining());
  m.payload.assign(rest.begin(), rest.end());
  return m;
}

SessionTranscript::SessionTranscript()
    : logical_(TestModeEnabled()), start_(std::chrono::steady_clock::now()) {}

void SessionTranscript::Append(Direction direction, MessageType type,
                               std::span<const uint8_t> frame) {
  TranscriptEntry e;
  e.direction = direction;
  e.type = type;
  e.length = static_cast<uint32_t>(frame.size());
  e.digest = Sha256(frame);
  if (logical_) {
    e.timestamp = entries_.size();
  } else {
    e.timestamp = static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                            std::chrono::steady_clock::now() - start_)
                                            .count());
  }
  entries_.push_back(e);
}

Bytes SessionTranscript::Serialize() const {
  ByteWriter w;
  w.U32Le(static_cast<uint32_t>(entries_.size()));
  for (const auto& e : entries_) {
    w.U8(static_cast<uint8_t>(e.direction));
    w.U8(static_cast<uint8_t>(e.type));
    w.U32Le(e.length);
    w.Raw(e.digest);
    w.U64Le(e.timestamp);
  }
  return w.Take();
}

Channel::~Channel() = default;

void Channel::Send(const Message& message) {
  Bytes frame = EncodeFrame(message);
  transcript_.Append(Direction::kSent, message.type, frame);
  ++messages_sent_;
  bytes_sent_ += frame.size();
  SendFrame(std::move(frame));
}

Message Channel::Receive() {
  Stopwatch wait;
  Bytes frame = ReceiveFrame();
  blocked_seconds_ += wait.Seconds();
  Message m = DecodeFrame(frame);
  transcript_.Append(Direction::kReceived, m.type, frame);
  ++messages_received_;
  bytes_received_ += frame.size();
  return m;
}

namespace {

struct Pipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Bytes> queue[2];
  bool open[2] = {true, true};
};

class InProcessChannel : public Channel {
 public:
  InProcessChannel(std::shared_ptr<Pipe> pipe, int side) : pipe_(std::move(pipe)), side_(side) {}
  ~InProcessChannel() override {
    std::lock_guard<std::mutex> lock(pipe_->mu);
    pipe_->open[side_] = false;
    pipe_->cv.notify_all();
  }

 protected:
  void SendFrame(Bytes frame) override {
    std::lock_guard<std::mutex> lock(pipe_->mu);
    if (!pipe_->open[1 - side_]) Fail(ErrorCode::kProtocolAbort, "peer closed the channel");
    pipe_->queue[1 - side_].push_back(std::move(frame));
    pipe_->cv.notify_all();
  }

  Bytes ReceiveFrame() override {
    std::unique_lock<std::mutex> lock(pipe_->mu);
    auto& q = pipe_->queue[side_];
    pipe_->cv.wait(lock, [&] { return !q.empty() || !pipe_->open[1 - side_]; });
    if (q.empty()) Fail(ErrorCode::kProtocolAbort, "peer closed the channel");
    Bytes frame = std::move(q.front());
    q.pop_front();
    return frame;
  }

 private:
  std::shared_ptr<Pipe> pipe_;
  int side_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> CreateInProcessPair() {
  auto pipe = std::make_shared<Pipe>();
  return {std::make_unique<InProcessChannel>(pipe, 0), std::make_unique<InProcessChannel>(pipe, 1)};
}

namespace {

void RunParty(const std::function<void(Channel&)>& fn, std::unique_ptr<Channel> ch, SessionTranscript* transcript,
              std::exception_ptr* error) {
  try {
    fn(*ch);
  } catch (...) {
    *error = std::current_exception();
  }
  *transcript = ch->transcript();
  ch.reset();
}

bool IsAbort(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const Error& err) {
    return err.code() == ErrorCode::kProtocolAbort;
  } catch (...) {
    return false;
  }
}

}  // namespace

void TwoPartyRun::Rethrow() const {
  if (alice_error && !IsAbort(alice_error)) std::rethrow_exception(alice_error);
  if (bob_error && !IsAbort(bob_error)) std::rethrow_exception(bob_error);
  if (alice_error) std::rethrow_exception(alice_error);
  if (bob_error) std::rethrow_exception(bob_error);
}

TwoPartyRun RunInProcess(const std::function<void(Channel&)>& alice,
                         const std::function<void(Channel&)>& bob) {
  auto [a, b] = CreateInProcessPair();
  TwoPartyRun run;
  std::thread worker(RunParty, std::cref(bob), std::move(b), &run.bob, &run.bob_error);
  RunParty(alice, std::move(a), &run.alice, &run.alice_error);
  worker.join();
  return run;
}

}  // namespace privver::protocols
