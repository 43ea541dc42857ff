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

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "privver/common/error.h"
#include "privver/protocols/channel.h"

namespace privver::protocols {
namespace {

std::string Errno(const std::string& what) { return what + ": " + std::strerror(errno); }

class TcpChannel : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {
    int one = 1;
    setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpChannel() override { ::close(fd_); }

 protected:
  void SendFrame(Bytes frame) override {
    size_t off = 0;
    while (off < frame.size()) {
      ssize_t n = ::send(fd_, frame.data() + off, frame.size() - off, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) Fail(ErrorCode::kProtocolAbort, Errno("send failed"));
      off += static_cast<size_t>(n);
    }
  }

  Bytes ReceiveFrame() override {
    Bytes frame(4);
    ReadExact(frame.data(), 4);
    uint32_t len = (uint32_t{frame[0]} << 24) | (uint32_t{frame[1]} << 16) |
                   (uint32_t{frame[2]} << 8) | uint32_t{frame[3]};
    if (len < 2 || len > kMaxFrameBytes) Fail(ErrorCode::kProtocolAbort, "invalid frame length");
    frame.resize(4 + len);
    ReadExact(frame.data() + 4, len);
    return frame;
  }

 private:
  void ReadExact(uint8_t* out, size_t n) {
    size_t off = 0;
    while (off < n) {
      ssize_t got = ::recv(fd_, out + off, n - off, 0);
      if (got < 0 && errno == EINTR) continue;
      if (got == 0) Fail(ErrorCode::kProtocolAbort, "connection closed by peer");
      if (got < 0) Fail(ErrorCode::kProtocolAbort, Errno("recv failed"));
      off += static_cast<size_t>(got);
    }
  }

  int fd_;
};

addrinfo* Resolve(const std::string& host, uint16_t port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  std::string service = std::to_string(port);
  int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
  if (rc != 0) Fail(ErrorCode::kIoFailure, "cannot resolve " + host + ": " + gai_strerror(rc));
  return res;
}

}  // namespace

std::unique_ptr<Channel> ConnectTcp(const std::string& host, uint16_t port) {
  addrinfo* res = Resolve(host, port, false);
  int fd = -1;
  for (addrinfo* p = res; p != nullptr; p = p->ai_next) {
    fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) Fail(ErrorCode::kIoFailure, Errno("cannot connect to " + host + ":" + std::to_string(port)));
  return std::make_unique<TcpChannel>(fd);
}

TcpListener::TcpListener(const std::string& host, uint16_t port) {
  addrinfo* res = Resolve(host, port, true);
  for (addrinfo* p = res; p != nullptr; p = p->ai_next) {
    fd_ = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd_ < 0) continue;
    int one = 1;
    setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd_, p->ai_addr, p->ai_addrlen) == 0 && ::listen(fd_, 16) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) Fail(ErrorCode::kIoFailure, Errno("cannot listen on " + host + ":" + std::to_string(port)));
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  if (addr.ss_family == AF_INET) {
    port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  } else {
    port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpListener::Close() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

std::unique_ptr<Channel> TcpListener::Accept() {
  while (true) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<TcpChannel>(fd);
    if (errno == EINTR) continue;
    Fail(ErrorCode::kIoFailure, Errno("accept failed"));
  }
}

}  // namespace privver::protocols
