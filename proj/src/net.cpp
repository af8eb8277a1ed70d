// SPDX-License-Identifier: Apache-2.0
#include "skybridge/net.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <charconv>
#include <utility>

namespace skybridge {

namespace {

bool resolve_ipv4(const std::string& host, in_addr* out) {
  if (host == "localhost" || host.empty()) {
    return inet_pton(AF_INET, "127.0.0.1", out) == 1;
  }
  return inet_pton(AF_INET, host.c_str(), out) == 1;
}

}  // namespace

std::optional<Endpoint> Endpoint::parse(const std::string& text, uint16_t default_port) {
  Endpoint ep;
  ep.port = default_port;
  std::string host_part = text;
  const auto colon = text.rfind(':');
  if (colon != std::string::npos) {
    host_part = text.substr(0, colon);
    const std::string port_part = text.substr(colon + 1);
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port_part.data(), port_part.data() + port_part.size(), value);
    if (ec != std::errc{} || ptr != port_part.data() + port_part.size() || value == 0 ||
        value > 65535) {
      return std::nullopt;
    }
    ep.port = static_cast<uint16_t>(value);
  }
  if (!host_part.empty()) ep.host = host_part;
  in_addr probe{};
  if (!resolve_ipv4(ep.host, &probe)) return std::nullopt;
  return ep;
}

std::string Endpoint::str() const { return host + ":" + std::to_string(port); }

Socket::~Socket() { close(); }

Socket::Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

void Socket::set_recv_timeout_ms(int ms) {
  if (fd_ < 0) return;
  timeval tv{};
  tv.tv_sec = ms / 1000;
  tv.tv_usec = (ms % 1000) * 1000;
  setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

bool Socket::send_all(std::span<const uint8_t> data) {
  size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (n == 0) return false;
    sent += static_cast<size_t>(n);
  }
  return true;
}

RecvStatus Socket::recv_some(uint8_t* buf, size_t cap, size_t* received) {
  *received = 0;
  if (fd_ < 0) return RecvStatus::kClosed;
  const ssize_t n = ::recv(fd_, buf, cap, 0);
  if (n > 0) {
    *received = static_cast<size_t>(n);
    return RecvStatus::kData;
  }
  if (n == 0) return RecvStatus::kClosed;
  if (errno == EAGAIN || errno == EWOULDBLOCK) return RecvStatus::kTimeout;
  if (errno == EINTR) return RecvStatus::kTimeout;
  return RecvStatus::kError;
}

void Socket::shutdown_both() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

TcpListener::TcpListener(TcpListener&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)),
      port_(std::exchange(other.port_, 0)),
      stopping_(other.stopping_.load()) {}

TcpListener& TcpListener::operator=(TcpListener&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    port_ = std::exchange(other.port_, 0);
    stopping_.store(other.stopping_.load());
  }
  return *this;
}

std::optional<TcpListener> TcpListener::bind(const std::string& host, uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return std::nullopt;
  const int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (!resolve_ipv4(host, &addr.sin_addr) ||
      ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(fd, 16) != 0) {
    ::close(fd);
    return std::nullopt;
  }
  socklen_t len = sizeof addr;
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  TcpListener listener;
  listener.fd_ = fd;
  listener.port_ = ntohs(addr.sin_port);
  return listener;
}

std::optional<Socket> TcpListener::accept(int timeout_ms) {
  if (fd_ < 0 || stopping_.load()) return std::nullopt;
  pollfd pfd{fd_, POLLIN, 0};
  const int rc = ::poll(&pfd, 1, timeout_ms);
  if (rc <= 0 || stopping_.load()) return std::nullopt;
  const int client = ::accept(fd_, nullptr, nullptr);
  if (client < 0) return std::nullopt;
  const int one = 1;
  setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return Socket(client);
}

void TcpListener::request_stop() {
  stopping_.store(true);
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);  // wakes any blocked poll
}

void TcpListener::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

std::optional<Socket> tcp_connect(const Endpoint& ep, int timeout_ms) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return std::nullopt;
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (!resolve_ipv4(ep.host, &addr.sin_addr)) {
    ::close(fd);
    return std::nullopt;
  }
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  if (rc != 0 && errno == EINPROGRESS) {
    pollfd pfd{fd, POLLOUT, 0};
    rc = ::poll(&pfd, 1, timeout_ms) == 1 ? 0 : -1;
    if (rc == 0) {
      int err = 0;
      socklen_t len = sizeof err;
      getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
      if (err != 0) rc = -1;
    }
  }
  if (rc != 0) {
    ::close(fd);
    return std::nullopt;
  }
  fcntl(fd, F_SETFL, flags);
  const int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return Socket(fd);
}

}  // namespace skybridge
