// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace skybridge {

struct Endpoint {
  std::string host = "127.0.0.1";
  uint16_t port = 0;

  // Accepts "host:port", ":port" (loopback host) or "host" with the given
  // default port. Numeric IPv4 or "localhost" only.
  static std::optional<Endpoint> parse(const std::string& text, uint16_t default_port);
  std::string str() const;
};

enum class RecvStatus { kData, kClosed, kTimeout, kError };

// Move-only RAII wrapper over a connected TCP socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }

  void set_recv_timeout_ms(int ms);
  bool send_all(std::span<const uint8_t> data);
  RecvStatus recv_some(uint8_t* buf, size_t cap, size_t* received);

  // Wakes any blocked reader/writer; safe from another thread.
  void shutdown_both();
  void close();

 private:
  int fd_ = -1;
};

// Shutdown protocol: request_stop() wakes and permanently fails accept()
// from any thread; close() releases the descriptor and must only run once
// no thread is blocked in accept() (owner joins the accept loop first).
class TcpListener {
 public:
  TcpListener() = default;
  ~TcpListener() { close(); }
  TcpListener(TcpListener&& other) noexcept;
  TcpListener& operator=(TcpListener&& other) noexcept;
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  // Port 0 picks an ephemeral port; port() reports the bound one.
  static std::optional<TcpListener> bind(const std::string& host, uint16_t port);

  bool valid() const { return fd_ >= 0; }
  uint16_t port() const { return port_; }

  // Blocks up to timeout_ms; nullopt on timeout or stopped listener.
  std::optional<Socket> accept(int timeout_ms);
  void request_stop();
  void close();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
};

std::optional<Socket> tcp_connect(const Endpoint& ep, int timeout_ms);

}  // namespace skybridge
