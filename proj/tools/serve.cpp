/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "serve.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ostream>

namespace trilimb::cli {

namespace {

std::string sys_error(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

Server::Server(SessionConfig cfg, ServeOptions opt) : opt_(std::move(opt)), rec_(std::move(cfg)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(sys_error("socket"));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(opt_.port);
  if (::inet_pton(AF_INET, opt_.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error("invalid listen address '" + opt_.host + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listen_fd_, 1) < 0) {
    const std::string msg = sys_error("bind");
    ::close(listen_fd_);
    throw Error(msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Server::~Server() {
  stop_ = true;
  if (client_fd_ >= 0) {
    ::shutdown(client_fd_, SHUT_RDWR);
    if (reader_.joinable()) reader_.join();
    ::close(client_fd_);
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

// Only touches an atomic, so it is safe from a signal handler; waits in the
// tick loop time out on their own.
void Server::stop() { stop_ = true; }

bool Server::send_message(const std::vector<std::uint8_t>& payload) {
  const auto bytes = frame(payload);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::send(client_fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      client_gone_ = true;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

void Server::reader_loop(int fd) {
  FrameReader frames;
  std::vector<std::uint8_t> buf(4096);
  try {
    for (;;) {
      const ssize_t n = ::recv(fd, buf.data(), buf.size(), 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      frames.feed({buf.data(), static_cast<std::size_t>(n)});
      while (auto payload = frames.next()) {
        Message m = decode(*payload);
        if (auto* f = std::get_if<AxesFrame>(&m)) {
          std::lock_guard lock(mu_);
          queue_.push_back(f->axes);
          cv_.notify_all();
        }
      }
    }
  } catch (const CodecError& e) {
    std::lock_guard lock(mu_);
    reader_error_ = e.what();
  }
  client_gone_ = true;
  cv_.notify_all();
}

void Server::accept_client(std::ostream& log) {
  pollfd p{listen_fd_, POLLIN, 0};
  const int timeout_ms = (opt_.lockstep || !ever_connected_) ? 50 : 0;
  if (::poll(&p, 1, timeout_ms) <= 0) return;
  const int fd = ::accept(listen_fd_, nullptr, nullptr);
  if (fd < 0) return;
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  client_fd_ = fd;
  client_gone_ = false;
  if (!ever_connected_) deadline_ = std::chrono::steady_clock::now();
  ever_connected_ = true;
  log << "client connected at tick " << rec_.session().current_tick() << '\n';
  if (!send_message(encode(rec_.session().scene_info()))) return;
  reader_ = std::thread([this, fd] { reader_loop(fd); });
}

void Server::drop_client(std::ostream& log) {
  if (client_fd_ < 0) return;
  ::shutdown(client_fd_, SHUT_RDWR);
  if (reader_.joinable()) reader_.join();
  ::close(client_fd_);
  client_fd_ = -1;
  held_ = AxesRecord{};
  std::lock_guard lock(mu_);
  queue_.clear();
  if (reader_error_) log << "client dropped: " << *reader_error_ << '\n';
  else log << "client disconnected\n";
  reader_error_.reset();
}

bool Server::queue_empty() {
  std::lock_guard lock(mu_);
  return queue_.empty();
}

std::optional<AxesRecord> Server::next_input() {
  using Clock = std::chrono::steady_clock;

  if (opt_.lockstep) {
    if (client_fd_ < 0) return std::nullopt;
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, std::chrono::milliseconds(50),
                 [&] { return !queue_.empty() || client_gone_ || stop_; });
    if (queue_.empty()) return std::nullopt;
    AxesRecord r = queue_.front();
    queue_.pop_front();
    return r;
  }

  if (!ever_connected_) return std::nullopt;
  const auto period = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(1.0 / rec_.session().config().tick_hz));
  deadline_ += period;
  const auto now = Clock::now();
  if (deadline_ < now) deadline_ = now;
  std::this_thread::sleep_until(deadline_);

  std::deque<AxesRecord> batch;
  {
    std::lock_guard lock(mu_);
    batch.swap(queue_);
  }
  if (!batch.empty()) {
    AxesRecord merged = batch.back();
    using A = AxesRecord;
    for (const auto& r : batch)
      for (auto i : {A::kLBtnUpper, A::kLBtnLower, A::kRBtnUpper, A::kRBtnLower, A::kCautery})
        if (r[i] > 0.5) merged[i] = 1.0;
    held_ = merged;
  }
  return held_;
}

std::uint64_t Server::run(std::ostream& log) {
  std::uint64_t ticks = 0;
  log << "serving on " << opt_.host << ':' << port_ << (opt_.lockstep ? " (lockstep)" : "")
      << '\n';
  while (!stop_) {
    if (opt_.max_ticks && ticks >= opt_.max_ticks) break;
    if (client_fd_ < 0)
      accept_client(log);
    else if (client_gone_ && queue_empty())
      drop_client(log);

    const auto in = next_input();
    if (!in) continue;
    TickOutput out;
    try {
      out = rec_.step(*in);
    } catch (const InvalidInput& e) {
      log << "rejected input: " << e.what() << '\n';
      continue;
    }
    ++ticks;
    if (out.feedback && client_fd_ >= 0 && !client_gone_) send_message(encode(*out.feedback));
  }
  drop_client(log);
  if (opt_.trace_out) write_trace_file(*opt_.trace_out, rec_.log());
  return ticks;
}

}  // namespace trilimb::cli
