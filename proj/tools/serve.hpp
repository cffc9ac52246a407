/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "trilimb/trace.hpp"

namespace trilimb::cli {

struct ServeOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7878;  // 0 picks a free port
  /// Stop after this many ticks; 0 runs until stopped.
  std::uint64_t max_ticks = 0;
  /// Tick once per received AxesFrame instead of on the wall clock.
  bool lockstep = false;
  std::optional<std::filesystem::path> trace_out;
};

/// Local TCP bridge for an operator console. One client at a time; on
/// connect it receives a SceneInfo, then sends AxesFrames and receives the
/// SlaveStateMsgs that reach the master side. All messages are framed as
/// [u32 length LE][payload].
///
/// A reader thread decodes frames into an ordered queue; the tick loop is
/// the only owner of the session and drains the queue once per tick. In
/// wall-clock mode the drained records collapse to the newest one with its
/// buttons and cautery OR-ed over the batch, so a one-frame press is never
/// lost. Without new input the previous record is held; a disconnect zeroes it.
class Server {
 public:
  /// Binds and listens. Throws Error when the socket cannot be opened.
  Server(SessionConfig cfg, ServeOptions opt);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return port_; }

  /// Runs the tick loop until stop() or max_ticks. Returns ticks executed.
  std::uint64_t run(std::ostream& log);
  void stop();

  const Recorder& recorder() const { return rec_; }

 private:
  void accept_client(std::ostream& log);
  void drop_client(std::ostream& log);
  void reader_loop(int fd);
  bool send_message(const std::vector<std::uint8_t>& payload);
  std::optional<AxesRecord> next_input();
  bool queue_empty();

  ServeOptions opt_;
  Recorder rec_;
  int listen_fd_ = -1;
  int client_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
  std::atomic<bool> client_gone_{false};
  std::thread reader_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<AxesRecord> queue_;
  std::optional<std::string> reader_error_;

  AxesRecord held_{};
  bool ever_connected_ = false;
  std::chrono::steady_clock::time_point deadline_{};
};

}  // namespace trilimb::cli
