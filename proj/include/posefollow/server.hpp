// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "posefollow/track.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace posefollow {

struct ServerOptions
{
  std::string                          host = "127.0.0.1";
  /// 0 picks an ephemeral port.
  std::uint16_t                        port = 0;
  std::shared_ptr<const Track>         trainer;
  std::optional<std::string>           trainerPath;
  /// When set, every completed trial is written here as
  /// session-<conn>-<trial>.poses.jsonl plus a one-row summary CSV.
  std::optional<std::filesystem::path> recordDir;
};

/// TCP service speaking the line protocol; one thread and one protocol state per connection.
class LineServer
{
public:
  explicit LineServer( ServerOptions options );
  ~LineServer();

  LineServer( const LineServer & )            = delete;
  LineServer & operator=( const LineServer & ) = delete;

  /// Binds and starts accepting. Returns the bound port. Throws Error("io").
  std::uint16_t start();
  /// Blocks until stop() is called from another thread.
  void wait();
  void stop();

private:
  void acceptLoop();
  void serve( int fd, int connId );

  ServerOptions            options_;
  int                      listenFd_ = -1;
  std::atomic<bool>        running_{ false };
  std::atomic<int>         nextConn_{ 0 };
  std::thread              acceptThread_;
  std::mutex               mutex_;
  std::vector<std::thread> workers_;
  std::vector<int>         clientFds_;
};

}  // namespace posefollow
