#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

namespace arreg {

struct ServerConfig {
  std::string bind_addr = "127.0.0.1";
  /// HTTP + web-socket port (web-socket endpoint at /session). 0 picks a free port.
  std::uint16_t ws_port = 8080;
  /// Newline-delimited JSON over raw TCP. 0 picks a free port.
  std::uint16_t tcp_port = 8081;
  /// Static files and GLB models; model_ref paths resolve below it.
  std::filesystem::path asset_dir = ".";
  /// Defaults to <asset_dir>/recordings.
  std::filesystem::path record_dir;
  /// I/O threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Session service: one registration session per connection, served over a
/// web-socket endpoint and a raw TCP fallback that share one message codec.
class Server {
 public:
  explicit Server(ServerConfig cfg);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds both listeners and starts the I/O threads.
  /// Throws Error{Io} when an address cannot be bound.
  void start();

  /// Blocks until stop() is called or SIGINT/SIGTERM arrives.
  void run_until_signal();

  void stop();

  std::uint16_t ws_port() const noexcept;
  std::uint16_t tcp_port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace arreg
