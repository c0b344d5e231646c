#pragma once

#include <chrono>
#include <memory>
#include <string>

namespace abm::serve {

struct ServerOptions {
  std::string address = "127.0.0.1";
  /// 0 picks a free port; see Server::port().
  unsigned short port = 8080;
  /// Directory served for plain GET requests (the browser UI); empty disables static files.
  std::string static_dir;
  /// How long a session outlives its last WebSocket.
  std::chrono::milliseconds grace{30000};
  std::size_t threads = 1;
};

/// HTTP + WebSocket front end:
///   GET  /models         catalog with config defaults, parameter ranges and series labels
///   POST /sessions       {"model", "config"?, "seed"?} -> 201 {"id", "model", "ws"}
///   WS   /sessions/{id}  the session protocol (schemas/protocol.schema.json)
/// Each session's messages are handled in arrival order on its own strand.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// The bound port, valid once constructed.
  [[nodiscard]] unsigned short port() const;
  [[nodiscard]] std::size_t session_count() const;
  /// Serves on background threads until stop().
  void start();
  /// Serves on the calling thread (plus options.threads - 1 helpers) until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace abm::serve
