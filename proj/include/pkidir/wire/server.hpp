#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pkidir/directory/directory.hpp"
#include "pkidir/wire/net.hpp"

namespace pkidir::wire {

struct ServerConfig {
  std::string host = "127.0.0.1";
  /// nullopt disables the plaintext listener; 0 picks an ephemeral port.
  std::optional<std::uint16_t> plainPort = 3893;
  /// Test mode: treat plaintext connections as secure channels.
  bool assumeSecure = false;
  /// TLS listener; requires certPath/keyPath. 0 picks an ephemeral port.
  std::optional<std::uint16_t> tlsPort;
  std::string tlsCertPath;
  std::string tlsKeyPath;
  std::size_t maxLineBytes = 4u << 20;
};

/// Serves directory operations over LF-framed messages; one thread per
/// connection, the directory's writer gate is the only shared state.
class Server {
 public:
  Server(dir::Directory& directory, ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the configured listeners and starts serving. Throws NetError.
  void start();
  void stop();

  std::uint16_t plainPort() const { return plainBoundPort_; }
  std::uint16_t tlsPort() const { return tlsBoundPort_; }

 private:
  void acceptLoop(net::Listener* listener, bool tls);
  void serveConnection(std::unique_ptr<net::Stream> stream);

  dir::Directory& directory_;
  ServerConfig config_;
  std::optional<net::TlsServerContext> tlsContext_;
  std::optional<net::Listener> plainListener_;
  std::optional<net::Listener> tlsListener_;
  std::uint16_t plainBoundPort_ = 0;
  std::uint16_t tlsBoundPort_ = 0;

  std::atomic<bool> running_{false};
  std::vector<std::thread> acceptThreads_;
  std::mutex connMutex_;
  std::vector<std::thread> connThreads_;
  std::vector<net::Stream*> activeStreams_;
};

}  // namespace pkidir::wire
