#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace pkidir::net {

class NetError : public std::runtime_error {
 public:
  explicit NetError(const std::string& what) : std::runtime_error(what) {}
};

/// Blocking byte stream over a connected socket, plaintext or TLS.
class Stream {
 public:
  virtual ~Stream() = default;

  /// Up to n bytes; 0 means EOF or a dead connection.
  virtual std::size_t read(std::uint8_t* buf, std::size_t n) = 0;
  virtual bool writeAll(const std::uint8_t* data, std::size_t n) = 0;
  virtual bool secure() const = 0;

  /// Wakes any blocked read/write from another thread.
  virtual void shutdown() = 0;

  bool writeAll(const std::string& data) {
    return writeAll(reinterpret_cast<const std::uint8_t*>(data.data()), data.size());
  }
};

std::unique_ptr<Stream> makePlainStream(int fd, bool treatAsSecure);

class TlsServerContext {
 public:
  /// Loads a PEM certificate chain + private key. Throws NetError.
  TlsServerContext(const std::string& certPath, const std::string& keyPath);

  /// Performs the server-side handshake; returns nullptr on failure (the fd
  /// is closed either way once owned).
  std::unique_ptr<Stream> accept(int fd) const;

 private:
  std::shared_ptr<void> ctx_;  // SSL_CTX
};

/// Client-side handshake over a connected fd. When a pin is given, the
/// server certificate's SHA-256 fingerprint (hex, lower-case) must match or
/// the connection is refused. Throws NetError.
std::unique_ptr<Stream> tlsConnect(int fd, const std::optional<std::string>& pinSha256Hex);

class Listener {
 public:
  Listener() = default;
  ~Listener();
  Listener(Listener&& other) noexcept;
  Listener& operator=(Listener&& other) noexcept;
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  /// Binds and listens; port 0 picks an ephemeral port. Throws NetError.
  static Listener open(const std::string& host, std::uint16_t port);

  /// Blocks; -1 once the listener is closed.
  int acceptFd();

  std::uint16_t port() const { return port_; }
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Throws NetError when the connection cannot be established.
int connectTcp(const std::string& host, std::uint16_t port);

/// Accumulates LF-terminated lines from a stream.
class LineReader {
 public:
  LineReader(Stream& stream, std::size_t maxLineBytes)
      : stream_(stream), maxLineBytes_(maxLineBytes) {}

  /// The next line including its LF; nullopt on clean EOF at a line
  /// boundary. Throws NetError on an overlong line or EOF mid-line (a
  /// truncated frame).
  std::optional<std::string> readLine();

 private:
  Stream& stream_;
  std::size_t maxLineBytes_;
  std::string buffer_;
  bool eof_ = false;
};

}  // namespace pkidir::net
