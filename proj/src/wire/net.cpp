#include "pkidir/wire/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/ssl.h>
#include <openssl/x509.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "pkidir/util/bytes.hpp"

namespace pkidir::net {

namespace {

std::string lastErrno(const std::string& context) {
  return context + ": " + std::strerror(errno);
}

std::string lastSslError(const std::string& context) {
  char buf[256] = {};
  ERR_error_string_n(ERR_get_error(), buf, sizeof(buf));
  return context + ": " + buf;
}

class PlainStream final : public Stream {
 public:
  PlainStream(int fd, bool treatAsSecure) : fd_(fd), secure_(treatAsSecure) {}
  ~PlainStream() override {
    if (fd_ >= 0) ::close(fd_);
  }

  std::size_t read(std::uint8_t* buf, std::size_t n) override {
    for (;;) {
      const ssize_t rc = ::recv(fd_, buf, n, 0);
      if (rc > 0) return static_cast<std::size_t>(rc);
      if (rc < 0 && errno == EINTR) continue;
      return 0;
    }
  }

  bool writeAll(const std::uint8_t* data, std::size_t n) override {
    std::size_t done = 0;
    while (done < n) {
      const ssize_t rc = ::send(fd_, data + done, n - done, MSG_NOSIGNAL);
      if (rc < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      done += static_cast<std::size_t>(rc);
    }
    return true;
  }

  bool secure() const override { return secure_; }

  void shutdown() override { ::shutdown(fd_, SHUT_RDWR); }

 private:
  int fd_;
  bool secure_;
};

class TlsStream final : public Stream {
 public:
  TlsStream(SSL* ssl, int fd) : ssl_(ssl), fd_(fd) {}
  ~TlsStream() override {
    SSL_shutdown(ssl_);  // best effort; peer may be gone
    SSL_free(ssl_);
    ::close(fd_);
    ERR_clear_error();
  }

  std::size_t read(std::uint8_t* buf, std::size_t n) override {
    const int rc = SSL_read(ssl_, buf, static_cast<int>(n));
    if (rc <= 0) {
      ERR_clear_error();
      return 0;
    }
    return static_cast<std::size_t>(rc);
  }

  bool writeAll(const std::uint8_t* data, std::size_t n) override {
    std::size_t done = 0;
    while (done < n) {
      const int rc = SSL_write(ssl_, data + done, static_cast<int>(n - done));
      if (rc <= 0) {
        ERR_clear_error();
        return false;
      }
      done += static_cast<std::size_t>(rc);
    }
    return true;
  }

  bool secure() const override { return true; }

  void shutdown() override { ::shutdown(fd_, SHUT_RDWR); }

 private:
  SSL* ssl_;
  int fd_;
};

SSL_CTX* asCtx(const std::shared_ptr<void>& p) {
  return static_cast<SSL_CTX*>(p.get());
}

std::string peerFingerprintSha256(SSL* ssl) {
  X509* peer = SSL_get_peer_certificate(ssl);
  if (peer == nullptr) return {};
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const int ok = X509_digest(peer, EVP_sha256(), md, &len);
  X509_free(peer);
  if (ok != 1) return {};
  return pkidir::util::hexEncode(pkidir::util::Bytes(md, md + len));
}

}  // namespace

std::unique_ptr<Stream> makePlainStream(int fd, bool treatAsSecure) {
  return std::make_unique<PlainStream>(fd, treatAsSecure);
}

TlsServerContext::TlsServerContext(const std::string& certPath, const std::string& keyPath) {
  SSL_CTX* ctx = SSL_CTX_new(TLS_server_method());
  if (ctx == nullptr) throw NetError(lastSslError("SSL_CTX_new"));
  ctx_ = std::shared_ptr<void>(ctx, [](void* p) { SSL_CTX_free(static_cast<SSL_CTX*>(p)); });
  SSL_CTX_set_min_proto_version(ctx, TLS1_2_VERSION);
  if (SSL_CTX_use_certificate_chain_file(ctx, certPath.c_str()) != 1) {
    throw NetError(lastSslError("cannot load TLS certificate " + certPath));
  }
  if (SSL_CTX_use_PrivateKey_file(ctx, keyPath.c_str(), SSL_FILETYPE_PEM) != 1) {
    throw NetError(lastSslError("cannot load TLS key " + keyPath));
  }
  if (SSL_CTX_check_private_key(ctx) != 1) {
    throw NetError(lastSslError("TLS certificate/key mismatch"));
  }
}

std::unique_ptr<Stream> TlsServerContext::accept(int fd) const {
  SSL* ssl = SSL_new(asCtx(ctx_));
  if (ssl == nullptr || SSL_set_fd(ssl, fd) != 1) {
    if (ssl) SSL_free(ssl);
    ::close(fd);
    ERR_clear_error();
    return nullptr;
  }
  if (SSL_accept(ssl) != 1) {
    SSL_free(ssl);
    ::close(fd);
    ERR_clear_error();
    return nullptr;
  }
  return std::make_unique<TlsStream>(ssl, fd);
}

std::unique_ptr<Stream> tlsConnect(int fd, const std::optional<std::string>& pinSha256Hex) {
  SSL_CTX* ctx = SSL_CTX_new(TLS_client_method());
  if (ctx == nullptr) {
    ::close(fd);
    throw NetError(lastSslError("SSL_CTX_new"));
  }
  SSL_CTX_set_min_proto_version(ctx, TLS1_2_VERSION);
  // Trust is by certificate pinning, not a CA store.
  SSL_CTX_set_verify(ctx, SSL_VERIFY_NONE, nullptr);
  SSL* ssl = SSL_new(ctx);
  SSL_CTX_free(ctx);  // ssl holds its own reference
  if (ssl == nullptr || SSL_set_fd(ssl, fd) != 1) {
    if (ssl) SSL_free(ssl);
    ::close(fd);
    throw NetError(lastSslError("SSL_new"));
  }
  if (SSL_connect(ssl) != 1) {
    const std::string err = lastSslError("TLS handshake failed");
    SSL_free(ssl);
    ::close(fd);
    throw NetError(err);
  }
  if (pinSha256Hex) {
    const std::string got = peerFingerprintSha256(ssl);
    if (got.empty() || got != *pinSha256Hex) {
      SSL_free(ssl);
      ::close(fd);
      throw NetError("server certificate fingerprint mismatch");
    }
  }
  return std::make_unique<TlsStream>(ssl, fd);
}

Listener::~Listener() { close(); }

Listener::Listener(Listener&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), port_(std::exchange(other.port_, 0)) {}

Listener& Listener::operator=(Listener&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    port_ = std::exchange(other.port_, 0);
  }
  return *this;
}

Listener Listener::open(const std::string& host, std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw NetError(lastErrno("socket"));
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw NetError("bad listen address: " + host);
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string err = lastErrno("bind " + host + ":" + std::to_string(port));
    ::close(fd);
    throw NetError(err);
  }
  if (::listen(fd, 64) != 0) {
    const std::string err = lastErrno("listen");
    ::close(fd);
    throw NetError(err);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len) != 0) {
    const std::string err = lastErrno("getsockname");
    ::close(fd);
    throw NetError(err);
  }
  Listener listener;
  listener.fd_ = fd;
  listener.port_ = ntohs(bound.sin_port);
  return listener;
}

int Listener::acceptFd() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return fd;
    if (errno == EINTR) continue;
    return -1;
  }
}

void Listener::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);  // wakes a blocked accept
    ::close(fd_);
    fd_ = -1;
  }
}

int connectTcp(const std::string& host, std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw NetError(lastErrno("socket"));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw NetError("bad address: " + host);
  }
  for (;;) {
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) break;
    if (errno == EINTR) continue;
    const std::string err = lastErrno("connect " + host + ":" + std::to_string(port));
    ::close(fd);
    throw NetError(err);
  }
  return fd;
}

std::optional<std::string> LineReader::readLine() {
  for (;;) {
    const auto pos = buffer_.find('\n');
    if (pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos + 1);
      buffer_.erase(0, pos + 1);
      return line;
    }
    if (buffer_.size() > maxLineBytes_) {
      throw NetError("line exceeds maximum length");
    }
    if (eof_) {
      if (buffer_.empty()) return std::nullopt;
      throw NetError("truncated frame at end of stream");
    }
    std::uint8_t chunk[4096];
    const std::size_t got = stream_.read(chunk, sizeof(chunk));
    if (got == 0) {
      eof_ = true;
      continue;
    }
    buffer_.append(reinterpret_cast<const char*>(chunk), got);
  }
}

}  // namespace pkidir::net
