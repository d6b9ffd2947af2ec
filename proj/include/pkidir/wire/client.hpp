#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "pkidir/session.hpp"
#include "pkidir/wire/message.hpp"
#include "pkidir/wire/net.hpp"

namespace pkidir::wire {

struct ClientConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 3893;
  bool useTls = false;
  /// SHA-256 fingerprint (hex, lower-case) the server certificate must match.
  std::optional<std::string> pinSha256Hex;
  std::size_t maxLineBytes = 4u << 20;
};

/// One connection speaking the line protocol; not thread-safe.
class Client {
 public:
  /// Throws NetError on connect/handshake/pin failure.
  static Client connect(const ClientConfig& config);

  Client(Client&&) = default;
  Client& operator=(Client&&) = default;
  ~Client();

  /// Observes every outbound encoded message (for traffic capture).
  void setOutboundTap(std::function<void(const std::string&)> tap) {
    tap_ = std::move(tap);
  }

  /// Assigns the next id, sends, and waits for the matching response.
  /// Throws NetError on transport failure, CodecError on an undecodable or
  /// mismatched response (including server-side protocol errors).
  ResponseMessage roundTrip(const std::string& dn, RequestParams params);

  ResultCode bind(const std::string& dn, const util::Bytes& password);
  std::pair<ResultCode, std::optional<dir::DirectoryEntry>> search(const std::string& dn);
  ResultCode add(const std::string& dn, const dir::DirectoryEntry& entry);
  ResultCode modify(const std::string& dn, const std::string& attribute,
                    const std::optional<dir::AttributeValue>& value);
  ResultCode remove(const std::string& dn);

  /// Best-effort unbind then close.
  void unbind();
  void close();

  bool transportSecure() const;

 private:
  Client() = default;

  std::unique_ptr<net::Stream> stream_;
  std::unique_ptr<net::LineReader> reader_;
  std::function<void(const std::string&)> tap_;
  std::int64_t nextId_ = 1;
};

/// DirectorySession over a wire client.
class WireSession final : public DirectorySession {
 public:
  explicit WireSession(Client client) : client_(std::move(client)) {}

  ResultCode bind(const std::string& dnText, const util::Bytes& password) override {
    return client_.bind(dnText, password);
  }
  std::pair<ResultCode, std::optional<dir::DirectoryEntry>> search(
      const std::string& dnText) override {
    return client_.search(dnText);
  }
  ResultCode add(const std::string& dnText, const dir::DirectoryEntry& entry) override {
    return client_.add(dnText, entry);
  }
  ResultCode modify(const std::string& dnText, const std::string& attribute,
                    const std::optional<dir::AttributeValue>& value) override {
    return client_.modify(dnText, attribute, value);
  }
  ResultCode remove(const std::string& dnText) override {
    return client_.remove(dnText);
  }

  Client& client() { return client_; }

 private:
  Client client_;
};

}  // namespace pkidir::wire
