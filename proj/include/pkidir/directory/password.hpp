#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pkidir/util/bytes.hpp"

namespace pkidir::dir {

/// Salted SHA-256 password verifier, rendered as
/// `{SSHA256}` + base64(digest || salt) with a 16-octet salt, the form the
/// userPassword attribute stores.
struct PasswordHash {
  util::Bytes salt;    // 16 octets
  util::Bytes digest;  // SHA-256(password || salt)

  std::string render() const;
  static std::optional<PasswordHash> parse(std::string_view rendered);
};

/// Fresh random salt per call. Throws std::invalid_argument on an empty
/// password.
PasswordHash hashPassword(const util::Bytes& password);

bool verifyPassword(const util::Bytes& password, const PasswordHash& stored) noexcept;

/// Accepts the rendered form; malformed input verifies false, never throws.
bool verifyPassword(const util::Bytes& password, std::string_view renderedHash) noexcept;

}  // namespace pkidir::dir
