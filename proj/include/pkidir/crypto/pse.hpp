#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pkidir/crypto/certificate.hpp"
#include "pkidir/crypto/keys.hpp"
#include "pkidir/util/bytes.hpp"
#include "pkidir/util/json.hpp"

namespace pkidir::crypto {

/// Password-protected, integrity-protected bundle of a private key and its
/// certificate chain. Key derivation is PBKDF2-HMAC-SHA256; the payload is
/// sealed with AES-256-GCM and the header fields are authenticated as AAD,
/// so any tamper fails to open.
struct PseContainer {
  std::int64_t version = 1;
  util::Bytes kdfSalt;  // 16 octets
  std::int64_t kdfIterations = 100000;
  util::Bytes nonce;  // 12 octets
  util::Bytes ciphertext;

  util::Json toJson() const;
  util::Bytes encode() const;
  static PseContainer fromJson(const util::Json& j);
  /// Throws CryptoError(malformed).
  static PseContainer decode(const util::Bytes& bytes);
};

struct PseContents {
  PrivateKey privateKey;
  std::vector<Certificate> certificates;
};

/// Throws std::invalid_argument on an empty password or iterations < 100000.
PseContainer buildPse(const PrivateKey& key, const std::vector<Certificate>& certs,
                      const std::string& password, std::int64_t iterations = 100000);

/// Throws CryptoError(wrongPassword) when the password does not open the
/// container or any bit was flipped; CryptoError(malformed) on a container
/// that does not parse.
PseContents openPse(const PseContainer& container, const std::string& password);

}  // namespace pkidir::crypto
