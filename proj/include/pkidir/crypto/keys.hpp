#pragma once

#include <memory>
#include <string>

#include "pkidir/crypto/error.hpp"
#include "pkidir/util/bytes.hpp"
#include "pkidir/util/json.hpp"

// OpenSSL forward declaration; callers never touch it.
using EVP_PKEY = struct evp_pkey_st;

namespace pkidir::crypto {

/// RSA-2048 public half. Serialized as {"e": b64, "n": b64} with big-endian
/// component bytes.
class PublicKey {
 public:
  /// Empty placeholder; every operation on it fails. Real keys come from
  /// fromComponents/fromJson/PrivateKey::publicKey.
  PublicKey() = default;

  static PublicKey fromComponents(const util::Bytes& modulus,
                                  const util::Bytes& exponent);
  static PublicKey fromJson(const util::Json& j);
  util::Json toJson() const;

  const util::Bytes& modulus() const { return modulus_; }
  const util::Bytes& exponent() const { return exponent_; }

  /// RSA-OAEP(SHA-256); plaintext bounded by the modulus (190 octets here).
  util::Bytes encryptOaep(const util::Bytes& plaintext) const;
  bool verifyPss(const util::Bytes& message, const util::Bytes& signature) const;

  EVP_PKEY* raw() const { return pkey_.get(); }

 private:
  PublicKey(std::shared_ptr<EVP_PKEY> pkey, util::Bytes n, util::Bytes e)
      : pkey_(std::move(pkey)), modulus_(std::move(n)), exponent_(std::move(e)) {}

  std::shared_ptr<EVP_PKEY> pkey_;
  util::Bytes modulus_;
  util::Bytes exponent_;
};

bool operator==(const PublicKey& a, const PublicKey& b);
bool operator!=(const PublicKey& a, const PublicKey& b);

/// Full RSA-2048 key. Serialized as the CRT component set
/// {"d","dp","dq","e","n","p","q","qi"}, each base64 of big-endian bytes.
class PrivateKey {
 public:
  static PrivateKey fromJson(const util::Json& j);
  util::Json toJson() const;

  PublicKey publicKey() const;

  util::Bytes decryptOaep(const util::Bytes& ciphertext) const;
  util::Bytes signPss(const util::Bytes& message) const;

  /// Key-pair consistency and factor primality check (library self-test).
  bool selfCheck() const;

  EVP_PKEY* raw() const { return pkey_.get(); }

  static PrivateKey wrap(std::shared_ptr<EVP_PKEY> pkey);

 private:
  explicit PrivateKey(std::shared_ptr<EVP_PKEY> pkey) : pkey_(std::move(pkey)) {}

  std::shared_ptr<EVP_PKEY> pkey_;
};

struct KeyPair {
  PrivateKey privateKey;
  PublicKey publicKey;
};

KeyPair generateKeyPair();

}  // namespace pkidir::crypto
