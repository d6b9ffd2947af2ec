#pragma once

#include "pkidir/crypto/keys.hpp"
#include "pkidir/util/bytes.hpp"
#include "pkidir/util/json.hpp"

namespace pkidir::crypto {

/// Hybrid envelope: a fresh 32-octet content key wrapped with
/// RSA-OAEP(SHA-256), payload sealed with AES-256-GCM. `ciphertext` carries
/// the GCM output with the 16-octet tag appended.
struct EncryptedBlob {
  util::Bytes wrappedKey;
  util::Bytes nonce;  // 12 octets
  util::Bytes ciphertext;

  util::Json toJson() const;
  util::Bytes encode() const;
  static EncryptedBlob fromJson(const util::Json& j);
  /// Throws CryptoError(malformed).
  static EncryptedBlob decode(const util::Bytes& bytes);
};

/// Fresh content key and nonce per call. Throws std::invalid_argument on an
/// empty plaintext.
EncryptedBlob hybridEncrypt(const PublicKey& recipient, const util::Bytes& plaintext);

/// Throws CryptoError(decryptFailed) on a wrong key or any bit flip.
util::Bytes hybridDecrypt(const PrivateKey& recipient, const EncryptedBlob& blob);

// AES-256-GCM seal/open used by the envelope and the PSE container.
util::Bytes aeadSeal(const util::Bytes& key, const util::Bytes& nonce,
                     const util::Bytes& plaintext, const util::Bytes& aad);
util::Bytes aeadOpen(const util::Bytes& key, const util::Bytes& nonce,
                     const util::Bytes& ciphertextWithTag, const util::Bytes& aad);

}  // namespace pkidir::crypto
