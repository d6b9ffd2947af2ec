#pragma once

#include <cstdint>
#include <vector>

#include "pkidir/crypto/keys.hpp"
#include "pkidir/directory/dn.hpp"
#include "pkidir/util/bytes.hpp"
#include "pkidir/util/json.hpp"

namespace pkidir::crypto {

/// Signed binding of a subject name to a public key. The to-be-signed part
/// is serialized canonically and signed with RSA-PSS(SHA-256); the encoded
/// form is {"sig": b64, "tbs": {...}} and those exact bytes are what
/// directory attributes carry.
struct Certificate {
  std::int64_t serial = 0;
  dir::DistinguishedName subject;
  PublicKey subjectPublicKey;
  std::int64_t notBefore = 0;
  std::int64_t notAfter = 0;
  dir::DistinguishedName issuer;
  util::Bytes signature;

  util::Json tbsJson() const;
  util::Bytes tbsBytes() const;
  util::Json toJson() const;
  util::Bytes encode() const;

  /// Throws CryptoError(malformed).
  static Certificate decode(const util::Bytes& bytes);
  static Certificate fromJson(const util::Json& j);
};

Certificate issueCertificate(const PrivateKey& caKey,
                             const dir::DistinguishedName& issuer,
                             const dir::DistinguishedName& subject,
                             const PublicKey& subjectPublicKey,
                             std::int64_t notBefore, std::int64_t validitySeconds,
                             std::int64_t serial);

/// Signature check alone (no validity window).
bool verifyCertificateSignature(const PublicKey& caPublicKey, const Certificate& cert);

/// Signature check plus notBefore <= now <= notAfter.
bool verifyCertificate(const PublicKey& caPublicKey, const Certificate& cert,
                       std::int64_t now);

}  // namespace pkidir::crypto
