#include "pkidir/crypto/certificate.hpp"

#include <stdexcept>

namespace pkidir::crypto {

util::Json Certificate::tbsJson() const {
  util::Json j;
  j["issuer"] = issuer.render();
  j["notAfter"] = notAfter;
  j["notBefore"] = notBefore;
  j["serial"] = serial;
  j["subject"] = subject.render();
  j["subjectPublicKey"] = subjectPublicKey.toJson();
  return j;
}

util::Bytes Certificate::tbsBytes() const {
  return util::canonicalDumpBytes(tbsJson());
}

util::Json Certificate::toJson() const {
  util::Json j;
  j["sig"] = util::base64Encode(signature);
  j["tbs"] = tbsJson();
  return j;
}

util::Bytes Certificate::encode() const {
  return util::canonicalDumpBytes(toJson());
}

Certificate Certificate::fromJson(const util::Json& j) {
  try {
    util::requireKeys(j, {"sig", "tbs"});
    const util::Json& tbs = util::getObject(j, "tbs");
    util::requireKeys(tbs, {"issuer", "notAfter", "notBefore", "serial", "subject",
                            "subjectPublicKey"});
    Certificate cert{
        util::getInt64(tbs, "serial"),
        dir::DistinguishedName::parse(util::getString(tbs, "subject")),
        PublicKey::fromJson(util::getObject(tbs, "subjectPublicKey")),
        util::getInt64(tbs, "notBefore"),
        util::getInt64(tbs, "notAfter"),
        dir::DistinguishedName::parse(util::getString(tbs, "issuer")),
        util::getBase64(j, "sig"),
    };
    return cert;
  } catch (const std::invalid_argument& e) {
    throw CryptoError(CryptoError::Kind::malformed,
                      std::string("malformed certificate: ") + e.what());
  }
}

Certificate Certificate::decode(const util::Bytes& bytes) {
  try {
    return fromJson(util::parseJson(util::toString(bytes)));
  } catch (const std::invalid_argument& e) {
    throw CryptoError(CryptoError::Kind::malformed,
                      std::string("malformed certificate: ") + e.what());
  }
}

Certificate issueCertificate(const PrivateKey& caKey,
                             const dir::DistinguishedName& issuer,
                             const dir::DistinguishedName& subject,
                             const PublicKey& subjectPublicKey,
                             std::int64_t notBefore, std::int64_t validitySeconds,
                             std::int64_t serial) {
  if (validitySeconds <= 0) {
    throw std::invalid_argument("validitySeconds must be positive");
  }
  Certificate cert{serial,   subject, subjectPublicKey, notBefore,
                   notBefore + validitySeconds, issuer,  {}};
  cert.signature = caKey.signPss(cert.tbsBytes());
  return cert;
}

bool verifyCertificateSignature(const PublicKey& caPublicKey, const Certificate& cert) {
  return caPublicKey.verifyPss(cert.tbsBytes(), cert.signature);
}

bool verifyCertificate(const PublicKey& caPublicKey, const Certificate& cert,
                       std::int64_t now) {
  if (now < cert.notBefore || now > cert.notAfter) return false;
  return verifyCertificateSignature(caPublicKey, cert);
}

}  // namespace pkidir::crypto
