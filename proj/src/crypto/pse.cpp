#include "pkidir/crypto/pse.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "pkidir/crypto/hybrid.hpp"

namespace pkidir::crypto {

namespace {

constexpr std::int64_t kMinIterations = 100000;
constexpr std::size_t kSaltLen = 16;
constexpr std::size_t kNonceLen = 12;
constexpr std::size_t kDerivedKeyLen = 32;

util::Bytes deriveKey(const std::string& password, const util::Bytes& salt,
                      std::int64_t iterations) {
  util::Bytes key(kDerivedKeyLen);
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                        salt.data(), static_cast<int>(salt.size()),
                        static_cast<int>(iterations), EVP_sha256(),
                        static_cast<int>(key.size()), key.data()) != 1) {
    throwOpenSslError("PBKDF2");
  }
  return key;
}

util::Json headerJson(const PseContainer& c) {
  util::Json j;
  j["kdfIterations"] = c.kdfIterations;
  j["kdfSalt"] = util::base64Encode(c.kdfSalt);
  j["nonce"] = util::base64Encode(c.nonce);
  j["version"] = c.version;
  return j;
}

}  // namespace

util::Json PseContainer::toJson() const {
  util::Json j = headerJson(*this);
  j["ciphertext"] = util::base64Encode(ciphertext);
  return j;
}

util::Bytes PseContainer::encode() const {
  return util::canonicalDumpBytes(toJson());
}

PseContainer PseContainer::fromJson(const util::Json& j) {
  try {
    util::requireKeys(j, {"ciphertext", "kdfIterations", "kdfSalt", "nonce", "version"});
    PseContainer c;
    c.version = util::getInt64(j, "version");
    c.kdfSalt = util::getBase64(j, "kdfSalt");
    c.kdfIterations = util::getInt64(j, "kdfIterations");
    c.nonce = util::getBase64(j, "nonce");
    c.ciphertext = util::getBase64(j, "ciphertext");
    if (c.kdfIterations < kMinIterations) {
      throw std::invalid_argument("kdfIterations below minimum");
    }
    return c;
  } catch (const std::invalid_argument& e) {
    throw CryptoError(CryptoError::Kind::malformed,
                      std::string("malformed PSE container: ") + e.what());
  }
}

PseContainer PseContainer::decode(const util::Bytes& bytes) {
  try {
    return fromJson(util::parseJson(util::toString(bytes)));
  } catch (const std::invalid_argument& e) {
    throw CryptoError(CryptoError::Kind::malformed,
                      std::string("malformed PSE container: ") + e.what());
  }
}

PseContainer buildPse(const PrivateKey& key, const std::vector<Certificate>& certs,
                      const std::string& password, std::int64_t iterations) {
  if (password.empty()) {
    throw std::invalid_argument("buildPse: empty password");
  }
  if (iterations < kMinIterations) {
    throw std::invalid_argument("buildPse: too few KDF iterations");
  }
  PseContainer c;
  c.version = 1;
  c.kdfSalt = util::randomBytes(kSaltLen);
  c.kdfIterations = iterations;
  c.nonce = util::randomBytes(kNonceLen);

  util::Json payload;
  util::Json certList = util::Json::array();
  for (const auto& cert : certs) certList.push_back(cert.toJson());
  payload["certificates"] = std::move(certList);
  payload["privateKey"] = key.toJson();

  util::Bytes plaintext = util::canonicalDumpBytes(payload);
  util::Bytes derived = deriveKey(password, c.kdfSalt, c.kdfIterations);
  c.ciphertext = aeadSeal(derived, c.nonce, plaintext, util::canonicalDumpBytes(headerJson(c)));
  util::secureWipe(derived);
  util::secureWipe(plaintext);
  return c;
}

PseContents openPse(const PseContainer& container, const std::string& password) {
  if (container.kdfSalt.size() != kSaltLen || container.nonce.size() != kNonceLen ||
      container.kdfIterations < kMinIterations) {
    throw CryptoError(CryptoError::Kind::malformed, "malformed PSE container");
  }
  util::Bytes derived = deriveKey(password, container.kdfSalt, container.kdfIterations);
  util::Bytes plaintext;
  try {
    plaintext = aeadOpen(derived, container.nonce, container.ciphertext,
                         util::canonicalDumpBytes(headerJson(container)));
  } catch (const CryptoError&) {
    util::secureWipe(derived);
    throw CryptoError(CryptoError::Kind::wrongPassword,
                      "wrong password or corrupted container");
  }
  util::secureWipe(derived);

  try {
    util::Json payload = util::parseJson(util::toString(plaintext));
    util::secureWipe(plaintext);
    util::requireKeys(payload, {"certificates", "privateKey"});
    PseContents contents{PrivateKey::fromJson(util::getObject(payload, "privateKey")), {}};
    for (const auto& certJson : util::getArray(payload, "certificates")) {
      contents.certificates.push_back(Certificate::fromJson(certJson));
    }
    return contents;
  } catch (const std::invalid_argument& e) {
    throw CryptoError(CryptoError::Kind::malformed,
                      std::string("malformed PSE payload: ") + e.what());
  }
}

}  // namespace pkidir::crypto
