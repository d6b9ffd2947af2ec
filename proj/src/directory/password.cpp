#include "pkidir/directory/password.hpp"

#include <openssl/crypto.h>
#include <openssl/sha.h>

#include <stdexcept>

namespace pkidir::dir {

namespace {

constexpr std::string_view kSchemeTag = "{SSHA256}";
constexpr std::size_t kSaltLen = 16;
constexpr std::size_t kDigestLen = SHA256_DIGEST_LENGTH;

util::Bytes sha256Concat(const util::Bytes& password, const util::Bytes& salt) {
  util::Bytes input;
  input.reserve(password.size() + salt.size());
  input.insert(input.end(), password.begin(), password.end());
  input.insert(input.end(), salt.begin(), salt.end());
  util::Bytes digest(kDigestLen);
  SHA256(input.data(), input.size(), digest.data());
  util::secureWipe(input);
  return digest;
}

}  // namespace

std::string PasswordHash::render() const {
  util::Bytes body;
  body.reserve(digest.size() + salt.size());
  body.insert(body.end(), digest.begin(), digest.end());
  body.insert(body.end(), salt.begin(), salt.end());
  return std::string(kSchemeTag) + util::base64Encode(body);
}

std::optional<PasswordHash> PasswordHash::parse(std::string_view rendered) {
  if (rendered.substr(0, kSchemeTag.size()) != kSchemeTag) return std::nullopt;
  util::Bytes body;
  if (!util::tryBase64Decode(rendered.substr(kSchemeTag.size()), body)) {
    return std::nullopt;
  }
  if (body.size() != kDigestLen + kSaltLen) return std::nullopt;
  PasswordHash hash;
  hash.digest.assign(body.begin(), body.begin() + kDigestLen);
  hash.salt.assign(body.begin() + kDigestLen, body.end());
  return hash;
}

PasswordHash hashPassword(const util::Bytes& password) {
  if (password.empty()) {
    throw std::invalid_argument("refusing to hash an empty password");
  }
  PasswordHash hash;
  hash.salt = util::randomBytes(kSaltLen);
  hash.digest = sha256Concat(password, hash.salt);
  return hash;
}

bool verifyPassword(const util::Bytes& password, const PasswordHash& stored) noexcept {
  if (password.empty()) return false;
  if (stored.salt.size() != kSaltLen || stored.digest.size() != kDigestLen) {
    return false;
  }
  util::Bytes expected = sha256Concat(password, stored.salt);
  return CRYPTO_memcmp(expected.data(), stored.digest.data(), kDigestLen) == 0;
}

bool verifyPassword(const util::Bytes& password, std::string_view renderedHash) noexcept {
  auto parsed = PasswordHash::parse(renderedHash);
  if (!parsed) return false;
  return verifyPassword(password, *parsed);
}

}  // namespace pkidir::dir
