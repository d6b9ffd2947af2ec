#include "pkidir/crypto/hybrid.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace pkidir::crypto {

namespace {

constexpr std::size_t kContentKeyLen = 32;
constexpr std::size_t kNonceLen = 12;
constexpr std::size_t kTagLen = 16;

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

}  // namespace

util::Bytes aeadSeal(const util::Bytes& key, const util::Bytes& nonce,
                     const util::Bytes& plaintext, const util::Bytes& aad) {
  if (key.size() != kContentKeyLen || nonce.size() != kNonceLen) {
    throw std::invalid_argument("aeadSeal: bad key or nonce length");
  }
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx ||
      EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(kNonceLen),
                          nullptr) != 1 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) != 1) {
    throwOpenSslError("GCM seal init");
  }
  int len = 0;
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    throwOpenSslError("GCM seal aad");
  }
  util::Bytes out(plaintext.size() + kTagLen);
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    throwOpenSslError("GCM seal update");
  }
  int total = len;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) {
    throwOpenSslError("GCM seal final");
  }
  total += len;
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen,
                          out.data() + total) != 1) {
    throwOpenSslError("GCM get tag");
  }
  out.resize(total + kTagLen);
  return out;
}

util::Bytes aeadOpen(const util::Bytes& key, const util::Bytes& nonce,
                     const util::Bytes& ciphertextWithTag, const util::Bytes& aad) {
  if (ciphertextWithTag.size() < kTagLen || nonce.size() != kNonceLen ||
      key.size() != kContentKeyLen) {
    throw CryptoError(CryptoError::Kind::decryptFailed, "malformed AEAD input");
  }
  const std::size_t ctLen = ciphertextWithTag.size() - kTagLen;
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx ||
      EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(kNonceLen),
                          nullptr) != 1 ||
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) != 1) {
    throwOpenSslError("GCM open init");
  }
  int len = 0;
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    throwOpenSslError("GCM open aad");
  }
  util::Bytes out(ctLen);
  if (ctLen > 0 &&
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertextWithTag.data(),
                        static_cast<int>(ctLen)) != 1) {
    throw CryptoError(CryptoError::Kind::decryptFailed, "authentication failed");
  }
  int total = ctLen > 0 ? len : 0;
  util::Bytes tag(ciphertextWithTag.end() - kTagLen, ciphertextWithTag.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen, tag.data()) != 1) {
    throwOpenSslError("GCM set tag");
  }
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) {
    throw CryptoError(CryptoError::Kind::decryptFailed, "authentication failed");
  }
  out.resize(total + len);
  return out;
}

util::Json EncryptedBlob::toJson() const {
  util::Json j;
  j["ciphertext"] = util::base64Encode(ciphertext);
  j["nonce"] = util::base64Encode(nonce);
  j["wrappedKey"] = util::base64Encode(wrappedKey);
  return j;
}

util::Bytes EncryptedBlob::encode() const {
  return util::canonicalDumpBytes(toJson());
}

EncryptedBlob EncryptedBlob::fromJson(const util::Json& j) {
  try {
    util::requireKeys(j, {"ciphertext", "nonce", "wrappedKey"});
    EncryptedBlob blob{util::getBase64(j, "wrappedKey"), util::getBase64(j, "nonce"),
                       util::getBase64(j, "ciphertext")};
    return blob;
  } catch (const std::invalid_argument& e) {
    throw CryptoError(CryptoError::Kind::malformed,
                      std::string("malformed envelope: ") + e.what());
  }
}

EncryptedBlob EncryptedBlob::decode(const util::Bytes& bytes) {
  try {
    return fromJson(util::parseJson(util::toString(bytes)));
  } catch (const std::invalid_argument& e) {
    throw CryptoError(CryptoError::Kind::malformed,
                      std::string("malformed envelope: ") + e.what());
  }
}

EncryptedBlob hybridEncrypt(const PublicKey& recipient, const util::Bytes& plaintext) {
  if (plaintext.empty()) {
    throw std::invalid_argument("hybridEncrypt: empty plaintext");
  }
  util::Bytes contentKey = util::randomBytes(kContentKeyLen);
  EncryptedBlob blob;
  blob.nonce = util::randomBytes(kNonceLen);
  blob.wrappedKey = recipient.encryptOaep(contentKey);
  blob.ciphertext = aeadSeal(contentKey, blob.nonce, plaintext, {});
  util::secureWipe(contentKey);
  return blob;
}

util::Bytes hybridDecrypt(const PrivateKey& recipient, const EncryptedBlob& blob) {
  util::Bytes contentKey = recipient.decryptOaep(blob.wrappedKey);
  if (contentKey.size() != kContentKeyLen) {
    util::secureWipe(contentKey);
    throw CryptoError(CryptoError::Kind::decryptFailed, "unexpected content key size");
  }
  try {
    util::Bytes plaintext = aeadOpen(contentKey, blob.nonce, blob.ciphertext, {});
    util::secureWipe(contentKey);
    return plaintext;
  } catch (...) {
    util::secureWipe(contentKey);
    throw;
  }
}

}  // namespace pkidir::crypto
