#include "pkidir/crypto/keys.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>
#include <openssl/rsa.h>

#include <array>

namespace pkidir::crypto {

namespace {

struct BnDeleter {
  void operator()(BIGNUM* bn) const { BN_clear_free(bn); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;

struct CtxDeleter {
  void operator()(EVP_PKEY_CTX* ctx) const { EVP_PKEY_CTX_free(ctx); }
};
using CtxPtr = std::unique_ptr<EVP_PKEY_CTX, CtxDeleter>;

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

std::shared_ptr<EVP_PKEY> sharePkey(EVP_PKEY* pkey) {
  return std::shared_ptr<EVP_PKEY>(pkey, EVP_PKEY_free);
}

BnPtr bytesToBn(const util::Bytes& bytes) {
  BIGNUM* bn = BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr);
  if (bn == nullptr) throwOpenSslError("BN_bin2bn");
  return BnPtr(bn);
}

util::Bytes bnToBytes(const BIGNUM* bn) {
  util::Bytes out(static_cast<std::size_t>(BN_num_bytes(bn)));
  BN_bn2bin(bn, out.data());
  return out;
}

util::Bytes getBnParam(EVP_PKEY* pkey, const char* name) {
  BIGNUM* bn = nullptr;
  if (EVP_PKEY_get_bn_param(pkey, name, &bn) != 1 || bn == nullptr) {
    throwOpenSslError(std::string("EVP_PKEY_get_bn_param ") + name);
  }
  BnPtr holder(bn);
  return bnToBytes(bn);
}

std::shared_ptr<EVP_PKEY> buildRsaKey(const std::vector<std::pair<const char*, const util::Bytes*>>& components,
                                      int selection) {
  OSSL_PARAM_BLD* bld = OSSL_PARAM_BLD_new();
  if (bld == nullptr) throwOpenSslError("OSSL_PARAM_BLD_new");
  std::vector<BnPtr> bns;
  bns.reserve(components.size());
  for (const auto& [name, bytes] : components) {
    bns.push_back(bytesToBn(*bytes));
    if (OSSL_PARAM_BLD_push_BN(bld, name, bns.back().get()) != 1) {
      OSSL_PARAM_BLD_free(bld);
      throwOpenSslError("OSSL_PARAM_BLD_push_BN");
    }
  }
  OSSL_PARAM* params = OSSL_PARAM_BLD_to_param(bld);
  OSSL_PARAM_BLD_free(bld);
  if (params == nullptr) throwOpenSslError("OSSL_PARAM_BLD_to_param");

  CtxPtr ctx(EVP_PKEY_CTX_new_from_name(nullptr, "RSA", nullptr));
  EVP_PKEY* pkey = nullptr;
  bool ok = ctx && EVP_PKEY_fromdata_init(ctx.get()) == 1 &&
            EVP_PKEY_fromdata(ctx.get(), &pkey, selection, params) == 1;
  OSSL_PARAM_free(params);
  if (!ok || pkey == nullptr) {
    throw CryptoError(CryptoError::Kind::malformed, "cannot assemble RSA key");
  }
  return sharePkey(pkey);
}

}  // namespace

void throwOpenSslError(const std::string& context) {
  std::array<char, 256> buf{};
  ERR_error_string_n(ERR_get_error(), buf.data(), buf.size());
  throw CryptoError(CryptoError::Kind::internal, context + ": " + buf.data());
}

PublicKey PublicKey::fromComponents(const util::Bytes& modulus,
                                    const util::Bytes& exponent) {
  if (modulus.empty() || exponent.empty()) {
    throw CryptoError(CryptoError::Kind::malformed, "empty RSA component");
  }
  auto pkey = buildRsaKey({{OSSL_PKEY_PARAM_RSA_N, &modulus},
                           {OSSL_PKEY_PARAM_RSA_E, &exponent}},
                          EVP_PKEY_PUBLIC_KEY);
  // Re-extract so equal keys always carry identical component bytes
  // (leading zeros stripped by the BIGNUM round trip).
  util::Bytes n = getBnParam(pkey.get(), OSSL_PKEY_PARAM_RSA_N);
  util::Bytes e = getBnParam(pkey.get(), OSSL_PKEY_PARAM_RSA_E);
  return PublicKey(std::move(pkey), std::move(n), std::move(e));
}

PublicKey PublicKey::fromJson(const util::Json& j) {
  try {
    util::requireKeys(j, {"e", "n"});
    return fromComponents(util::getBase64(j, "n"), util::getBase64(j, "e"));
  } catch (const std::invalid_argument& e) {
    throw CryptoError(CryptoError::Kind::malformed, e.what());
  }
}

util::Json PublicKey::toJson() const {
  util::Json j;
  j["e"] = util::base64Encode(exponent_);
  j["n"] = util::base64Encode(modulus_);
  return j;
}

util::Bytes PublicKey::encryptOaep(const util::Bytes& plaintext) const {
  CtxPtr ctx(EVP_PKEY_CTX_new(pkey_.get(), nullptr));
  if (!ctx || EVP_PKEY_encrypt_init(ctx.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_PKCS1_OAEP_PADDING) != 1 ||
      EVP_PKEY_CTX_set_rsa_oaep_md(ctx.get(), EVP_sha256()) != 1 ||
      EVP_PKEY_CTX_set_rsa_mgf1_md(ctx.get(), EVP_sha256()) != 1) {
    throwOpenSslError("OAEP encrypt init");
  }
  std::size_t outLen = 0;
  if (EVP_PKEY_encrypt(ctx.get(), nullptr, &outLen, plaintext.data(),
                       plaintext.size()) != 1) {
    throwOpenSslError("OAEP encrypt size");
  }
  util::Bytes out(outLen);
  if (EVP_PKEY_encrypt(ctx.get(), out.data(), &outLen, plaintext.data(),
                       plaintext.size()) != 1) {
    throwOpenSslError("OAEP encrypt");
  }
  out.resize(outLen);
  return out;
}

bool PublicKey::verifyPss(const util::Bytes& message, const util::Bytes& signature) const {
  MdCtxPtr md(EVP_MD_CTX_new());
  EVP_PKEY_CTX* pctx = nullptr;
  if (!md ||
      EVP_DigestVerifyInit(md.get(), &pctx, EVP_sha256(), nullptr, pkey_.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) != 1 ||
      EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, RSA_PSS_SALTLEN_DIGEST) != 1) {
    throwOpenSslError("PSS verify init");
  }
  const int rc = EVP_DigestVerify(md.get(), signature.data(), signature.size(),
                                  message.data(), message.size());
  ERR_clear_error();
  return rc == 1;
}

bool operator==(const PublicKey& a, const PublicKey& b) {
  return a.modulus() == b.modulus() && a.exponent() == b.exponent();
}

bool operator!=(const PublicKey& a, const PublicKey& b) { return !(a == b); }

PrivateKey PrivateKey::wrap(std::shared_ptr<EVP_PKEY> pkey) {
  return PrivateKey(std::move(pkey));
}

PrivateKey PrivateKey::fromJson(const util::Json& j) {
  try {
    util::requireKeys(j, {"d", "dp", "dq", "e", "n", "p", "q", "qi"});
    const util::Bytes n = util::getBase64(j, "n");
    const util::Bytes e = util::getBase64(j, "e");
    const util::Bytes d = util::getBase64(j, "d");
    const util::Bytes p = util::getBase64(j, "p");
    const util::Bytes q = util::getBase64(j, "q");
    const util::Bytes dp = util::getBase64(j, "dp");
    const util::Bytes dq = util::getBase64(j, "dq");
    const util::Bytes qi = util::getBase64(j, "qi");
    auto pkey = buildRsaKey({{OSSL_PKEY_PARAM_RSA_N, &n},
                             {OSSL_PKEY_PARAM_RSA_E, &e},
                             {OSSL_PKEY_PARAM_RSA_D, &d},
                             {OSSL_PKEY_PARAM_RSA_FACTOR1, &p},
                             {OSSL_PKEY_PARAM_RSA_FACTOR2, &q},
                             {OSSL_PKEY_PARAM_RSA_EXPONENT1, &dp},
                             {OSSL_PKEY_PARAM_RSA_EXPONENT2, &dq},
                             {OSSL_PKEY_PARAM_RSA_COEFFICIENT1, &qi}},
                            EVP_PKEY_KEYPAIR);
    return PrivateKey(std::move(pkey));
  } catch (const std::invalid_argument& e) {
    throw CryptoError(CryptoError::Kind::malformed, e.what());
  }
}

util::Json PrivateKey::toJson() const {
  util::Json j;
  j["d"] = util::base64Encode(getBnParam(pkey_.get(), OSSL_PKEY_PARAM_RSA_D));
  j["dp"] = util::base64Encode(getBnParam(pkey_.get(), OSSL_PKEY_PARAM_RSA_EXPONENT1));
  j["dq"] = util::base64Encode(getBnParam(pkey_.get(), OSSL_PKEY_PARAM_RSA_EXPONENT2));
  j["e"] = util::base64Encode(getBnParam(pkey_.get(), OSSL_PKEY_PARAM_RSA_E));
  j["n"] = util::base64Encode(getBnParam(pkey_.get(), OSSL_PKEY_PARAM_RSA_N));
  j["p"] = util::base64Encode(getBnParam(pkey_.get(), OSSL_PKEY_PARAM_RSA_FACTOR1));
  j["q"] = util::base64Encode(getBnParam(pkey_.get(), OSSL_PKEY_PARAM_RSA_FACTOR2));
  j["qi"] = util::base64Encode(getBnParam(pkey_.get(), OSSL_PKEY_PARAM_RSA_COEFFICIENT1));
  return j;
}

PublicKey PrivateKey::publicKey() const {
  return PublicKey::fromComponents(getBnParam(pkey_.get(), OSSL_PKEY_PARAM_RSA_N),
                                   getBnParam(pkey_.get(), OSSL_PKEY_PARAM_RSA_E));
}

util::Bytes PrivateKey::decryptOaep(const util::Bytes& ciphertext) const {
  CtxPtr ctx(EVP_PKEY_CTX_new(pkey_.get(), nullptr));
  if (!ctx || EVP_PKEY_decrypt_init(ctx.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_PKCS1_OAEP_PADDING) != 1 ||
      EVP_PKEY_CTX_set_rsa_oaep_md(ctx.get(), EVP_sha256()) != 1 ||
      EVP_PKEY_CTX_set_rsa_mgf1_md(ctx.get(), EVP_sha256()) != 1) {
    throwOpenSslError("OAEP decrypt init");
  }
  std::size_t outLen = 0;
  if (EVP_PKEY_decrypt(ctx.get(), nullptr, &outLen, ciphertext.data(),
                       ciphertext.size()) != 1) {
    ERR_clear_error();
    throw CryptoError(CryptoError::Kind::decryptFailed, "OAEP decryption failed");
  }
  util::Bytes out(outLen);
  if (EVP_PKEY_decrypt(ctx.get(), out.data(), &outLen, ciphertext.data(),
                       ciphertext.size()) != 1) {
    ERR_clear_error();
    throw CryptoError(CryptoError::Kind::decryptFailed, "OAEP decryption failed");
  }
  out.resize(outLen);
  return out;
}

util::Bytes PrivateKey::signPss(const util::Bytes& message) const {
  MdCtxPtr md(EVP_MD_CTX_new());
  EVP_PKEY_CTX* pctx = nullptr;
  if (!md ||
      EVP_DigestSignInit(md.get(), &pctx, EVP_sha256(), nullptr, pkey_.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) != 1 ||
      EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, RSA_PSS_SALTLEN_DIGEST) != 1) {
    throwOpenSslError("PSS sign init");
  }
  std::size_t sigLen = 0;
  if (EVP_DigestSign(md.get(), nullptr, &sigLen, message.data(), message.size()) != 1) {
    throwOpenSslError("PSS sign size");
  }
  util::Bytes sig(sigLen);
  if (EVP_DigestSign(md.get(), sig.data(), &sigLen, message.data(), message.size()) != 1) {
    throwOpenSslError("PSS sign");
  }
  sig.resize(sigLen);
  return sig;
}

bool PrivateKey::selfCheck() const {
  CtxPtr ctx(EVP_PKEY_CTX_new(pkey_.get(), nullptr));
  if (!ctx) return false;
  const int rc = EVP_PKEY_check(ctx.get());
  ERR_clear_error();
  return rc == 1;
}

KeyPair generateKeyPair() {
  CtxPtr ctx(EVP_PKEY_CTX_new_from_name(nullptr, "RSA", nullptr));
  if (!ctx || EVP_PKEY_keygen_init(ctx.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_keygen_bits(ctx.get(), 2048) != 1) {
    throwOpenSslError("RSA keygen init");
  }
  EVP_PKEY* pkey = nullptr;
  if (EVP_PKEY_keygen(ctx.get(), &pkey) != 1 || pkey == nullptr) {
    throwOpenSslError("RSA keygen");
  }
  PrivateKey priv = PrivateKey::wrap(sharePkey(pkey));
  PublicKey pub = priv.publicKey();
  return KeyPair{std::move(priv), std::move(pub)};
}

}  // namespace pkidir::crypto
