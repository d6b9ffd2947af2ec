#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "pkidir/crypto/certificate.hpp"
#include "pkidir/crypto/hybrid.hpp"
#include "pkidir/crypto/keys.hpp"
#include "pkidir/crypto/pse.hpp"
#include "support/test_support.hpp"

using namespace pkidir::crypto;
using pkidir::dir::DistinguishedName;
using pkidir::util::Bytes;
using pkidir::util::toBytes;

namespace {

// Key generation dominates the suite: share a few pairs across cases.
const KeyPair& pairA() {
  static const KeyPair kp = generateKeyPair();
  return kp;
}
const KeyPair& pairB() {
  static const KeyPair kp = generateKeyPair();
  return kp;
}

Certificate sampleCert(const PublicKey& subjectKey, std::int64_t serial = 7) {
  return issueCertificate(pairA().privateKey,
                          DistinguishedName::parse("cn=test-ca,o=pki"),
                          DistinguishedName::parse("cn=subject,ou=people,o=pki"),
                          subjectKey, 1000000, 3600, serial);
}

}  // namespace

TEST_CASE("key pairs generate, round-trip, and self-check") {
  const KeyPair& kp = pairA();
  CHECK(kp.privateKey.selfCheck());
  CHECK(kp.publicKey.modulus().size() == 256);  // 2048 bits

  // distinct moduli across generations
  CHECK(pairA().publicKey != pairB().publicKey);

  // serialization round-trips
  const PrivateKey restored = PrivateKey::fromJson(kp.privateKey.toJson());
  CHECK(restored.publicKey() == kp.publicKey);
  const PublicKey restoredPub = PublicKey::fromJson(kp.publicKey.toJson());
  CHECK(restoredPub == kp.publicKey);

  // a restored key still decrypts what the original public key sealed
  const Bytes msg = toBytes("probe");
  CHECK(hybridDecrypt(restored, hybridEncrypt(kp.publicKey, msg)) == msg);
}

TEST_CASE("hybrid round-trip identities") {
  const KeyPair& kp = pairA();

  SUBCASE("single octet") {
    const Bytes msg = {0x42};
    CHECK(hybridDecrypt(kp.privateKey, hybridEncrypt(kp.publicKey, msg)) == msg);
  }
  SUBCASE("4 KiB payload") {
    const Bytes msg = testsupport::randomTestBytes(4096);
    CHECK(hybridDecrypt(kp.privateKey, hybridEncrypt(kp.publicKey, msg)) == msg);
  }
  SUBCASE("100 random payloads") {
    std::uniform_int_distribution<std::size_t> sizeDist(1, 2048);
    for (int i = 0; i < 100; ++i) {
      const Bytes msg = testsupport::randomTestBytes(sizeDist(testsupport::testRng()));
      const EncryptedBlob blob = hybridEncrypt(kp.publicKey, msg);
      CHECK(hybridDecrypt(kp.privateKey, EncryptedBlob::decode(blob.encode())) == msg);
    }
  }
  SUBCASE("empty plaintext refused") {
    CHECK_THROWS_AS(hybridEncrypt(kp.publicKey, Bytes{}), std::invalid_argument);
  }
}

TEST_CASE("hybrid encryption is fresh per call") {
  const Bytes msg = toBytes("same message");
  const EncryptedBlob a = hybridEncrypt(pairA().publicKey, msg);
  const EncryptedBlob b = hybridEncrypt(pairA().publicKey, msg);
  CHECK(a.nonce != b.nonce);
  CHECK(a.wrappedKey != b.wrappedKey);
  CHECK(a.ciphertext != b.ciphertext);
}

TEST_CASE("wrong private key fails to decrypt") {
  const EncryptedBlob blob = hybridEncrypt(pairA().publicKey, toBytes("secret"));
  CHECK_THROWS_AS(hybridDecrypt(pairB().privateKey, blob), CryptoError);
}

TEST_CASE("any single bit flip breaks decryption (100 positions)") {
  const Bytes msg = testsupport::randomTestBytes(512);
  const EncryptedBlob blob = hybridEncrypt(pairA().publicKey, msg);
  const Bytes encoded = blob.encode();

  std::uniform_int_distribution<std::size_t> posDist(0, encoded.size() - 1);
  std::uniform_int_distribution<int> bitDist(0, 7);
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    Bytes corrupted = encoded;
    corrupted[posDist(testsupport::testRng())] ^=
        static_cast<std::uint8_t>(1 << bitDist(testsupport::testRng()));
    try {
      const Bytes out = hybridDecrypt(pairA().privateKey, EncryptedBlob::decode(corrupted));
      // a flip inside base64 padding or JSON could decode to the same bytes;
      // silent wrong plaintext is the only true failure
      CHECK(out == msg);
    } catch (const CryptoError&) {
      ++failures;
    }
  }
  CHECK(failures >= 95);  // nearly every flip must be rejected outright
}

TEST_CASE("certificate verification") {
  const KeyPair& subject = pairB();
  const Certificate cert = sampleCert(subject.publicKey);
  const PublicKey caPk = pairA().publicKey;

  CHECK(verifyCertificate(caPk, cert, 1000000));        // at notBefore
  CHECK(verifyCertificate(caPk, cert, 1001800));        // inside
  CHECK(verifyCertificate(caPk, cert, 1003600));        // at notAfter
  CHECK(!verifyCertificate(caPk, cert, 1003601));       // notAfter + 1
  CHECK(!verifyCertificate(caPk, cert, 999999));        // before notBefore
  CHECK(!verifyCertificate(pairB().publicKey, cert, 1000001));  // wrong CA key

  // encode/decode round-trip preserves verification
  const Certificate decoded = Certificate::decode(cert.encode());
  CHECK(verifyCertificateSignature(caPk, decoded));
  CHECK(decoded.encode() == cert.encode());
}

TEST_CASE("every single-field mutation invalidates the signature") {
  const Certificate cert = sampleCert(pairB().publicKey);
  const PublicKey caPk = pairA().publicKey;

  Certificate m = cert;
  m.serial += 1;
  CHECK(!verifyCertificateSignature(caPk, m));

  m = cert;
  m.subject = DistinguishedName::parse("cn=evil,ou=people,o=pki");
  CHECK(!verifyCertificateSignature(caPk, m));

  m = cert;
  m.subjectPublicKey = pairA().publicKey;
  CHECK(!verifyCertificateSignature(caPk, m));

  m = cert;
  m.notBefore -= 1;
  CHECK(!verifyCertificateSignature(caPk, m));

  m = cert;
  m.notAfter += 1;
  CHECK(!verifyCertificateSignature(caPk, m));

  m = cert;
  m.issuer = DistinguishedName::parse("cn=other-ca,o=pki");
  CHECK(!verifyCertificateSignature(caPk, m));

  m = cert;
  m.signature[0] ^= 0x01;
  CHECK(!verifyCertificateSignature(caPk, m));
}

TEST_CASE("canonical certificate encoding is injective on a fixture set") {
  std::set<std::string> encodings;
  int count = 0;
  for (std::int64_t serial : {1, 2}) {
    for (std::int64_t notBefore : {1000000, 2000000}) {
      for (const char* subject : {"cn=a,o=pki", "cn=b,o=pki"}) {
        Certificate cert = issueCertificate(
            pairA().privateKey, DistinguishedName::parse("cn=test-ca,o=pki"),
            DistinguishedName::parse(subject), pairB().publicKey, notBefore, 60, serial);
        encodings.insert(pkidir::util::toString(cert.tbsBytes()));
        ++count;
      }
    }
  }
  CHECK(static_cast<int>(encodings.size()) == count);
}

TEST_CASE("pse build/open round-trip and wrong password") {
  const KeyPair& kp = pairB();
  const Certificate cert = sampleCert(kp.publicKey);
  const PseContainer pse = buildPse(kp.privateKey, {cert}, "pse-pass-1");

  const PseContents contents = openPse(PseContainer::decode(pse.encode()), "pse-pass-1");
  CHECK(contents.privateKey.toJson() == kp.privateKey.toJson());
  REQUIRE(contents.certificates.size() == 1);
  CHECK(contents.certificates[0].encode() == cert.encode());

  CHECK_THROWS_AS(openPse(pse, "pse-pasS-1"), CryptoError);
  try {
    openPse(pse, "pse-pasS-1");
  } catch (const CryptoError& e) {
    CHECK(e.kind() == CryptoError::Kind::wrongPassword);
  }

  CHECK_THROWS_AS(buildPse(kp.privateKey, {cert}, ""), std::invalid_argument);
  CHECK_THROWS_AS(buildPse(kp.privateKey, {cert}, "pw", 99999), std::invalid_argument);
}

TEST_CASE("pse round-trip over random passwords") {
  const KeyPair& kp = pairB();
  for (int i = 0; i < 20; ++i) {
    const std::string password = testsupport::randomTestAscii(12);
    const PseContainer pse = buildPse(kp.privateKey, {}, password);
    const PseContents contents = openPse(pse, password);
    CHECK(contents.privateKey.toJson() == kp.privateKey.toJson());
    CHECK(contents.certificates.empty());
  }
}

TEST_CASE("tampered pse containers error, never corrupt (100 flips)") {
  const KeyPair& kp = pairB();
  const Certificate cert = sampleCert(kp.publicKey);
  const PseContainer pse = buildPse(kp.privateKey, {cert}, "pse-pass-2");
  const Bytes encoded = pse.encode();
  const std::string keyJson = pkidir::util::canonicalDump(kp.privateKey.toJson());

  std::uniform_int_distribution<std::size_t> posDist(0, encoded.size() - 1);
  std::uniform_int_distribution<int> bitDist(0, 7);
  for (int i = 0; i < 100; ++i) {
    Bytes corrupted = encoded;
    corrupted[posDist(testsupport::testRng())] ^=
        static_cast<std::uint8_t>(1 << bitDist(testsupport::testRng()));
    try {
      const PseContents contents =
          openPse(PseContainer::decode(corrupted), "pse-pass-2");
      // only acceptable if the flip left the container semantically intact
      CHECK(pkidir::util::canonicalDump(contents.privateKey.toJson()) == keyJson);
    } catch (const CryptoError&) {
      // expected: wrongPassword or malformed
    }
  }
}
