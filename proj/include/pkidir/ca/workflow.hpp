#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkidir/crypto/certificate.hpp"
#include "pkidir/crypto/keys.hpp"
#include "pkidir/directory/directory.hpp"
#include "pkidir/session.hpp"
#include "pkidir/util/json.hpp"

namespace pkidir::ca {

/// How the registrant proves possession and obtains the bind password:
/// fullEncrypted   - whole password delivered encrypted under the subject key
/// halfHalf        - half handed out at registration, half encrypted
/// sharedSecretOnly- registration secret is the whole password; possession is
///                   still proven by decrypting the certificate
enum class PopVariant { fullEncrypted, halfHalf, sharedSecretOnly };

std::string_view popVariantName(PopVariant v);
std::optional<PopVariant> popVariantFromName(std::string_view name);

struct RegistrationRecord {
  dir::DistinguishedName subject;
  std::optional<crypto::PublicKey> subjectPublicKey;
  PopVariant variant = PopVariant::fullEncrypted;
  std::optional<std::string> sharedSecret;  // handed to the registrant
  std::int64_t createdAt = 0;

  /// halfHalf and sharedSecretOnly require a shared secret; fullEncrypted
  /// forbids one. Throws std::invalid_argument.
  void validate() const;

  util::Json toJson() const;
  static RegistrationRecord fromJson(const util::Json& j);
};

struct PolicyConfig {
  std::int64_t activationDeadlineSeconds = 259200;  // three days
  bool deletePasswordAfterActivation = false;
};

/// CA-side record of a provisioned entry.
struct IssuedRecord {
  dir::DistinguishedName dn;
  std::int64_t serial = 0;
  crypto::Certificate certificate;
  std::int64_t provisionedAt = 0;
  std::int64_t activationDeadline = 0;  // absolute; 0 for the PSE flow
  std::string kind;                     // "pop" | "pse"
  bool expiredDeleted = false;
  bool passwordRemoved = false;
};

struct CaConfig {
  std::filesystem::path statePath;
  std::filesystem::path auditPath;
  std::string adminDn;
  std::string adminPassword;
};

/// Registration, entry provisioning, policy enforcement and activation
/// verification. State is an append-only record file, the audit log plain
/// text. The engine only ever talks to the directory as a client; nothing
/// here listens for end-entity messages.
class CaEngine {
 public:
  /// Generates the CA signing key and writes a fresh state file.
  static CaEngine create(const dir::DistinguishedName& caDn, CaConfig config);
  static CaEngine load(CaConfig config);

  const dir::DistinguishedName& caDn() const { return caDn_; }
  crypto::PublicKey caPublicKey() const { return caKey_->publicKey(); }

  /// The fixed rule set the schemes require (installed at server startup):
  /// anonymous and authenticated users read the two encrypted attributes and
  /// userCertificate; the owner additionally reads userPKCS12 and writes
  /// userCertificate; the admin holds every right; everything else denied.
  static std::vector<dir::AclRule> standardAclRules();

  /// Counts one inbound end-entity message (the registration request).
  RegistrationRecord registerSubject(const dir::DistinguishedName& subject,
                                     std::optional<crypto::PublicKey> subjectPublicKey,
                                     PopVariant variant, std::int64_t now);

  /// Issues the certificate and creates the directory entry per variant;
  /// userCertificate stays unset until the owner activates. Throws
  /// DirectoryError (entryAlreadyExists, schemaViolation, ...) and
  /// std::invalid_argument on a bad registration.
  crypto::Certificate provisionPopEntry(DirectorySession& session,
                                        const RegistrationRecord& registration,
                                        const PolicyConfig& policy, std::int64_t now,
                                        std::int64_t validitySeconds);

  /// CA-generated key pair sealed into userPKCS12; the CA-side private key
  /// copy is destroyed afterwards (audited).
  crypto::Certificate provisionPseEntry(DirectorySession& session,
                                        const dir::DistinguishedName& subject,
                                        const std::string& registrationPassword,
                                        const std::string& psePassword, std::int64_t now,
                                        std::int64_t validitySeconds);

  /// Deletes unactivated entries past their deadline; optionally removes
  /// userPassword from activated entries. Idempotent. Returns one action
  /// string per change ("DELETED <dn>" / "PASSWORD-REMOVED <dn>").
  std::vector<std::string> enforcePolicy(DirectorySession& session, std::int64_t now,
                                         const PolicyConfig& policy);

  /// True iff the entry's userCertificate verifies under the CA key and its
  /// subject public key matches the CA-side issued certificate. Throws
  /// DirectoryError(noSuchObject) when the entry is gone.
  bool verifyActivation(DirectorySession& session, const dir::DistinguishedName& dn);

  std::uint64_t inboundMessageCount() const { return inboundMessages_; }

  const std::vector<IssuedRecord>& issuedRecords() const { return issued_; }
  const IssuedRecord* issuedRecordFor(const dir::DistinguishedName& dn) const;
  std::optional<RegistrationRecord> registrationFor(const dir::DistinguishedName& dn) const;

 private:
  explicit CaEngine(CaConfig config) : config_(std::move(config)) {}

  void bindAdmin(DirectorySession& session) const;
  bool isActivatedEntry(const dir::DirectoryEntry& entry,
                        const IssuedRecord& record) const;
  std::int64_t nextSerial() const;
  IssuedRecord* findIssued(const dir::DistinguishedName& dn);
  void appendState(const util::Json& record);
  void appendAudit(std::int64_t at, const std::string& line);
  void replayState(const std::string& text);

  CaConfig config_;
  dir::DistinguishedName caDn_;
  std::optional<crypto::PrivateKey> caKey_;
  std::uint64_t inboundMessages_ = 0;
  std::map<std::string, RegistrationRecord> registrations_;  // by normalized DN
  std::vector<IssuedRecord> issued_;
};

/// Installs the standard rule set on a directory (done at server startup).
void configureAcls(dir::Directory& directory);

}  // namespace pkidir::ca
