#include "pkidir/ca/workflow.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pkidir/crypto/hybrid.hpp"
#include "pkidir/crypto/pse.hpp"
#include "pkidir/directory/password.hpp"

namespace pkidir::ca {

namespace {

std::string renderPassword(std::size_t octets) {
  return util::base64Encode(util::randomBytes(octets));
}

dir::AttributeValue binaryValue(const util::Bytes& bytes) {
  return dir::AttributeValue::binary(bytes);
}

dir::AttributeValue textValue(const std::string& text) {
  return dir::AttributeValue::text(text);
}

}  // namespace

std::string_view popVariantName(PopVariant v) {
  switch (v) {
    case PopVariant::fullEncrypted: return "full";
    case PopVariant::halfHalf: return "half";
    case PopVariant::sharedSecretOnly: return "secret";
  }
  return "?";
}

std::optional<PopVariant> popVariantFromName(std::string_view name) {
  if (name == "full") return PopVariant::fullEncrypted;
  if (name == "half") return PopVariant::halfHalf;
  if (name == "secret") return PopVariant::sharedSecretOnly;
  return std::nullopt;
}

void RegistrationRecord::validate() const {
  if (subject.empty()) throw std::invalid_argument("registration without subject");
  const bool needsSecret = variant != PopVariant::fullEncrypted;
  if (needsSecret && (!sharedSecret || sharedSecret->empty())) {
    throw std::invalid_argument("variant requires a shared secret");
  }
  if (!needsSecret && sharedSecret) {
    throw std::invalid_argument("fullEncrypted forbids a shared secret");
  }
}

util::Json RegistrationRecord::toJson() const {
  util::Json j;
  j["createdAt"] = createdAt;
  j["sharedSecret"] = sharedSecret ? util::Json(*sharedSecret) : util::Json(nullptr);
  j["subject"] = subject.render();
  j["subjectPublicKey"] =
      subjectPublicKey ? subjectPublicKey->toJson() : util::Json(nullptr);
  j["variant"] = std::string(popVariantName(variant));
  return j;
}

RegistrationRecord RegistrationRecord::fromJson(const util::Json& j) {
  util::requireKeys(j, {"createdAt", "sharedSecret", "subject", "subjectPublicKey",
                        "variant"});
  RegistrationRecord reg;
  reg.createdAt = util::getInt64(j, "createdAt");
  reg.subject = dir::DistinguishedName::parse(util::getString(j, "subject"));
  const auto variant = popVariantFromName(util::getString(j, "variant"));
  if (!variant) throw std::invalid_argument("unknown PoP variant");
  reg.variant = *variant;
  if (!j.at("sharedSecret").is_null()) {
    reg.sharedSecret = util::getString(j, "sharedSecret");
  }
  if (!j.at("subjectPublicKey").is_null()) {
    reg.subjectPublicKey = crypto::PublicKey::fromJson(j.at("subjectPublicKey"));
  }
  reg.validate();
  return reg;
}

CaEngine CaEngine::create(const dir::DistinguishedName& caDn, CaConfig config) {
  CaEngine engine(std::move(config));
  engine.caDn_ = caDn;
  engine.caKey_ = crypto::generateKeyPair().privateKey;

  std::ofstream out(engine.config_.statePath, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot create CA state file: " +
                             engine.config_.statePath.string());
  }
  out.close();
  // the state file carries the CA signing key
  std::filesystem::permissions(engine.config_.statePath,
                               std::filesystem::perms::owner_read |
                                   std::filesystem::perms::owner_write,
                               std::filesystem::perm_options::replace);

  util::Json record;
  record["caDn"] = caDn.render();
  record["createdAt"] = util::nowUtcSeconds();
  record["key"] = engine.caKey_->toJson();
  record["record"] = "ca";
  engine.appendState(record);
  engine.appendAudit(util::nowUtcSeconds(), "CA-CREATED dn=" + caDn.render());
  return engine;
}

CaEngine CaEngine::load(CaConfig config) {
  CaEngine engine(std::move(config));
  std::ifstream in(engine.config_.statePath, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open CA state file: " +
                             engine.config_.statePath.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  engine.replayState(buf.str());
  if (!engine.caKey_) {
    throw std::runtime_error("CA state file holds no CA key record");
  }
  return engine;
}

void CaEngine::replayState(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const util::Json j = util::parseJson(line);
    const std::string kind = util::getString(j, "record");
    if (kind == "ca") {
      caDn_ = dir::DistinguishedName::parse(util::getString(j, "caDn"));
      caKey_ = crypto::PrivateKey::fromJson(util::getObject(j, "key"));
    } else if (kind == "inbound-message") {
      ++inboundMessages_;
    } else if (kind == "registration") {
      RegistrationRecord reg = RegistrationRecord::fromJson(util::getObject(j, "reg"));
      registrations_[reg.subject.normalizedKey()] = std::move(reg);
    } else if (kind == "issued") {
      IssuedRecord record;
      record.certificate = crypto::Certificate::fromJson(util::getObject(j, "cert"));
      record.dn = dir::DistinguishedName::parse(util::getString(j, "dn"));
      record.serial = record.certificate.serial;
      record.provisionedAt = util::getInt64(j, "provisionedAt");
      record.activationDeadline = util::getInt64(j, "deadline");
      record.kind = util::getString(j, "kind");
      issued_.push_back(std::move(record));
    } else if (kind == "expired-deleted") {
      if (auto* rec = findIssued(dir::DistinguishedName::parse(util::getString(j, "dn")))) {
        rec->expiredDeleted = true;
      }
    } else if (kind == "password-removed") {
      if (auto* rec = findIssued(dir::DistinguishedName::parse(util::getString(j, "dn")))) {
        rec->passwordRemoved = true;
      }
    } else {
      throw std::runtime_error("unknown CA state record: " + kind);
    }
  }
}

std::vector<dir::AclRule> CaEngine::standardAclRules() {
  using dir::AclAccess;
  using dir::AclRule;
  using dir::AclSubject;
  using dir::AclTarget;
  using dir::AclTargetKind;

  const AclTarget anyEntry{AclTargetKind::subtree, std::nullopt};
  const AclTarget ownEntry{AclTargetKind::ownEntry, std::nullopt};

  std::vector<AclRule> rules;
  rules.push_back({AclSubject::admin, anyEntry, "*", AclAccess::write});
  rules.push_back({AclSubject::self, ownEntry, std::string(dir::kAttrUserPkcs12),
                   AclAccess::read});
  rules.push_back({AclSubject::self, ownEntry, std::string(dir::kAttrUserCertificate),
                   AclAccess::write});
  for (auto subject : {AclSubject::anonymous, AclSubject::authenticated}) {
    rules.push_back({subject, anyEntry, std::string(dir::kAttrUserEncryptedPassword),
                     AclAccess::read});
    rules.push_back({subject, anyEntry, std::string(dir::kAttrUserEncryptedCertificate),
                     AclAccess::read});
    rules.push_back({subject, anyEntry, std::string(dir::kAttrUserCertificate),
                     AclAccess::read});
  }
  return rules;
}

RegistrationRecord CaEngine::registerSubject(const dir::DistinguishedName& subject,
                                             std::optional<crypto::PublicKey> subjectPublicKey,
                                             PopVariant variant, std::int64_t now) {
  RegistrationRecord reg;
  reg.subject = subject;
  reg.subjectPublicKey = std::move(subjectPublicKey);
  reg.variant = variant;
  reg.createdAt = now;
  switch (variant) {
    case PopVariant::fullEncrypted:
      break;
    case PopVariant::halfHalf:
      reg.sharedSecret = renderPassword(16);
      break;
    case PopVariant::sharedSecretOnly:
      reg.sharedSecret = renderPassword(32);
      break;
  }
  reg.validate();

  // The registration request is the one protocol message the CA receives
  // from the end-entity; activation later needs none.
  ++inboundMessages_;
  util::Json inbound;
  inbound["at"] = now;
  inbound["kind"] = "registration";
  inbound["record"] = "inbound-message";
  appendState(inbound);

  util::Json record;
  record["record"] = "registration";
  record["reg"] = reg.toJson();
  appendState(record);
  appendAudit(now, "REGISTER dn=" + subject.render() + " variant=" +
                       std::string(popVariantName(variant)));

  registrations_[subject.normalizedKey()] = reg;
  return reg;
}

crypto::Certificate CaEngine::provisionPopEntry(DirectorySession& session,
                                                const RegistrationRecord& registration,
                                                const PolicyConfig& policy,
                                                std::int64_t now,
                                                std::int64_t validitySeconds) {
  registration.validate();
  if (!registration.subjectPublicKey) {
    throw std::invalid_argument("PoP provisioning needs the subject public key");
  }
  if (policy.activationDeadlineSeconds <= 0) {
    throw std::invalid_argument("activation deadline must be positive");
  }
  bindAdmin(session);

  const auto& subjectPk = *registration.subjectPublicKey;
  const std::int64_t serial = nextSerial();
  crypto::Certificate cert = crypto::issueCertificate(
      *caKey_, caDn_, registration.subject, subjectPk, now, validitySeconds, serial);

  const crypto::EncryptedBlob encCert = crypto::hybridEncrypt(subjectPk, cert.encode());

  dir::DirectoryEntry entry(registration.subject);
  entry.addObjectClass("top");
  entry.addObjectClass("inetOrgPerson");
  entry.addObjectClass(std::string(dir::kClassPkiUserManagement));
  entry.setAttribute("cn", {textValue(registration.subject.rdns().front().value)});
  entry.setAttribute(std::string(dir::kAttrUserEncryptedCertificate),
                     {binaryValue(encCert.encode())});

  std::string bindPassword;
  switch (registration.variant) {
    case PopVariant::fullEncrypted: {
      bindPassword = renderPassword(32);
      entry.setAttribute(
          std::string(dir::kAttrUserEncryptedPassword),
          {binaryValue(
              crypto::hybridEncrypt(subjectPk, util::toBytes(bindPassword)).encode())});
      break;
    }
    case PopVariant::halfHalf: {
      const std::string secondHalf = renderPassword(16);
      bindPassword = *registration.sharedSecret + secondHalf;
      entry.setAttribute(
          std::string(dir::kAttrUserEncryptedPassword),
          {binaryValue(
              crypto::hybridEncrypt(subjectPk, util::toBytes(secondHalf)).encode())});
      break;
    }
    case PopVariant::sharedSecretOnly: {
      bindPassword = *registration.sharedSecret;
      break;
    }
  }
  entry.setAttribute(std::string(dir::kAttrUserPassword),
                     {textValue(dir::hashPassword(util::toBytes(bindPassword)).render())});
  util::secureWipe(bindPassword);

  const ResultCode code = session.add(registration.subject.render(), entry);
  if (code != ResultCode::success) {
    throw DirectoryError(code, "provisioning add failed for " +
                                   registration.subject.render());
  }

  IssuedRecord record;
  record.dn = registration.subject;
  record.serial = serial;
  record.certificate = cert;
  record.provisionedAt = now;
  record.activationDeadline = now + policy.activationDeadlineSeconds;
  record.kind = "pop";
  issued_.push_back(record);

  util::Json j;
  j["cert"] = cert.toJson();
  j["deadline"] = record.activationDeadline;
  j["dn"] = registration.subject.render();
  j["kind"] = "pop";
  j["provisionedAt"] = now;
  j["record"] = "issued";
  appendState(j);
  appendAudit(now, "ISSUE serial=" + std::to_string(serial) +
                       " dn=" + registration.subject.render());
  appendAudit(now, "PROVISION-POP dn=" + registration.subject.render() + " variant=" +
                       std::string(popVariantName(registration.variant)));
  return cert;
}

crypto::Certificate CaEngine::provisionPseEntry(DirectorySession& session,
                                                const dir::DistinguishedName& subject,
                                                const std::string& registrationPassword,
                                                const std::string& psePassword,
                                                std::int64_t now,
                                                std::int64_t validitySeconds) {
  if (registrationPassword.empty() || psePassword.empty()) {
    throw std::invalid_argument("PSE provisioning needs both passwords");
  }
  bindAdmin(session);

  const std::int64_t serial = nextSerial();
  crypto::KeyPair keyPair = crypto::generateKeyPair();
  crypto::Certificate cert = crypto::issueCertificate(
      *caKey_, caDn_, subject, keyPair.publicKey, now, validitySeconds, serial);
  const crypto::PseContainer pse =
      crypto::buildPse(keyPair.privateKey, {cert}, psePassword);

  dir::DirectoryEntry entry(subject);
  entry.addObjectClass("top");
  entry.addObjectClass("inetOrgPerson");
  entry.setAttribute("cn", {textValue(subject.rdns().front().value)});
  entry.setAttribute(std::string(dir::kAttrUserPassword),
                     {textValue(dir::hashPassword(util::toBytes(registrationPassword)).render())});
  entry.setAttribute(std::string(dir::kAttrUserCertificate),
                     {binaryValue(cert.encode())});
  entry.setAttribute(std::string(dir::kAttrUserPkcs12), {binaryValue(pse.encode())});

  const ResultCode code = session.add(subject.render(), entry);
  if (code != ResultCode::success) {
    throw DirectoryError(code, "provisioning add failed for " + subject.render());
  }

  IssuedRecord record;
  record.dn = subject;
  record.serial = serial;
  record.certificate = cert;
  record.provisionedAt = now;
  record.activationDeadline = 0;
  record.kind = "pse";
  issued_.push_back(record);

  util::Json j;
  j["cert"] = cert.toJson();
  j["deadline"] = 0;
  j["dn"] = subject.render();
  j["kind"] = "pse";
  j["provisionedAt"] = now;
  j["record"] = "issued";
  appendState(j);
  appendAudit(now, "ISSUE serial=" + std::to_string(serial) + " dn=" + subject.render());
  appendAudit(now, "PROVISION-PSE dn=" + subject.render() +
                       " serial=" + std::to_string(serial));
  // keyPair goes out of scope here; the private key exists nowhere on the
  // CA side from this point on.
  appendAudit(now, "PSE-KEY-DESTROYED dn=" + subject.render() +
                       " serial=" + std::to_string(serial));
  return cert;
}

std::vector<std::string> CaEngine::enforcePolicy(DirectorySession& session,
                                                 std::int64_t now,
                                                 const PolicyConfig& policy) {
  bindAdmin(session);
  std::vector<std::string> actions;

  for (IssuedRecord& record : issued_) {
    if (record.kind != "pop" || record.expiredDeleted) continue;

    auto [code, entry] = session.search(record.dn.render());
    if (code == ResultCode::noSuchObject) {
      record.expiredDeleted = true;  // gone already; nothing to do
      continue;
    }
    if (code != ResultCode::success || !entry) continue;

    const bool activated = isActivatedEntry(*entry, record);
    if (!activated) {
      if (now > record.activationDeadline) {
        const ResultCode rc = session.remove(record.dn.render());
        if (rc == ResultCode::success || rc == ResultCode::noSuchObject) {
          record.expiredDeleted = true;
          util::Json j;
          j["at"] = now;
          j["dn"] = record.dn.render();
          j["record"] = "expired-deleted";
          appendState(j);
          appendAudit(now, "POLICY-DELETE dn=" + record.dn.render());
          actions.push_back("DELETED " + record.dn.render());
        }
      }
      continue;
    }

    if (policy.deletePasswordAfterActivation && !record.passwordRemoved &&
        entry->hasAttribute(dir::kAttrUserPassword)) {
      const ResultCode rc =
          session.modify(record.dn.render(), std::string(dir::kAttrUserPassword),
                         std::nullopt);
      if (rc == ResultCode::success) {
        record.passwordRemoved = true;
        util::Json j;
        j["at"] = now;
        j["dn"] = record.dn.render();
        j["record"] = "password-removed";
        appendState(j);
        appendAudit(now, "POLICY-PASSWORD-REMOVED dn=" + record.dn.render());
        actions.push_back("PASSWORD-REMOVED " + record.dn.render());
      }
    }
  }
  return actions;
}

bool CaEngine::verifyActivation(DirectorySession& session,
                                const dir::DistinguishedName& dn) {
  bindAdmin(session);
  auto [code, entry] = session.search(dn.render());
  if (code == ResultCode::noSuchObject) {
    throw DirectoryError(ResultCode::noSuchObject, "no such entry: " + dn.render());
  }
  if (code != ResultCode::success || !entry) {
    throw DirectoryError(code, "cannot read entry: " + dn.render());
  }
  const IssuedRecord* record = issuedRecordFor(dn);
  if (record == nullptr) return false;
  return isActivatedEntry(*entry, *record);
}

bool CaEngine::isActivatedEntry(const dir::DirectoryEntry& entry,
                                const IssuedRecord& record) const {
  const auto* values = entry.attribute(dir::kAttrUserCertificate);
  if (values == nullptr || values->empty()) return false;
  crypto::Certificate written;
  try {
    written = crypto::Certificate::decode(values->front().octets());
  } catch (const crypto::CryptoError&) {
    return false;
  }
  if (!crypto::verifyCertificateSignature(caKey_->publicKey(), written)) return false;
  return written.subjectPublicKey == record.certificate.subjectPublicKey;
}

const IssuedRecord* CaEngine::issuedRecordFor(const dir::DistinguishedName& dn) const {
  const std::string key = dn.normalizedKey();
  for (const auto& record : issued_) {
    if (record.dn.normalizedKey() == key) return &record;
  }
  return nullptr;
}

std::optional<RegistrationRecord> CaEngine::registrationFor(
    const dir::DistinguishedName& dn) const {
  auto it = registrations_.find(dn.normalizedKey());
  if (it == registrations_.end()) return std::nullopt;
  return it->second;
}

IssuedRecord* CaEngine::findIssued(const dir::DistinguishedName& dn) {
  const std::string key = dn.normalizedKey();
  for (auto& record : issued_) {
    if (record.dn.normalizedKey() == key) return &record;
  }
  return nullptr;
}

std::int64_t CaEngine::nextSerial() const {
  std::int64_t maxSerial = 0;
  for (const auto& record : issued_) maxSerial = std::max(maxSerial, record.serial);
  return maxSerial + 1;
}

void CaEngine::bindAdmin(DirectorySession& session) const {
  const ResultCode code =
      session.bind(config_.adminDn, util::toBytes(config_.adminPassword));
  if (code != ResultCode::success) {
    throw DirectoryError(code, "CA directory bind failed");
  }
}

void CaEngine::appendState(const util::Json& record) {
  std::ofstream out(config_.statePath, std::ios::binary | std::ios::app);
  if (!out) {
    throw std::runtime_error("cannot append CA state: " + config_.statePath.string());
  }
  out << util::canonicalDump(record) << '\n';
}

void CaEngine::appendAudit(std::int64_t at, const std::string& line) {
  std::ofstream out(config_.auditPath, std::ios::binary | std::ios::app);
  if (!out) {
    throw std::runtime_error("cannot append audit log: " + config_.auditPath.string());
  }
  out << at << ' ' << line << '\n';
}

void configureAcls(dir::Directory& directory) {
  directory.setAclRules(CaEngine::standardAclRules());
}

}  // namespace pkidir::ca
