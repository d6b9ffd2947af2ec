#include "pkidir/agent/agent.hpp"

#include "pkidir/crypto/hybrid.hpp"
#include "pkidir/crypto/pse.hpp"
#include "pkidir/directory/attributes.hpp"
#include "pkidir/util/bytes.hpp"

namespace pkidir::agent {

namespace {

AgentErrorKind kindForBindCode(ResultCode code) {
  switch (code) {
    case ResultCode::confidentialityRequired:
      return AgentErrorKind::confidentialityRequired;
    case ResultCode::invalidCredentials:
    case ResultCode::unwillingToPerform:
      return AgentErrorKind::invalidCredentials;
    default:
      return AgentErrorKind::protocolError;
  }
}

const util::Bytes& singleValue(const dir::DirectoryEntry& entry,
                               std::string_view attribute) {
  const auto* values = entry.attribute(attribute);
  if (values == nullptr || values->empty()) {
    throw AgentError(AgentErrorKind::protocolError,
                     "entry lacks attribute " + std::string(attribute));
  }
  return values->front().octets();
}

util::Bytes decryptBlob(const crypto::PrivateKey& key, const util::Bytes& encoded,
                        std::string_view what) {
  try {
    const crypto::EncryptedBlob blob = crypto::EncryptedBlob::decode(encoded);
    return crypto::hybridDecrypt(key, blob);
  } catch (const crypto::CryptoError&) {
    throw AgentError(AgentErrorKind::decryptFailed,
                     "cannot decrypt " + std::string(what));
  }
}

}  // namespace

const char* agentErrorToken(AgentErrorKind kind) {
  switch (kind) {
    case AgentErrorKind::decryptFailed: return "DECRYPT_FAILED";
    case AgentErrorKind::invalidCredentials: return "INVALID_CREDENTIALS";
    case AgentErrorKind::confidentialityRequired: return "CONFIDENTIALITY_REQUIRED";
    case AgentErrorKind::accessDenied: return "ACCESS_DENIED";
    case AgentErrorKind::noSuchObject: return "NO_SUCH_OBJECT";
    case AgentErrorKind::wrongPassword: return "WRONG_PASSWORD";
    case AgentErrorKind::protocolError: return "PROTOCOL_ERROR";
  }
  return "PROTOCOL_ERROR";
}

void ActivationInput::validate() const {
  if (dn.empty()) throw std::invalid_argument("activation input without DN");
  const bool needsSecret = variant != ca::PopVariant::fullEncrypted;
  if (needsSecret && (!sharedSecret || sharedSecret->empty())) {
    throw std::invalid_argument("variant requires the registration shared secret");
  }
  if (!needsSecret && sharedSecret) {
    throw std::invalid_argument("fullEncrypted takes no shared secret");
  }
}

crypto::Certificate completePop(DirectorySession& session, const ActivationInput& input) {
  input.validate();
  const std::string dnText = input.dn.render();

  auto [searchCode, entry] = session.search(dnText);
  if (searchCode == ResultCode::noSuchObject) {
    throw AgentError(AgentErrorKind::noSuchObject, "no entry at " + dnText);
  }
  if (searchCode != ResultCode::success || !entry) {
    throw AgentError(AgentErrorKind::protocolError, "search failed");
  }

  // Everything secret is recovered locally before any authentication, so a
  // failure here never touches the directory.
  std::string bindPassword;
  switch (input.variant) {
    case ca::PopVariant::fullEncrypted: {
      util::Bytes pw = decryptBlob(
          input.privateKey, singleValue(*entry, dir::kAttrUserEncryptedPassword),
          dir::kAttrUserEncryptedPassword);
      bindPassword = util::toString(pw);
      util::secureWipe(pw);
      break;
    }
    case ca::PopVariant::halfHalf: {
      util::Bytes half = decryptBlob(
          input.privateKey, singleValue(*entry, dir::kAttrUserEncryptedPassword),
          dir::kAttrUserEncryptedPassword);
      bindPassword = *input.sharedSecret + util::toString(half);
      util::secureWipe(half);
      break;
    }
    case ca::PopVariant::sharedSecretOnly: {
      bindPassword = *input.sharedSecret;
      break;
    }
  }

  util::Bytes certBytes = decryptBlob(
      input.privateKey, singleValue(*entry, dir::kAttrUserEncryptedCertificate),
      dir::kAttrUserEncryptedCertificate);
  crypto::Certificate certificate;
  try {
    certificate = crypto::Certificate::decode(certBytes);
  } catch (const crypto::CryptoError&) {
    util::secureWipe(bindPassword);
    throw AgentError(AgentErrorKind::decryptFailed,
                     "decrypted certificate does not parse");
  }

  const ResultCode bindCode = session.bind(dnText, util::toBytes(bindPassword));
  util::secureWipe(bindPassword);
  if (bindCode != ResultCode::success) {
    throw AgentError(kindForBindCode(bindCode), "authenticated bind failed");
  }

  const ResultCode writeCode =
      session.modify(dnText, std::string(dir::kAttrUserCertificate),
                     dir::AttributeValue::binary(certBytes));
  if (writeCode == ResultCode::insufficientAccessRights) {
    throw AgentError(AgentErrorKind::accessDenied, "certificate write denied");
  }
  if (writeCode != ResultCode::success) {
    throw AgentError(AgentErrorKind::protocolError, "certificate write failed");
  }
  return certificate;
}

PseBundle downloadPse(DirectorySession& session, const std::string& dnText,
                      const std::string& registrationPassword,
                      const std::string& psePassword) {
  const ResultCode bindCode = session.bind(dnText, util::toBytes(registrationPassword));
  if (bindCode != ResultCode::success) {
    throw AgentError(kindForBindCode(bindCode), "directory bind failed");
  }

  auto [searchCode, entry] = session.search(dnText);
  if (searchCode == ResultCode::noSuchObject) {
    throw AgentError(AgentErrorKind::noSuchObject, "no entry at " + dnText);
  }
  if (searchCode != ResultCode::success || !entry) {
    throw AgentError(AgentErrorKind::protocolError, "search failed");
  }
  const auto* values = entry->attribute(dir::kAttrUserPkcs12);
  if (values == nullptr || values->empty()) {
    throw AgentError(AgentErrorKind::accessDenied,
                     std::string(dir::kAttrUserPkcs12) + " is not readable here");
  }

  crypto::PseContainer container;
  try {
    container = crypto::PseContainer::decode(values->front().octets());
  } catch (const crypto::CryptoError&) {
    throw AgentError(AgentErrorKind::protocolError, "stored PSE container is malformed");
  }
  try {
    crypto::PseContents contents = crypto::openPse(container, psePassword);
    return PseBundle{std::move(contents.privateKey), std::move(contents.certificates)};
  } catch (const crypto::CryptoError& e) {
    if (e.kind() == crypto::CryptoError::Kind::wrongPassword) {
      throw AgentError(AgentErrorKind::wrongPassword, "PSE password rejected");
    }
    throw AgentError(AgentErrorKind::protocolError, "PSE container cannot be opened");
  }
}

}  // namespace pkidir::agent
