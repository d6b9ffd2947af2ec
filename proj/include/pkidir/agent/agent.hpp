#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pkidir/ca/workflow.hpp"
#include "pkidir/crypto/certificate.hpp"
#include "pkidir/crypto/keys.hpp"
#include "pkidir/directory/dn.hpp"
#include "pkidir/session.hpp"

namespace pkidir::agent {

enum class AgentErrorKind {
  decryptFailed,
  invalidCredentials,
  confidentialityRequired,
  accessDenied,
  noSuchObject,
  wrongPassword,
  protocolError,
};

/// Stable error token for scripting (DECRYPT_FAILED, INVALID_CREDENTIALS, ...).
const char* agentErrorToken(AgentErrorKind kind);

class AgentError : public std::runtime_error {
 public:
  AgentError(AgentErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  AgentErrorKind kind() const noexcept { return kind_; }

 private:
  AgentErrorKind kind_;
};

struct ActivationInput {
  dir::DistinguishedName dn;
  crypto::PrivateKey privateKey;
  ca::PopVariant variant = ca::PopVariant::fullEncrypted;
  std::optional<std::string> sharedSecret;

  /// sharedSecret present iff variant != fullEncrypted. Throws
  /// std::invalid_argument.
  void validate() const;
};

/// The single-round-trip PoP completion: anonymous fetch, local decryption
/// of password and certificate, authenticated write of the decrypted
/// certificate into the own entry. Decryption happens strictly before the
/// bind, so a key-less caller never attempts authentication and leaves the
/// directory untouched. Sends nothing to the CA.
crypto::Certificate completePop(DirectorySession& session, const ActivationInput& input);

struct PseBundle {
  crypto::PrivateKey privateKey;
  std::vector<crypto::Certificate> certificates;
};

/// Authenticated download of the own userPKCS12 value, opened locally with
/// the PSE password.
PseBundle downloadPse(DirectorySession& session, const std::string& dnText,
                      const std::string& registrationPassword,
                      const std::string& psePassword);

}  // namespace pkidir::agent
