#pragma once

#include <stdexcept>
#include <string>

namespace pkidir {

/// LDAP result codes used on the wire and by directory operations.
enum class ResultCode : int {
  success = 0,
  protocolError = 2,
  confidentialityRequired = 13,
  noSuchObject = 32,
  invalidCredentials = 49,
  insufficientAccessRights = 50,
  unwillingToPerform = 53,
  schemaViolation = 65,
  entryAlreadyExists = 68,
};

const char* resultCodeName(ResultCode code);
bool isKnownResultCode(int code);

class DirectoryError : public std::runtime_error {
 public:
  DirectoryError(ResultCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ResultCode code() const noexcept { return code_; }

 private:
  ResultCode code_;
};

}  // namespace pkidir
