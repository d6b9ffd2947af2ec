#pragma once

// Independent decision table for the directory access policy. Hand-written
// from the policy statement, deliberately not derived from the ACL engine:
//   anonymous      read  userEncryptedPassword, userEncryptedCertificate,
//                        userCertificate
//   self           the anonymous reads + read userPKCS12 + write
//                        userCertificate
//   other (bound)  same as anonymous
//   admin          read and write everything
//   anything else  denied

#include <string_view>

namespace testsupport {

enum class OracleSubject { anonymous, self, other, admin };

inline constexpr std::string_view kSchemeAttributes[] = {
    "userPassword",          "userCertificate",        "userEncryptedPassword",
    "userEncryptedCertificate", "userPKCS12",
};

inline bool oracleAllowsRead(OracleSubject subject, std::string_view attribute) {
  switch (subject) {
    case OracleSubject::admin:
      return true;
    case OracleSubject::self:
      if (attribute == "userPKCS12") return true;
      [[fallthrough]];
    case OracleSubject::anonymous:
    case OracleSubject::other:
      return attribute == "userEncryptedPassword" ||
             attribute == "userEncryptedCertificate" ||
             attribute == "userCertificate";
  }
  return false;
}

inline bool oracleAllowsWrite(OracleSubject subject, std::string_view attribute) {
  switch (subject) {
    case OracleSubject::admin:
      return true;
    case OracleSubject::self:
      return attribute == "userCertificate";
    case OracleSubject::anonymous:
    case OracleSubject::other:
      return false;
  }
  return false;
}

}  // namespace testsupport
