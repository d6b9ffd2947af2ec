#pragma once

#include <stdexcept>
#include <string>

namespace pkidir::crypto {

class CryptoError : public std::runtime_error {
 public:
  enum class Kind { decryptFailed, wrongPassword, malformed, internal };

  CryptoError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

[[noreturn]] void throwOpenSslError(const std::string& context);

}  // namespace pkidir::crypto
