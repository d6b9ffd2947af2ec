#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkidir/directory/dn.hpp"
#include "pkidir/util/bytes.hpp"
#include "pkidir/util/json.hpp"

namespace pkidir::dir {

enum class ValueKind { text, binary };

/// An octet string tagged as text (valid UTF-8) or binary (arbitrary octets,
/// octet-string syntax 1.3.6.1.4.1.1466.115.121.1.40).
class AttributeValue {
 public:
  /// Throws std::invalid_argument on invalid UTF-8.
  static AttributeValue text(std::string utf8);
  static AttributeValue binary(util::Bytes octets);

  ValueKind kind() const { return kind_; }
  const util::Bytes& octets() const { return octets_; }
  std::string asText() const;

  util::Json toJson() const;
  static AttributeValue fromJson(const util::Json& j);

 private:
  AttributeValue(ValueKind kind, util::Bytes octets)
      : kind_(kind), octets_(std::move(octets)) {}

  ValueKind kind_;
  util::Bytes octets_;
};

bool operator==(const AttributeValue& a, const AttributeValue& b);

// Schema constants. The two encrypted attributes and the auxiliary object
// class carry the OIDs they are registered under; the rest are the standard
// directory attributes the schemes touch.
inline constexpr std::string_view kClassPkiUserManagement = "pkiUserManagement";
inline constexpr std::string_view kOidPkiUserManagement = "1.3.6.1.4.1.8301.3.2.2.1.6";

inline constexpr std::string_view kAttrUserPassword = "userPassword";
inline constexpr std::string_view kAttrUserCertificate = "userCertificate";
inline constexpr std::string_view kAttrUserEncryptedPassword = "userEncryptedPassword";
inline constexpr std::string_view kOidUserEncryptedPassword = "1.3.6.1.4.1.8301.3.2.2.1.7";
inline constexpr std::string_view kAttrUserEncryptedCertificate = "userEncryptedCertificate";
inline constexpr std::string_view kOidUserEncryptedCertificate = "1.3.6.1.4.1.8301.3.2.2.1.8";
inline constexpr std::string_view kAttrUserPkcs12 = "userPKCS12";

/// Attributes declared SINGLE-VALUE: at most one value per entry.
bool isSingleValued(std::string_view attributeName);

/// Attributes that require the pkiUserManagement object class on the entry.
bool requiresPkiUserManagement(std::string_view attributeName);

/// A named entry: DN, object classes, and an attribute map. Attribute and
/// object-class names match case-insensitively; the casing first written is
/// preserved for rendering.
class DirectoryEntry {
 public:
  DirectoryEntry() = default;
  explicit DirectoryEntry(DistinguishedName dn) : dn_(std::move(dn)) {}

  const DistinguishedName& dn() const { return dn_; }
  void setDn(DistinguishedName dn) { dn_ = std::move(dn); }

  void addObjectClass(std::string name);
  bool hasObjectClass(std::string_view name) const;
  std::vector<std::string> objectClasses() const;

  void setAttribute(std::string name, std::vector<AttributeValue> values);
  bool removeAttribute(std::string_view name);
  const std::vector<AttributeValue>* attribute(std::string_view name) const;
  bool hasAttribute(std::string_view name) const;
  std::vector<std::string> attributeNames() const;

  /// Throws DirectoryError(schemaViolation) when a SINGLE-VALUE attribute
  /// holds more than one value, when an encrypted attribute is present
  /// without the pkiUserManagement object class, or when the DN is empty.
  void validateSchema() const;

  util::Json toJson() const;
  static DirectoryEntry fromJson(const util::Json& j);

  /// Canonical serialized form; byte-equality is entry equality.
  std::string canonicalBytes() const;

 private:
  struct Attr {
    std::string name;  // casing as first written
    std::vector<AttributeValue> values;
  };

  DistinguishedName dn_;
  std::map<std::string, std::string> objectClasses_;  // folded -> original
  std::map<std::string, Attr> attributes_;            // folded -> attr
};

bool operator==(const DirectoryEntry& a, const DirectoryEntry& b);

}  // namespace pkidir::dir
