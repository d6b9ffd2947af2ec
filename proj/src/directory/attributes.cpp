#include "pkidir/directory/attributes.hpp"

#include <array>
#include <stdexcept>

#include "pkidir/result.hpp"

namespace pkidir::dir {

AttributeValue AttributeValue::text(std::string utf8) {
  if (!util::isValidUtf8(utf8)) {
    throw std::invalid_argument("text attribute value is not valid UTF-8");
  }
  return AttributeValue(ValueKind::text, util::toBytes(utf8));
}

AttributeValue AttributeValue::binary(util::Bytes octets) {
  return AttributeValue(ValueKind::binary, std::move(octets));
}

std::string AttributeValue::asText() const {
  if (kind_ != ValueKind::text) {
    throw std::logic_error("attribute value is binary");
  }
  return util::toString(octets_);
}

util::Json AttributeValue::toJson() const {
  util::Json j;
  if (kind_ == ValueKind::text) {
    j["data"] = util::toString(octets_);
    j["kind"] = "text";
  } else {
    j["data"] = util::base64Encode(octets_);
    j["kind"] = "binary";
  }
  return j;
}

AttributeValue AttributeValue::fromJson(const util::Json& j) {
  util::requireKeys(j, {"data", "kind"});
  const std::string kind = util::getString(j, "kind");
  if (kind == "text") {
    return AttributeValue::text(util::getString(j, "data"));
  }
  if (kind == "binary") {
    return AttributeValue::binary(util::getBase64(j, "data"));
  }
  throw std::invalid_argument("unknown attribute value kind: " + kind);
}

bool operator==(const AttributeValue& a, const AttributeValue& b) {
  return a.kind() == b.kind() && a.octets() == b.octets();
}

bool isSingleValued(std::string_view attributeName) {
  static constexpr std::array<std::string_view, 4> kSingle = {
      kAttrUserEncryptedPassword,
      kAttrUserEncryptedCertificate,
      kAttrUserPassword,
      kAttrUserPkcs12,
  };
  for (auto name : kSingle) {
    if (equalsIgnoreCase(name, attributeName)) return true;
  }
  return false;
}

bool requiresPkiUserManagement(std::string_view attributeName) {
  return equalsIgnoreCase(attributeName, kAttrUserEncryptedPassword) ||
         equalsIgnoreCase(attributeName, kAttrUserEncryptedCertificate);
}

void DirectoryEntry::addObjectClass(std::string name) {
  std::string folded = foldCase(name);
  objectClasses_.emplace(std::move(folded), std::move(name));
}

bool DirectoryEntry::hasObjectClass(std::string_view name) const {
  return objectClasses_.count(foldCase(name)) > 0;
}

std::vector<std::string> DirectoryEntry::objectClasses() const {
  std::vector<std::string> out;
  out.reserve(objectClasses_.size());
  for (const auto& [folded, original] : objectClasses_) out.push_back(original);
  return out;
}

void DirectoryEntry::setAttribute(std::string name, std::vector<AttributeValue> values) {
  std::string folded = foldCase(name);
  auto it = attributes_.find(folded);
  if (it == attributes_.end()) {
    attributes_.emplace(std::move(folded), Attr{std::move(name), std::move(values)});
  } else {
    it->second.values = std::move(values);
  }
}

bool DirectoryEntry::removeAttribute(std::string_view name) {
  return attributes_.erase(foldCase(name)) > 0;
}

const std::vector<AttributeValue>* DirectoryEntry::attribute(std::string_view name) const {
  auto it = attributes_.find(foldCase(name));
  if (it == attributes_.end()) return nullptr;
  return &it->second.values;
}

bool DirectoryEntry::hasAttribute(std::string_view name) const {
  return attributes_.count(foldCase(std::string(name))) > 0;
}

std::vector<std::string> DirectoryEntry::attributeNames() const {
  std::vector<std::string> out;
  out.reserve(attributes_.size());
  for (const auto& [folded, attr] : attributes_) out.push_back(attr.name);
  return out;
}

void DirectoryEntry::validateSchema() const {
  if (dn_.empty()) {
    throw DirectoryError(ResultCode::schemaViolation, "entry has no DN");
  }
  for (const auto& [folded, attr] : attributes_) {
    if (attr.values.empty()) {
      throw DirectoryError(ResultCode::schemaViolation,
                           "attribute without values: " + attr.name);
    }
    if (attr.values.size() > 1 && isSingleValued(attr.name)) {
      throw DirectoryError(ResultCode::schemaViolation,
                           "SINGLE-VALUE attribute holds several values: " + attr.name);
    }
    if (requiresPkiUserManagement(attr.name) &&
        !hasObjectClass(kClassPkiUserManagement)) {
      throw DirectoryError(ResultCode::schemaViolation,
                           attr.name + " requires object class " +
                               std::string(kClassPkiUserManagement));
    }
  }
}

util::Json DirectoryEntry::toJson() const {
  util::Json attrs = util::Json::object();
  for (const auto& [folded, attr] : attributes_) {
    util::Json values = util::Json::array();
    for (const auto& v : attr.values) values.push_back(v.toJson());
    attrs[attr.name] = std::move(values);
  }
  util::Json classes = util::Json::array();
  for (const auto& name : objectClasses()) classes.push_back(name);

  util::Json j;
  j["attributes"] = std::move(attrs);
  j["dn"] = dn_.render();
  j["objectClasses"] = std::move(classes);
  return j;
}

DirectoryEntry DirectoryEntry::fromJson(const util::Json& j) {
  util::requireKeys(j, {"attributes", "dn", "objectClasses"});
  DirectoryEntry entry(DistinguishedName::parse(util::getString(j, "dn")));
  for (const auto& cls : util::getArray(j, "objectClasses")) {
    if (!cls.is_string()) throw std::invalid_argument("objectClass is not a string");
    entry.addObjectClass(cls.get<std::string>());
  }
  for (const auto& [name, values] : util::getObject(j, "attributes").items()) {
    if (!values.is_array() || values.empty()) {
      throw std::invalid_argument("attribute values must be a non-empty array");
    }
    std::vector<AttributeValue> parsed;
    parsed.reserve(values.size());
    for (const auto& v : values) parsed.push_back(AttributeValue::fromJson(v));
    entry.setAttribute(name, std::move(parsed));
  }
  return entry;
}

std::string DirectoryEntry::canonicalBytes() const {
  return util::canonicalDump(toJson());
}

bool operator==(const DirectoryEntry& a, const DirectoryEntry& b) {
  return a.canonicalBytes() == b.canonicalBytes();
}

}  // namespace pkidir::dir
