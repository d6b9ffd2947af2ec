#include "pkidir/directory/directory.hpp"

#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "pkidir/directory/password.hpp"

namespace pkidir::dir {

Directory::Directory(AdminIdentity admin) : admin_(std::move(admin)) {}

void Directory::setAclRules(std::vector<AclRule> rules) {
  std::unique_lock lock(gate_);
  acl_.setRules(std::move(rules));
}

std::vector<AclRule> Directory::aclRules() const {
  std::shared_lock lock(gate_);
  return acl_.rules();
}

void Directory::setPersistPath(std::filesystem::path path) {
  std::unique_lock lock(gate_);
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    importSnapshotText(buf.str());
  }
  persistPath_ = std::move(path);
  persistLocked();
}

void Directory::addEntry(const DistinguishedName& dn, const DirectoryEntry& entry,
                         const BindState& requester) {
  if (dn.empty() || dn != entry.dn()) {
    throw DirectoryError(ResultCode::schemaViolation, "entry DN mismatch");
  }
  std::unique_lock lock(gate_);
  if (!acl_.allowsEntryWrite(requester.requester(), dn)) {
    throw DirectoryError(ResultCode::insufficientAccessRights,
                         "no write access to " + dn.render());
  }
  const std::string key = dn.normalizedKey();
  if (entries_.count(key) > 0) {
    throw DirectoryError(ResultCode::entryAlreadyExists,
                         "entry already exists: " + dn.render());
  }
  entry.validateSchema();
  entries_.emplace(key, entry);
  persistLocked();
}

DirectoryEntry Directory::searchEntry(const DistinguishedName& dn,
                                      const BindState& requester) const {
  std::shared_lock lock(gate_);
  auto it = entries_.find(dn.normalizedKey());
  if (it == entries_.end()) {
    throw DirectoryError(ResultCode::noSuchObject, "no such entry: " + dn.render());
  }
  const DirectoryEntry& stored = it->second;
  const RequesterContext who = requester.requester();

  DirectoryEntry filtered(stored.dn());
  for (const auto& cls : stored.objectClasses()) filtered.addObjectClass(cls);
  for (const auto& name : stored.attributeNames()) {
    if (acl_.allows(who, stored.dn(), name, AclAccess::read)) {
      filtered.setAttribute(name, *stored.attribute(name));
    }
  }
  return filtered;
}

void Directory::modifyAttribute(const DistinguishedName& dn, std::string_view attrName,
                                const std::optional<AttributeValue>& valueOrDelete,
                                const BindState& requester) {
  std::unique_lock lock(gate_);
  auto it = entries_.find(dn.normalizedKey());
  if (it == entries_.end()) {
    throw DirectoryError(ResultCode::noSuchObject, "no such entry: " + dn.render());
  }
  if (!acl_.allows(requester.requester(), it->second.dn(), attrName, AclAccess::write)) {
    throw DirectoryError(ResultCode::insufficientAccessRights,
                         "no write access to attribute " + std::string(attrName));
  }
  if (equalsIgnoreCase(attrName, "objectClass")) {
    throw DirectoryError(ResultCode::schemaViolation,
                         "objectClass is not modifiable");
  }

  DirectoryEntry updated = it->second;
  if (valueOrDelete.has_value()) {
    updated.setAttribute(std::string(attrName), {*valueOrDelete});
  } else {
    updated.removeAttribute(attrName);
  }
  updated.validateSchema();  // throws schemaViolation, entry untouched
  it->second = std::move(updated);
  persistLocked();
}

void Directory::deleteEntry(const DistinguishedName& dn, const BindState& requester) {
  std::unique_lock lock(gate_);
  auto it = entries_.find(dn.normalizedKey());
  if (it == entries_.end()) {
    throw DirectoryError(ResultCode::noSuchObject, "no such entry: " + dn.render());
  }
  if (!acl_.allowsEntryWrite(requester.requester(), dn)) {
    throw DirectoryError(ResultCode::insufficientAccessRights,
                         "no delete access to " + dn.render());
  }
  entries_.erase(it);
  persistLocked();
}

BindState Directory::simpleBind(std::string_view dnText, const util::Bytes& password,
                                bool channelSecure) const {
  if (dnText.empty() && password.empty()) {
    return BindState{std::nullopt, false, channelSecure};
  }
  if (!password.empty() && !channelSecure) {
    throw DirectoryError(ResultCode::confidentialityRequired,
                         "refusing plaintext password on an insecure channel");
  }
  auto dn = DistinguishedName::tryParse(dnText);
  if (!dn) {
    throw DirectoryError(ResultCode::invalidCredentials, "unknown bind DN");
  }
  if (password.empty()) {
    // Named DN without a password: refuse the unauthenticated bind.
    throw DirectoryError(ResultCode::unwillingToPerform,
                         "unauthenticated bind not allowed");
  }

  if (dn->normalizedKey() == admin_.dn.normalizedKey()) {
    if (!verifyPassword(password, admin_.passwordHash)) {
      throw DirectoryError(ResultCode::invalidCredentials, "invalid credentials");
    }
    return BindState{*dn, true, channelSecure};
  }

  std::shared_lock lock(gate_);
  auto it = entries_.find(dn->normalizedKey());
  if (it == entries_.end()) {
    throw DirectoryError(ResultCode::invalidCredentials, "invalid credentials");
  }
  const auto* values = it->second.attribute(kAttrUserPassword);
  if (values == nullptr || values->empty()) {
    throw DirectoryError(ResultCode::invalidCredentials, "invalid credentials");
  }
  const std::string rendered = util::toString(values->front().octets());
  if (!verifyPassword(password, rendered)) {
    throw DirectoryError(ResultCode::invalidCredentials, "invalid credentials");
  }
  return BindState{*dn, false, channelSecure};
}

std::string Directory::snapshotTextLocked() const {
  std::string out;
  for (const auto& [key, entry] : entries_) {
    out += entry.canonicalBytes();
    out += '\n';
  }
  return out;
}

void Directory::exportSnapshot(std::ostream& out) const {
  std::shared_lock lock(gate_);
  out << snapshotTextLocked();
}

void Directory::exportSnapshot(const std::filesystem::path& path) const {
  std::shared_lock lock(gate_);
  const std::string text = snapshotTextLocked();
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write snapshot: " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void Directory::importSnapshotText(const std::string& text) {
  std::map<std::string, DirectoryEntry> loaded;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    DirectoryEntry entry = DirectoryEntry::fromJson(util::parseJson(line));
    try {
      entry.validateSchema();
    } catch (const DirectoryError& e) {
      throw std::invalid_argument(std::string("snapshot entry rejected: ") + e.what());
    }
    const std::string key = entry.dn().normalizedKey();
    if (!loaded.emplace(key, std::move(entry)).second) {
      throw std::invalid_argument("duplicate DN in snapshot: " + key);
    }
  }
  entries_ = std::move(loaded);
}

void Directory::importSnapshot(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  std::unique_lock lock(gate_);
  importSnapshotText(buf.str());
  persistLocked();
}

void Directory::importSnapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path.string());
  importSnapshot(in);
}

std::size_t Directory::entryCount() const {
  std::shared_lock lock(gate_);
  return entries_.size();
}

void Directory::persistLocked() const {
  if (!persistPath_) return;
  const std::string text = snapshotTextLocked();
  const std::filesystem::path tmp = persistPath_->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write snapshot: " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, *persistPath_);
}

}  // namespace pkidir::dir
