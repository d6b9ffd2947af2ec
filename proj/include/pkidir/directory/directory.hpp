#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "pkidir/directory/acl.hpp"
#include "pkidir/directory/attributes.hpp"
#include "pkidir/directory/dn.hpp"
#include "pkidir/result.hpp"
#include "pkidir/util/bytes.hpp"

namespace pkidir::dir {

/// Per-connection authentication state produced by simpleBind.
struct BindState {
  std::optional<DistinguishedName> boundDn;  // nullopt = anonymous
  bool isAdmin = false;
  bool channelSecure = false;

  RequesterContext requester() const { return {boundDn, isAdmin}; }
};

/// The configured out-of-band superuser; not a directory entry.
struct AdminIdentity {
  DistinguishedName dn;
  std::string passwordHash;  // rendered {SSHA256} form
};

/// In-memory directory with a flat namespace keyed by normalized DN,
/// per-attribute ACL enforcement and simple-bind authentication. All
/// mutations are serialized through a single writer gate; reads see the
/// latest committed mutation.
class Directory {
 public:
  explicit Directory(AdminIdentity admin);

  void setAclRules(std::vector<AclRule> rules);
  std::vector<AclRule> aclRules() const;

  const AdminIdentity& admin() const { return admin_; }

  /// Mirror every committed mutation to this snapshot file. Loads the file
  /// first when it already exists.
  void setPersistPath(std::filesystem::path path);

  void addEntry(const DistinguishedName& dn, const DirectoryEntry& entry,
                const BindState& requester);
  DirectoryEntry searchEntry(const DistinguishedName& dn,
                             const BindState& requester) const;
  void modifyAttribute(const DistinguishedName& dn, std::string_view attrName,
                       const std::optional<AttributeValue>& valueOrDelete,
                       const BindState& requester);
  void deleteEntry(const DistinguishedName& dn, const BindState& requester);

  /// dnText "" with an empty password is the anonymous bind. A non-empty
  /// password on an insecure channel fails with confidentialityRequired
  /// before credentials are looked at.
  BindState simpleBind(std::string_view dnText, const util::Bytes& password,
                       bool channelSecure) const;

  void exportSnapshot(std::ostream& out) const;
  void exportSnapshot(const std::filesystem::path& path) const;
  /// Replaces the directory contents. Throws std::invalid_argument on a
  /// malformed snapshot (bad JSON, duplicate DN, schema violation).
  void importSnapshot(std::istream& in);
  void importSnapshot(const std::filesystem::path& path);

  std::size_t entryCount() const;

 private:
  void persistLocked() const;
  std::string snapshotTextLocked() const;
  void importSnapshotText(const std::string& text);

  mutable std::shared_mutex gate_;
  AdminIdentity admin_;
  AclPolicy acl_;
  std::map<std::string, DirectoryEntry> entries_;  // normalizedKey -> entry
  std::optional<std::filesystem::path> persistPath_;
};

}  // namespace pkidir::dir
