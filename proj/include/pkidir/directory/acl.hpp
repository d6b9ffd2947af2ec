#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkidir/directory/dn.hpp"

namespace pkidir::dir {

/// Who a rule applies to, relative to the target entry.
enum class AclSubject { anonymous, self, authenticated, admin };

/// Which entries a rule covers. subtree with no base covers the whole tree.
enum class AclTargetKind { exactDn, subtree, ownEntry };

enum class AclAccess { none, read, write };  // write implies read

struct AclTarget {
  AclTargetKind kind = AclTargetKind::subtree;
  std::optional<DistinguishedName> base;  // required for exactDn
};

struct AclRule {
  AclSubject subject;
  AclTarget target;
  std::string attribute;  // attribute name, or "*" for every attribute
  AclAccess access;
};

/// The requesting identity as the ACL engine sees it.
struct RequesterContext {
  std::optional<DistinguishedName> boundDn;  // nullopt = anonymous
  bool isAdmin = false;
};

/// Ordered first-match-wins rule list; no matching rule means deny.
class AclPolicy {
 public:
  AclPolicy() = default;
  explicit AclPolicy(std::vector<AclRule> rules) : rules_(std::move(rules)) {}

  void setRules(std::vector<AclRule> rules) { rules_ = std::move(rules); }
  const std::vector<AclRule>& rules() const { return rules_; }

  bool allows(const RequesterContext& who, const DistinguishedName& target,
              std::string_view attribute, AclAccess wanted) const;

  /// Entry-level operations (add, delete) need a write grant that covers
  /// every attribute, i.e. an `*` rule.
  bool allowsEntryWrite(const RequesterContext& who,
                        const DistinguishedName& target) const;

 private:
  std::vector<AclRule> rules_;
};

}  // namespace pkidir::dir
