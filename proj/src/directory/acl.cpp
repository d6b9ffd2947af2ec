#include "pkidir/directory/acl.hpp"

namespace pkidir::dir {

namespace {

bool subjectMatches(AclSubject subject, const RequesterContext& who,
                    const DistinguishedName& target) {
  switch (subject) {
    case AclSubject::anonymous:
      return !who.boundDn.has_value();
    case AclSubject::self:
      return who.boundDn.has_value() && *who.boundDn == target;
    case AclSubject::authenticated:
      return who.boundDn.has_value();
    case AclSubject::admin:
      return who.isAdmin;
  }
  return false;
}

bool targetMatches(const AclTarget& target, const RequesterContext& who,
                   const DistinguishedName& entryDn) {
  switch (target.kind) {
    case AclTargetKind::exactDn:
      return target.base.has_value() && entryDn == *target.base;
    case AclTargetKind::subtree:
      return !target.base.has_value() || isWithinSubtree(entryDn, *target.base);
    case AclTargetKind::ownEntry:
      return who.boundDn.has_value() && entryDn == *who.boundDn;
  }
  return false;
}

bool attributeMatches(std::string_view ruleAttribute, std::string_view attribute) {
  if (ruleAttribute == "*") return true;
  return equalsIgnoreCase(ruleAttribute, attribute);
}

bool grants(AclAccess granted, AclAccess wanted) {
  return static_cast<int>(granted) >= static_cast<int>(wanted);
}

}  // namespace

bool AclPolicy::allows(const RequesterContext& who, const DistinguishedName& target,
                       std::string_view attribute, AclAccess wanted) const {
  if (wanted == AclAccess::none) return true;
  for (const AclRule& rule : rules_) {
    if (!subjectMatches(rule.subject, who, target)) continue;
    if (!targetMatches(rule.target, who, target)) continue;
    if (!attributeMatches(rule.attribute, attribute)) continue;
    return grants(rule.access, wanted);  // first match decides
  }
  return false;
}

bool AclPolicy::allowsEntryWrite(const RequesterContext& who,
                                 const DistinguishedName& target) const {
  for (const AclRule& rule : rules_) {
    if (!subjectMatches(rule.subject, who, target)) continue;
    if (!targetMatches(rule.target, who, target)) continue;
    if (rule.attribute != "*") continue;
    return grants(rule.access, AclAccess::write);
  }
  return false;
}

}  // namespace pkidir::dir
