#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pkidir/ca/workflow.hpp"
#include "pkidir/directory/acl.hpp"
#include "support/acl_oracle.hpp"

using namespace pkidir::dir;
using testsupport::OracleSubject;

namespace {

const DistinguishedName kAlice = DistinguishedName::parse("cn=alice,ou=people,o=pki");
const DistinguishedName kBob = DistinguishedName::parse("cn=bob,ou=people,o=pki");
const DistinguishedName kAdmin = DistinguishedName::parse("cn=admin,o=pki");

RequesterContext requesterFor(OracleSubject subject, const DistinguishedName& target) {
  switch (subject) {
    case OracleSubject::anonymous: return {std::nullopt, false};
    case OracleSubject::self: return {target, false};
    case OracleSubject::other: return {kBob, false};
    case OracleSubject::admin: return {kAdmin, true};
  }
  return {std::nullopt, false};
}

}  // namespace

TEST_CASE("first matching rule decides, no match denies") {
  AclPolicy policy({
      {AclSubject::authenticated, {AclTargetKind::subtree, std::nullopt}, "foo",
       AclAccess::none},
      {AclSubject::authenticated, {AclTargetKind::subtree, std::nullopt}, "foo",
       AclAccess::write},
  });
  const RequesterContext bound{kBob, false};
  // the explicit none comes first and wins despite the later write grant
  CHECK(!policy.allows(bound, kAlice, "foo", AclAccess::read));
  CHECK(!policy.allows(bound, kAlice, "foo", AclAccess::write));
  // nothing matched at all
  CHECK(!policy.allows(bound, kAlice, "bar", AclAccess::read));
  CHECK(!policy.allows({std::nullopt, false}, kAlice, "foo", AclAccess::read));
}

TEST_CASE("write grants imply read, read grants do not imply write") {
  AclPolicy policy({
      {AclSubject::authenticated, {AclTargetKind::subtree, std::nullopt}, "w",
       AclAccess::write},
      {AclSubject::authenticated, {AclTargetKind::subtree, std::nullopt}, "r",
       AclAccess::read},
  });
  const RequesterContext bound{kBob, false};
  CHECK(policy.allows(bound, kAlice, "w", AclAccess::read));
  CHECK(policy.allows(bound, kAlice, "w", AclAccess::write));
  CHECK(policy.allows(bound, kAlice, "r", AclAccess::read));
  CHECK(!policy.allows(bound, kAlice, "r", AclAccess::write));
}

TEST_CASE("target scopes") {
  const auto base = DistinguishedName::parse("ou=people,o=pki");
  AclPolicy exact({{AclSubject::anonymous, {AclTargetKind::exactDn, kAlice}, "*",
                    AclAccess::read}});
  CHECK(exact.allows({std::nullopt, false}, kAlice, "x", AclAccess::read));
  CHECK(!exact.allows({std::nullopt, false}, kBob, "x", AclAccess::read));

  AclPolicy subtree({{AclSubject::anonymous, {AclTargetKind::subtree, base}, "*",
                      AclAccess::read}});
  CHECK(subtree.allows({std::nullopt, false}, kAlice, "x", AclAccess::read));
  CHECK(!subtree.allows({std::nullopt, false}, kAdmin, "x", AclAccess::read));

  AclPolicy own({{AclSubject::authenticated, {AclTargetKind::ownEntry, std::nullopt},
                  "*", AclAccess::read}});
  CHECK(own.allows({kAlice, false}, kAlice, "x", AclAccess::read));
  CHECK(!own.allows({kBob, false}, kAlice, "x", AclAccess::read));
  CHECK(!own.allows({std::nullopt, false}, kAlice, "x", AclAccess::read));
}

TEST_CASE("attribute matching is case-insensitive, * matches everything") {
  AclPolicy policy({{AclSubject::anonymous, {AclTargetKind::subtree, std::nullopt},
                     "userCertificate", AclAccess::read}});
  CHECK(policy.allows({std::nullopt, false}, kAlice, "USERCERTIFICATE", AclAccess::read));
  CHECK(!policy.allows({std::nullopt, false}, kAlice, "userPassword", AclAccess::read));
}

TEST_CASE("entry-level writes need an * grant") {
  AclPolicy policy({
      {AclSubject::admin, {AclTargetKind::subtree, std::nullopt}, "*", AclAccess::write},
      {AclSubject::self, {AclTargetKind::ownEntry, std::nullopt}, "userCertificate",
       AclAccess::write},
  });
  CHECK(policy.allowsEntryWrite({kAdmin, true}, kAlice));
  CHECK(!policy.allowsEntryWrite({kAlice, false}, kAlice));  // attribute grant only
  CHECK(!policy.allowsEntryWrite({std::nullopt, false}, kAlice));
}

// The installed rule set must reproduce the full decision table from the
// independent oracle: 4 subjects x 5 attributes x {read, write} = 40 cells.
TEST_CASE("standard rule set matches the oracle decision table") {
  AclPolicy policy(pkidir::ca::CaEngine::standardAclRules());

  for (OracleSubject subject : {OracleSubject::anonymous, OracleSubject::self,
                                OracleSubject::other, OracleSubject::admin}) {
    const RequesterContext who = requesterFor(subject, kAlice);
    for (const auto attribute : testsupport::kSchemeAttributes) {
      CAPTURE(static_cast<int>(subject));
      CAPTURE(attribute);
      CHECK(policy.allows(who, kAlice, attribute, AclAccess::read) ==
            testsupport::oracleAllowsRead(subject, attribute));
      CHECK(policy.allows(who, kAlice, attribute, AclAccess::write) ==
            testsupport::oracleAllowsWrite(subject, attribute));
    }
  }
}

TEST_CASE("standard rule set: the three headline policy statements") {
  AclPolicy policy(pkidir::ca::CaEngine::standardAclRules());
  // users may write only the userCertificate of their own entry
  CHECK(policy.allows({kAlice, false}, kAlice, "userCertificate", AclAccess::write));
  CHECK(!policy.allows({kAlice, false}, kBob, "userCertificate", AclAccess::write));
  // the hashed password is not visible to other users (nor to the owner)
  CHECK(!policy.allows({kBob, false}, kAlice, "userPassword", AclAccess::read));
  CHECK(!policy.allows({kAlice, false}, kAlice, "userPassword", AclAccess::read));
  // only the owner reads userPKCS12
  CHECK(policy.allows({kAlice, false}, kAlice, "userPKCS12", AclAccess::read));
  CHECK(!policy.allows({kBob, false}, kAlice, "userPKCS12", AclAccess::read));
  CHECK(!policy.allows({std::nullopt, false}, kAlice, "userPKCS12", AclAccess::read));
}
