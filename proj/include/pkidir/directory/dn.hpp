#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pkidir::dir {

/// One relative distinguished name component. Attribute names compare
/// case-insensitively; values are stored whitespace-trimmed and compare
/// exactly.
struct Rdn {
  std::string name;
  std::string value;
};

bool operator==(const Rdn& a, const Rdn& b);

/// An ordered list of RDNs, most specific first, e.g.
/// `cn=John Doe,ou=people,dc=example,dc=com`. Values containing `,`, `=` or
/// `\` are backslash-escaped in the rendered form, so parse(render(dn)) is
/// the identity.
class DistinguishedName {
 public:
  DistinguishedName() = default;

  /// Throws std::invalid_argument unless there is at least one RDN with a
  /// well-formed name and a non-empty trimmed value.
  explicit DistinguishedName(std::vector<Rdn> rdns);

  static DistinguishedName parse(std::string_view text);
  static std::optional<DistinguishedName> tryParse(std::string_view text);

  std::string render() const;

  /// Case-folded attribute names, escaped values; the flat key a directory
  /// indexes entries by.
  std::string normalizedKey() const;

  const std::vector<Rdn>& rdns() const { return rdns_; }
  bool empty() const { return rdns_.empty(); }

 private:
  std::vector<Rdn> rdns_;
};

bool operator==(const DistinguishedName& a, const DistinguishedName& b);
bool operator!=(const DistinguishedName& a, const DistinguishedName& b);

/// True when `dn` equals `suffix` or sits below it in the tree.
bool isWithinSubtree(const DistinguishedName& dn, const DistinguishedName& suffix);

std::string foldCase(std::string_view s);
bool equalsIgnoreCase(std::string_view a, std::string_view b);

}  // namespace pkidir::dir
