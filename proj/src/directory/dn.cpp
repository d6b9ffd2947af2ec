#include "pkidir/directory/dn.hpp"

#include <cctype>
#include <stdexcept>

namespace pkidir::dir {

namespace {

bool isNameStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

bool isNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-';
}

bool isValidAttributeName(std::string_view name) {
  if (name.empty() || !isNameStart(name.front())) return false;
  for (char c : name) {
    if (!isNameChar(c)) return false;
  }
  return true;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string escapeValue(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    if (c == '\\' || c == ',' || c == '=') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

void validateRdn(const Rdn& rdn) {
  if (!isValidAttributeName(rdn.name)) {
    throw std::invalid_argument("invalid RDN attribute name: " + rdn.name);
  }
  if (rdn.value.empty()) {
    throw std::invalid_argument("empty RDN value");
  }
}

}  // namespace

std::string foldCase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool equalsIgnoreCase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool operator==(const Rdn& a, const Rdn& b) {
  return equalsIgnoreCase(a.name, b.name) && a.value == b.value;
}

DistinguishedName::DistinguishedName(std::vector<Rdn> rdns) {
  if (rdns.empty()) {
    throw std::invalid_argument("distinguished name needs at least one RDN");
  }
  for (auto& rdn : rdns) {
    rdn.value = trim(rdn.value);
    validateRdn(rdn);
  }
  rdns_ = std::move(rdns);
}

DistinguishedName DistinguishedName::parse(std::string_view text) {
  auto dn = tryParse(text);
  if (!dn) {
    throw std::invalid_argument("malformed distinguished name: " + std::string(text));
  }
  return *dn;
}

std::optional<DistinguishedName> DistinguishedName::tryParse(std::string_view text) {
  if (text.empty()) return std::nullopt;

  std::vector<Rdn> rdns;
  std::string name;
  std::string value;
  bool inValue = false;
  bool escaped = false;

  auto finishRdn = [&]() -> bool {
    if (!inValue) return false;
    Rdn rdn{trim(name), trim(value)};
    if (!isValidAttributeName(rdn.name) || rdn.value.empty()) return false;
    rdns.push_back(std::move(rdn));
    name.clear();
    value.clear();
    inValue = false;
    return true;
  };

  for (char c : text) {
    if (escaped) {
      if (c != '\\' && c != ',' && c != '=') return std::nullopt;
      (inValue ? value : name).push_back(c);
      escaped = false;
      continue;
    }
    if (c == '\\') {
      escaped = true;
      continue;
    }
    if (c == '=' && !inValue) {
      inValue = true;
      continue;
    }
    if (c == ',') {
      if (!finishRdn()) return std::nullopt;
      continue;
    }
    (inValue ? value : name).push_back(c);
  }
  if (escaped) return std::nullopt;
  if (!finishRdn()) return std::nullopt;

  return DistinguishedName(std::move(rdns));
}

std::string DistinguishedName::render() const {
  std::string out;
  for (std::size_t i = 0; i < rdns_.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += rdns_[i].name;
    out.push_back('=');
    out += escapeValue(rdns_[i].value);
  }
  return out;
}

std::string DistinguishedName::normalizedKey() const {
  std::string out;
  for (std::size_t i = 0; i < rdns_.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += foldCase(rdns_[i].name);
    out.push_back('=');
    out += escapeValue(rdns_[i].value);
  }
  return out;
}

bool operator==(const DistinguishedName& a, const DistinguishedName& b) {
  const auto& ra = a.rdns();
  const auto& rb = b.rdns();
  if (ra.size() != rb.size()) return false;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (!(ra[i] == rb[i])) return false;
  }
  return true;
}

bool operator!=(const DistinguishedName& a, const DistinguishedName& b) {
  return !(a == b);
}

bool isWithinSubtree(const DistinguishedName& dn, const DistinguishedName& suffix) {
  const auto& d = dn.rdns();
  const auto& s = suffix.rdns();
  if (s.size() > d.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(d[d.size() - s.size() + i] == s[i])) return false;
  }
  return true;
}

}  // namespace pkidir::dir
