#include "pkidir/util/json.hpp"

#include <limits>
#include <stdexcept>

namespace pkidir::util {

std::string canonicalDump(const Json& j) {
  // nlohmann::json keeps object members in a sorted std::map; dump() with no
  // arguments emits no insignificant whitespace.
  return j.dump();
}

Bytes canonicalDumpBytes(const Json& j) {
  return toBytes(canonicalDump(j));
}

Json parseJson(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

namespace {

const Json& fetch(const Json& obj, std::string_view key) {
  if (!obj.is_object()) throw std::invalid_argument("expected JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw std::invalid_argument("missing field: " + std::string(key));
  }
  return *it;
}

}  // namespace

void requireKeys(const Json& obj, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) throw std::invalid_argument("expected JSON object");
  if (obj.size() != keys.size()) {
    throw std::invalid_argument("unexpected field count");
  }
  for (auto key : keys) {
    if (!obj.contains(key)) {
      throw std::invalid_argument("missing field: " + std::string(key));
    }
  }
}

std::string getString(const Json& obj, std::string_view key) {
  const Json& v = fetch(obj, key);
  if (!v.is_string()) {
    throw std::invalid_argument("field is not a string: " + std::string(key));
  }
  return v.get<std::string>();
}

std::int64_t getInt64(const Json& obj, std::string_view key) {
  const Json& v = fetch(obj, key);
  if (!v.is_number_integer()) {
    throw std::invalid_argument("field is not an integer: " + std::string(key));
  }
  if (v.is_number_unsigned() &&
      v.get<std::uint64_t>() >
          static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw std::invalid_argument("integer out of range: " + std::string(key));
  }
  return v.get<std::int64_t>();
}

bool getBool(const Json& obj, std::string_view key) {
  const Json& v = fetch(obj, key);
  if (!v.is_boolean()) {
    throw std::invalid_argument("field is not a boolean: " + std::string(key));
  }
  return v.get<bool>();
}

Bytes getBase64(const Json& obj, std::string_view key) {
  Bytes out;
  if (!tryBase64Decode(getString(obj, key), out)) {
    throw std::invalid_argument("field is not valid base64: " + std::string(key));
  }
  return out;
}

const Json& getObject(const Json& obj, std::string_view key) {
  const Json& v = fetch(obj, key);
  if (!v.is_object()) {
    throw std::invalid_argument("field is not an object: " + std::string(key));
  }
  return v;
}

const Json& getArray(const Json& obj, std::string_view key) {
  const Json& v = fetch(obj, key);
  if (!v.is_array()) {
    throw std::invalid_argument("field is not an array: " + std::string(key));
  }
  return v;
}

}  // namespace pkidir::util
