#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pkidir/util/bytes.hpp"

namespace pkidir::util {

using Json = nlohmann::json;

/// Canonical serialization: object keys sorted lexicographically (byte
/// order), no insignificant whitespace, UTF-8 passed through, minimal
/// escaping. Byte-equality of two canonical dumps implies value equality.
std::string canonicalDump(const Json& j);
Bytes canonicalDumpBytes(const Json& j);

/// Parses a complete JSON text. Throws std::invalid_argument on malformed
/// input (including invalid UTF-8).
Json parseJson(std::string_view text);

// Strict field accessors for decoding fixed-shape records. All throw
// std::invalid_argument on a missing key or a type mismatch.
void requireKeys(const Json& obj, std::initializer_list<std::string_view> keys);
std::string getString(const Json& obj, std::string_view key);
std::int64_t getInt64(const Json& obj, std::string_view key);
bool getBool(const Json& obj, std::string_view key);
Bytes getBase64(const Json& obj, std::string_view key);
const Json& getObject(const Json& obj, std::string_view key);
const Json& getArray(const Json& obj, std::string_view key);

}  // namespace pkidir::util
