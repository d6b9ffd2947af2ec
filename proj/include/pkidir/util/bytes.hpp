#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pkidir::util {

using Bytes = std::vector<std::uint8_t>;

Bytes toBytes(std::string_view s);
std::string toString(const Bytes& b);

std::string base64Encode(const Bytes& data);

/// Strict decoder: standard alphabet, correct padding, canonical trailing
/// bits. Throws std::invalid_argument on anything else.
Bytes base64Decode(std::string_view text);
bool tryBase64Decode(std::string_view text, Bytes& out) noexcept;

std::string hexEncode(const Bytes& data);

bool isValidUtf8(std::string_view s);

/// CSPRNG-backed. Throws std::runtime_error if the RNG fails.
Bytes randomBytes(std::size_t n);

std::int64_t nowUtcSeconds();

void secureWipe(Bytes& b) noexcept;
void secureWipe(std::string& s) noexcept;

/// True when needle occurs as a contiguous byte run inside haystack.
bool containsBytes(const Bytes& haystack, const Bytes& needle);

void ignoreSigpipe() noexcept;

}  // namespace pkidir::util
