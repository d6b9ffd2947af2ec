#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pkidir/directory/attributes.hpp"
#include "pkidir/result.hpp"
#include "pkidir/util/bytes.hpp"

namespace pkidir::wire {

enum class Op { bind, add, search, modify, del, unbind };

std::string_view opName(Op op);
std::optional<Op> opFromName(std::string_view name);

struct BindParams {
  util::Bytes password;
  friend bool operator==(const BindParams&, const BindParams&) = default;
};

struct AddParams {
  std::vector<std::string> objectClasses;
  std::map<std::string, std::vector<dir::AttributeValue>> attributes;
  friend bool operator==(const AddParams&, const AddParams&) = default;
};

struct SearchParams {
  friend bool operator==(const SearchParams&, const SearchParams&) = default;
};

struct ModifyParams {
  std::string attribute;
  std::optional<dir::AttributeValue> value;  // nullopt is the delete marker
  friend bool operator==(const ModifyParams&, const ModifyParams&) = default;
};

struct DeleteParams {
  friend bool operator==(const DeleteParams&, const DeleteParams&) = default;
};

struct UnbindParams {
  friend bool operator==(const UnbindParams&, const UnbindParams&) = default;
};

// Alternative order mirrors Op.
using RequestParams =
    std::variant<BindParams, AddParams, SearchParams, ModifyParams, DeleteParams,
                 UnbindParams>;

/// One request line. `dn` is empty for unbind and for the anonymous bind.
struct RequestMessage {
  std::int64_t id = 0;  // positive, unique per connection
  std::string dn;
  RequestParams params;

  Op op() const { return static_cast<Op>(params.index()); }
  friend bool operator==(const RequestMessage&, const RequestMessage&) = default;
};

/// One response line; code 0 iff status ok. `entry` is the search payload.
struct ResponseMessage {
  std::int64_t id = 0;
  ResultCode code = ResultCode::success;
  std::optional<dir::DirectoryEntry> entry;

  bool ok() const { return code == ResultCode::success; }
};

bool operator==(const ResponseMessage& a, const ResponseMessage& b);

class CodecError : public std::runtime_error {
 public:
  explicit CodecError(const std::string& what) : std::runtime_error(what) {}
};

/// Canonical encoding: one JSON object per line, keys sorted, no
/// insignificant whitespace, binary values base64, terminated by exactly one
/// LF. decode(encode(m)) == m and encode∘decode∘encode is byte-identical.
std::string encodeMessage(const RequestMessage& msg);
std::string encodeMessage(const ResponseMessage& msg);

/// Expect a complete LF-terminated line holding one JSON object; throw
/// CodecError on anything else (truncation, embedded LF, unknown fields,
/// bad types, invalid UTF-8).
RequestMessage decodeRequest(std::string_view line);
ResponseMessage decodeResponse(std::string_view line);

}  // namespace pkidir::wire
