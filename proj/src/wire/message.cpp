#include "pkidir/wire/message.hpp"

#include "pkidir/util/json.hpp"

namespace pkidir::wire {

namespace {

using util::Json;

Json attributeMapToJson(const std::map<std::string, std::vector<dir::AttributeValue>>& attrs) {
  Json out = Json::object();
  for (const auto& [name, values] : attrs) {
    Json arr = Json::array();
    for (const auto& v : values) arr.push_back(v.toJson());
    out[name] = std::move(arr);
  }
  return out;
}

std::map<std::string, std::vector<dir::AttributeValue>> attributeMapFromJson(const Json& j) {
  if (!j.is_object()) throw CodecError("attributes must be an object");
  std::map<std::string, std::vector<dir::AttributeValue>> out;
  for (const auto& [name, values] : j.items()) {
    if (!values.is_array() || values.empty()) {
      throw CodecError("attribute values must be a non-empty array");
    }
    std::vector<dir::AttributeValue> parsed;
    parsed.reserve(values.size());
    for (const auto& v : values) {
      try {
        parsed.push_back(dir::AttributeValue::fromJson(v));
      } catch (const std::invalid_argument& e) {
        throw CodecError(e.what());
      }
    }
    out.emplace(name, std::move(parsed));
  }
  return out;
}

Json parseLine(std::string_view line) {
  if (line.empty() || line.back() != '\n') {
    throw CodecError("message line not LF-terminated");
  }
  std::string_view body = line.substr(0, line.size() - 1);
  if (body.find('\n') != std::string_view::npos) {
    throw CodecError("embedded line feed");
  }
  Json j;
  try {
    j = util::parseJson(body);
  } catch (const std::invalid_argument& e) {
    throw CodecError(e.what());
  }
  if (!j.is_object()) throw CodecError("message is not a JSON object");
  return j;
}

std::int64_t requireId(const Json& j, std::int64_t minimum) {
  std::int64_t id = 0;
  try {
    id = util::getInt64(j, "id");
  } catch (const std::invalid_argument& e) {
    throw CodecError(e.what());
  }
  if (id < minimum) throw CodecError("bad message id");
  return id;
}

std::string fieldString(const Json& j, std::string_view key) {
  try {
    return util::getString(j, key);
  } catch (const std::invalid_argument& e) {
    throw CodecError(e.what());
  }
}

void checkKeys(const Json& j, std::initializer_list<std::string_view> keys) {
  try {
    util::requireKeys(j, keys);
  } catch (const std::invalid_argument& e) {
    throw CodecError(e.what());
  }
}

}  // namespace

std::string_view opName(Op op) {
  switch (op) {
    case Op::bind: return "bind";
    case Op::add: return "add";
    case Op::search: return "search";
    case Op::modify: return "modify";
    case Op::del: return "delete";
    case Op::unbind: return "unbind";
  }
  return "?";
}

std::optional<Op> opFromName(std::string_view name) {
  if (name == "bind") return Op::bind;
  if (name == "add") return Op::add;
  if (name == "search") return Op::search;
  if (name == "modify") return Op::modify;
  if (name == "delete") return Op::del;
  if (name == "unbind") return Op::unbind;
  return std::nullopt;
}

bool operator==(const ResponseMessage& a, const ResponseMessage& b) {
  if (a.id != b.id || a.code != b.code) return false;
  if (a.entry.has_value() != b.entry.has_value()) return false;
  if (a.entry && !(*a.entry == *b.entry)) return false;
  return true;
}

std::string encodeMessage(const RequestMessage& msg) {
  Json j;
  if (msg.op() != Op::unbind) j["dn"] = msg.dn;
  j["id"] = msg.id;
  j["op"] = std::string(opName(msg.op()));

  switch (msg.op()) {
    case Op::bind: {
      const auto& p = std::get<BindParams>(msg.params);
      j["payload"] = Json{{"password", util::base64Encode(p.password)}};
      break;
    }
    case Op::add: {
      const auto& p = std::get<AddParams>(msg.params);
      Json payload;
      payload["attributes"] = attributeMapToJson(p.attributes);
      Json classes = Json::array();
      for (const auto& c : p.objectClasses) classes.push_back(c);
      payload["objectClasses"] = std::move(classes);
      j["payload"] = std::move(payload);
      break;
    }
    case Op::modify: {
      const auto& p = std::get<ModifyParams>(msg.params);
      Json payload;
      payload["attribute"] = p.attribute;
      if (p.value) {
        payload["value"] = p.value->toJson();
      } else {
        payload["delete"] = true;
      }
      j["payload"] = std::move(payload);
      break;
    }
    case Op::search:
    case Op::del:
    case Op::unbind:
      break;
  }
  return util::canonicalDump(j) + "\n";
}

std::string encodeMessage(const ResponseMessage& msg) {
  Json j;
  j["code"] = static_cast<int>(msg.code);
  j["id"] = msg.id;
  if (msg.entry) {
    j["payload"] = Json{{"entry", msg.entry->toJson()}};
  }
  j["status"] = msg.ok() ? "ok" : "err";
  return util::canonicalDump(j) + "\n";
}

RequestMessage decodeRequest(std::string_view line) {
  const Json j = parseLine(line);

  const auto op = opFromName(j.contains("op") && j["op"].is_string()
                                 ? j["op"].get<std::string>()
                                 : std::string());
  if (!op) throw CodecError("unknown op");

  RequestMessage msg;
  msg.id = requireId(j, 1);

  switch (*op) {
    case Op::bind: {
      checkKeys(j, {"dn", "id", "op", "payload"});
      const Json& payload = j["payload"];
      checkKeys(payload, {"password"});
      BindParams p;
      if (!util::tryBase64Decode(fieldString(payload, "password"), p.password)) {
        throw CodecError("password is not valid base64");
      }
      msg.dn = fieldString(j, "dn");
      msg.params = std::move(p);
      break;
    }
    case Op::add: {
      checkKeys(j, {"dn", "id", "op", "payload"});
      const Json& payload = j["payload"];
      checkKeys(payload, {"attributes", "objectClasses"});
      AddParams p;
      if (!payload["objectClasses"].is_array()) {
        throw CodecError("objectClasses must be an array");
      }
      for (const auto& c : payload["objectClasses"]) {
        if (!c.is_string()) throw CodecError("objectClass must be a string");
        p.objectClasses.push_back(c.get<std::string>());
      }
      p.attributes = attributeMapFromJson(payload["attributes"]);
      msg.dn = fieldString(j, "dn");
      msg.params = std::move(p);
      break;
    }
    case Op::search: {
      checkKeys(j, {"dn", "id", "op"});
      msg.dn = fieldString(j, "dn");
      msg.params = SearchParams{};
      break;
    }
    case Op::modify: {
      checkKeys(j, {"dn", "id", "op", "payload"});
      const Json& payload = j["payload"];
      ModifyParams p;
      if (payload.is_object() && payload.contains("delete")) {
        checkKeys(payload, {"attribute", "delete"});
        if (!payload["delete"].is_boolean() || !payload["delete"].get<bool>()) {
          throw CodecError("delete marker must be true");
        }
        p.value = std::nullopt;
      } else {
        checkKeys(payload, {"attribute", "value"});
        try {
          p.value = dir::AttributeValue::fromJson(payload["value"]);
        } catch (const std::invalid_argument& e) {
          throw CodecError(e.what());
        }
      }
      p.attribute = fieldString(payload, "attribute");
      msg.dn = fieldString(j, "dn");
      msg.params = std::move(p);
      break;
    }
    case Op::del: {
      checkKeys(j, {"dn", "id", "op"});
      msg.dn = fieldString(j, "dn");
      msg.params = DeleteParams{};
      break;
    }
    case Op::unbind: {
      checkKeys(j, {"id", "op"});
      msg.params = UnbindParams{};
      break;
    }
  }
  return msg;
}

ResponseMessage decodeResponse(std::string_view line) {
  const Json j = parseLine(line);
  const bool hasPayload = j.contains("payload");
  if (hasPayload) {
    checkKeys(j, {"code", "id", "payload", "status"});
  } else {
    checkKeys(j, {"code", "id", "status"});
  }

  ResponseMessage msg;
  msg.id = requireId(j, 0);
  std::int64_t code = 0;
  try {
    code = util::getInt64(j, "code");
  } catch (const std::invalid_argument& e) {
    throw CodecError(e.what());
  }
  if (!isKnownResultCode(static_cast<int>(code))) throw CodecError("unknown result code");
  msg.code = static_cast<ResultCode>(code);

  const std::string status = fieldString(j, "status");
  if (status != "ok" && status != "err") throw CodecError("bad status");
  if ((status == "ok") != (msg.code == ResultCode::success)) {
    throw CodecError("status and code disagree");
  }

  if (hasPayload) {
    const Json& payload = j["payload"];
    checkKeys(payload, {"entry"});
    try {
      msg.entry = dir::DirectoryEntry::fromJson(payload["entry"]);
    } catch (const std::invalid_argument& e) {
      throw CodecError(e.what());
    }
  }
  return msg;
}

}  // namespace pkidir::wire
