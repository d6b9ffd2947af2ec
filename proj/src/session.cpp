#include "pkidir/session.hpp"

namespace pkidir {

ResultCode LocalDirectoryOps::bind(const std::string& dnText, const util::Bytes& password) {
  try {
    state_ = directory_.simpleBind(dnText, password, state_.channelSecure);
    return ResultCode::success;
  } catch (const DirectoryError& e) {
    state_ = dir::BindState{std::nullopt, false, state_.channelSecure};
    return e.code();
  }
}

std::pair<ResultCode, std::optional<dir::DirectoryEntry>> LocalDirectoryOps::search(
    const std::string& dnText) const {
  auto dn = dir::DistinguishedName::tryParse(dnText);
  if (!dn) return {ResultCode::noSuchObject, std::nullopt};
  try {
    return {ResultCode::success, directory_.searchEntry(*dn, state_)};
  } catch (const DirectoryError& e) {
    return {e.code(), std::nullopt};
  }
}

ResultCode LocalDirectoryOps::add(const std::string& dnText, const dir::DirectoryEntry& entry) {
  auto dn = dir::DistinguishedName::tryParse(dnText);
  if (!dn) return ResultCode::schemaViolation;
  try {
    dir::DirectoryEntry named = entry;
    named.setDn(*dn);  // the request DN names the entry on every transport
    directory_.addEntry(*dn, named, state_);
    return ResultCode::success;
  } catch (const DirectoryError& e) {
    return e.code();
  }
}

ResultCode LocalDirectoryOps::modify(const std::string& dnText, const std::string& attribute,
                                     const std::optional<dir::AttributeValue>& value) {
  auto dn = dir::DistinguishedName::tryParse(dnText);
  if (!dn) return ResultCode::noSuchObject;
  try {
    directory_.modifyAttribute(*dn, attribute, value, state_);
    return ResultCode::success;
  } catch (const DirectoryError& e) {
    return e.code();
  }
}

ResultCode LocalDirectoryOps::remove(const std::string& dnText) {
  auto dn = dir::DistinguishedName::tryParse(dnText);
  if (!dn) return ResultCode::noSuchObject;
  try {
    directory_.deleteEntry(*dn, state_);
    return ResultCode::success;
  } catch (const DirectoryError& e) {
    return e.code();
  }
}

}  // namespace pkidir
