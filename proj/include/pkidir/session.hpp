#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "pkidir/directory/directory.hpp"
#include "pkidir/result.hpp"
#include "pkidir/util/bytes.hpp"

namespace pkidir {

/// A directory conversation: one authentication state, typed operations,
/// result codes instead of exceptions. Implemented in-process and over the
/// wire with identical semantics.
class DirectorySession {
 public:
  virtual ~DirectorySession() = default;

  virtual ResultCode bind(const std::string& dnText, const util::Bytes& password) = 0;
  virtual std::pair<ResultCode, std::optional<dir::DirectoryEntry>> search(
      const std::string& dnText) = 0;
  virtual ResultCode add(const std::string& dnText, const dir::DirectoryEntry& entry) = 0;
  virtual ResultCode modify(const std::string& dnText, const std::string& attribute,
                            const std::optional<dir::AttributeValue>& value) = 0;
  virtual ResultCode remove(const std::string& dnText) = 0;
};

/// The op semantics every transport shares: DN parse failures map to the
/// op's natural result code (add -> schemaViolation, the rest ->
/// noSuchObject), a failed bind resets the state to anonymous.
class LocalDirectoryOps {
 public:
  LocalDirectoryOps(dir::Directory& directory, bool channelSecure)
      : directory_(directory) {
    state_.channelSecure = channelSecure;
  }

  ResultCode bind(const std::string& dnText, const util::Bytes& password);
  std::pair<ResultCode, std::optional<dir::DirectoryEntry>> search(
      const std::string& dnText) const;
  ResultCode add(const std::string& dnText, const dir::DirectoryEntry& entry);
  ResultCode modify(const std::string& dnText, const std::string& attribute,
                    const std::optional<dir::AttributeValue>& value);
  ResultCode remove(const std::string& dnText);

  const dir::BindState& state() const { return state_; }

 private:
  dir::Directory& directory_;
  dir::BindState state_;
};

/// DirectorySession over a Directory in the same process.
class InProcessSession final : public DirectorySession {
 public:
  InProcessSession(dir::Directory& directory, bool channelSecure)
      : ops_(directory, channelSecure) {}

  ResultCode bind(const std::string& dnText, const util::Bytes& password) override {
    return ops_.bind(dnText, password);
  }
  std::pair<ResultCode, std::optional<dir::DirectoryEntry>> search(
      const std::string& dnText) override {
    return ops_.search(dnText);
  }
  ResultCode add(const std::string& dnText, const dir::DirectoryEntry& entry) override {
    return ops_.add(dnText, entry);
  }
  ResultCode modify(const std::string& dnText, const std::string& attribute,
                    const std::optional<dir::AttributeValue>& value) override {
    return ops_.modify(dnText, attribute, value);
  }
  ResultCode remove(const std::string& dnText) override { return ops_.remove(dnText); }

  const dir::BindState& state() const { return ops_.state(); }

 private:
  LocalDirectoryOps ops_;
};

}  // namespace pkidir
