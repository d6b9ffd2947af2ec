#include "pkidir/wire/client.hpp"

#include "pkidir/util/bytes.hpp"

namespace pkidir::wire {

Client Client::connect(const ClientConfig& config) {
  util::ignoreSigpipe();
  const int fd = net::connectTcp(config.host, config.port);
  Client client;
  if (config.useTls) {
    client.stream_ = net::tlsConnect(fd, config.pinSha256Hex);
  } else {
    client.stream_ = net::makePlainStream(fd, false);
  }
  client.reader_ = std::make_unique<net::LineReader>(*client.stream_, config.maxLineBytes);
  return client;
}

Client::~Client() = default;

ResponseMessage Client::roundTrip(const std::string& dn, RequestParams params) {
  if (!stream_) throw net::NetError("connection closed");
  RequestMessage request;
  request.id = nextId_++;
  request.dn = dn;
  request.params = std::move(params);

  const std::string encoded = encodeMessage(request);
  if (tap_) tap_(encoded);
  if (!stream_->writeAll(encoded)) throw net::NetError("write failed");

  auto line = reader_->readLine();
  if (!line) throw net::NetError("connection closed by server");
  ResponseMessage response = decodeResponse(*line);
  if (response.id != request.id) {
    if (response.id == 0 && response.code == ResultCode::protocolError) {
      throw CodecError("server reported a protocol error");
    }
    throw CodecError("response id mismatch");
  }
  return response;
}

ResultCode Client::bind(const std::string& dn, const util::Bytes& password) {
  return roundTrip(dn, BindParams{password}).code;
}

std::pair<ResultCode, std::optional<dir::DirectoryEntry>> Client::search(
    const std::string& dn) {
  ResponseMessage response = roundTrip(dn, SearchParams{});
  return {response.code, std::move(response.entry)};
}

ResultCode Client::add(const std::string& dn, const dir::DirectoryEntry& entry) {
  AddParams params;
  params.objectClasses = entry.objectClasses();
  for (const auto& name : entry.attributeNames()) {
    params.attributes.emplace(name, *entry.attribute(name));
  }
  return roundTrip(dn, std::move(params)).code;
}

ResultCode Client::modify(const std::string& dn, const std::string& attribute,
                          const std::optional<dir::AttributeValue>& value) {
  return roundTrip(dn, ModifyParams{attribute, value}).code;
}

ResultCode Client::remove(const std::string& dn) {
  return roundTrip(dn, DeleteParams{}).code;
}

void Client::unbind() {
  if (!stream_) return;
  try {
    roundTrip("", UnbindParams{});
  } catch (...) {
    // closing anyway
  }
  close();
}

void Client::close() {
  reader_.reset();
  stream_.reset();
}

bool Client::transportSecure() const {
  return stream_ && stream_->secure();
}

}  // namespace pkidir::wire
