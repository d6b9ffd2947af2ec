#include "pkidir/wire/server.hpp"

#include <algorithm>
#include <unordered_set>

#include "pkidir/session.hpp"
#include "pkidir/util/bytes.hpp"
#include "pkidir/wire/message.hpp"

namespace pkidir::wire {

Server::Server(dir::Directory& directory, ServerConfig config)
    : directory_(directory), config_(std::move(config)) {
  util::ignoreSigpipe();
}

Server::~Server() { stop(); }

void Server::start() {
  if (running_.exchange(true)) return;

  if (config_.tlsPort) {
    tlsContext_.emplace(config_.tlsCertPath, config_.tlsKeyPath);
    tlsListener_ = net::Listener::open(config_.host, *config_.tlsPort);
    tlsBoundPort_ = tlsListener_->port();
  }
  if (config_.plainPort) {
    plainListener_ = net::Listener::open(config_.host, *config_.plainPort);
    plainBoundPort_ = plainListener_->port();
  }

  if (plainListener_) {
    acceptThreads_.emplace_back(&Server::acceptLoop, this, &*plainListener_, false);
  }
  if (tlsListener_) {
    acceptThreads_.emplace_back(&Server::acceptLoop, this, &*tlsListener_, true);
  }
}

void Server::stop() {
  if (!running_.exchange(false)) return;

  if (plainListener_) plainListener_->close();
  if (tlsListener_) tlsListener_->close();
  for (auto& t : acceptThreads_) {
    if (t.joinable()) t.join();
  }
  acceptThreads_.clear();

  {
    std::lock_guard lock(connMutex_);
    for (net::Stream* s : activeStreams_) s->shutdown();
  }
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(connMutex_);
    threads.swap(connThreads_);
  }
  for (auto& t : threads) {
    if (t.joinable()) t.join();
  }
  plainListener_.reset();
  tlsListener_.reset();
}

void Server::acceptLoop(net::Listener* listener, bool tls) {
  for (;;) {
    const int fd = listener->acceptFd();
    if (fd < 0) return;  // listener closed
    if (!running_.load()) {
      net::makePlainStream(fd, false);  // adopt and close
      return;
    }
    std::unique_ptr<net::Stream> stream;
    if (tls) {
      stream = tlsContext_->accept(fd);
      if (!stream) continue;  // failed handshake
    } else {
      stream = net::makePlainStream(fd, config_.assumeSecure);
    }
    std::lock_guard lock(connMutex_);
    connThreads_.emplace_back(
        [this](std::unique_ptr<net::Stream> s) {
          try {
            serveConnection(std::move(s));
          } catch (...) {
            // a dying connection must never take the server down
          }
        },
        std::move(stream));
  }
}

void Server::serveConnection(std::unique_ptr<net::Stream> stream) {
  {
    std::lock_guard lock(connMutex_);
    activeStreams_.push_back(stream.get());
  }
  struct Deregister {
    Server* server;
    net::Stream* stream;
    ~Deregister() {
      std::lock_guard lock(server->connMutex_);
      auto& v = server->activeStreams_;
      v.erase(std::remove(v.begin(), v.end(), stream), v.end());
    }
  } deregister{this, stream.get()};

  if (!running_.load()) return;  // shutdown raced the accept

  LocalDirectoryOps ops(directory_, stream->secure());
  net::LineReader reader(*stream, config_.maxLineBytes);
  std::unordered_set<std::int64_t> seenIds;

  auto respond = [&](const ResponseMessage& msg) {
    return stream->writeAll(encodeMessage(msg));
  };
  auto protocolError = [&]() {
    respond(ResponseMessage{0, ResultCode::protocolError, std::nullopt});
  };

  for (;;) {
    std::optional<std::string> line;
    try {
      line = reader.readLine();
    } catch (const net::NetError&) {
      protocolError();  // truncated frame or overlong line
      return;
    }
    if (!line) return;  // clean EOF

    RequestMessage request;
    try {
      request = decodeRequest(*line);
    } catch (const CodecError&) {
      protocolError();
      return;
    }
    if (!seenIds.insert(request.id).second) {
      protocolError();  // ids must be unique per connection
      return;
    }

    ResponseMessage response;
    response.id = request.id;
    try {
      switch (request.op()) {
      case Op::bind: {
        const auto& p = std::get<BindParams>(request.params);
        response.code = ops.bind(request.dn, p.password);
        break;
      }
      case Op::add: {
        const auto& p = std::get<AddParams>(request.params);
        dir::DirectoryEntry entry;
        for (const auto& cls : p.objectClasses) entry.addObjectClass(cls);
        for (const auto& [name, values] : p.attributes) entry.setAttribute(name, values);
        response.code = ops.add(request.dn, entry);
        break;
      }
      case Op::search: {
        auto [code, entry] = ops.search(request.dn);
        response.code = code;
        response.entry = std::move(entry);
        break;
      }
      case Op::modify: {
        const auto& p = std::get<ModifyParams>(request.params);
        response.code = ops.modify(request.dn, p.attribute, p.value);
        break;
      }
      case Op::del: {
        response.code = ops.remove(request.dn);
        break;
      }
      case Op::unbind: {
        respond(response);  // success, then close
        return;
      }
      }
    } catch (const std::exception&) {
      response.code = ResultCode::unwillingToPerform;
      response.entry.reset();
    }
    if (!respond(response)) return;
  }
}

}  // namespace pkidir::wire
