#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <thread>

#include "pkidir/ca/workflow.hpp"
#include "pkidir/directory/password.hpp"
#include "pkidir/wire/client.hpp"
#include "pkidir/wire/server.hpp"
#include "support/test_support.hpp"

using namespace pkidir;
using namespace pkidir::wire;
using pkidir::dir::AttributeValue;
using pkidir::dir::DistinguishedName;
using pkidir::util::toBytes;

namespace {

constexpr const char* kAdminDn = "cn=admin,o=pki";
constexpr const char* kAdminPw = "admin-secret-1";
constexpr const char* kAliceDn = "cn=alice,ou=people,o=pki";
constexpr const char* kAlicePw = "alice-password";

struct ServerFixture {
  dir::Directory directory;
  std::optional<Server> server;
  std::optional<testsupport::TempDir> tmp;
  std::string tlsFingerprint;

  explicit ServerFixture(bool assumeSecure, bool withTls = false)
      : directory(dir::AdminIdentity{DistinguishedName::parse(kAdminDn),
                                     dir::hashPassword(toBytes(kAdminPw)).render()}) {
    ca::configureAcls(directory);
    seedAlice();
    ServerConfig config;
    config.plainPort = 0;
    config.assumeSecure = assumeSecure;
    if (withTls) {
      tmp.emplace();
      const auto fixture = testsupport::makeTlsFixture(*tmp);
      config.tlsPort = 0;
      config.tlsCertPath = fixture.certPath;
      config.tlsKeyPath = fixture.keyPath;
      tlsFingerprint = fixture.fingerprintSha256Hex;
    }
    server.emplace(directory, config);
    server->start();
  }

  ~ServerFixture() { server->stop(); }

  void seedAlice() {
    dir::DirectoryEntry entry(DistinguishedName::parse(kAliceDn));
    entry.addObjectClass("top");
    entry.addObjectClass("inetOrgPerson");
    entry.addObjectClass("pkiUserManagement");
    entry.setAttribute("userPassword",
                       {AttributeValue::text(dir::hashPassword(toBytes(kAlicePw)).render())});
    entry.setAttribute("userEncryptedPassword",
                       {AttributeValue::binary(toBytes("enc-pw"))});
    entry.setAttribute("userEncryptedCertificate",
                       {AttributeValue::binary(toBytes("enc-cert"))});
    const dir::BindState admin = directory.simpleBind(kAdminDn, toBytes(kAdminPw), true);
    directory.addEntry(entry.dn(), entry, admin);
  }

  Client plainClient() {
    ClientConfig config;
    config.port = server->plainPort();
    return Client::connect(config);
  }

  Client tlsClient(std::optional<std::string> pin = std::nullopt) {
    ClientConfig config;
    config.port = server->tlsPort();
    config.useTls = true;
    config.pinSha256Hex = std::move(pin);
    return Client::connect(config);
  }
};

// Raw connection speaking bytes, for protocol-level misbehavior.
struct RawConn {
  int fd;
  explicit RawConn(std::uint16_t port) : fd(net::connectTcp("127.0.0.1", port)) {}
  ~RawConn() { ::close(fd); }
  void send(const std::string& bytes) {
    REQUIRE(::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL) ==
            static_cast<ssize_t>(bytes.size()));
  }
  void halfClose() { ::shutdown(fd, SHUT_WR); }
  std::string readAll() {
    std::string out;
    char buf[4096];
    for (;;) {
      const ssize_t rc = ::recv(fd, buf, sizeof(buf), 0);
      if (rc <= 0) return out;
      out.append(buf, static_cast<std::size_t>(rc));
    }
  }
};

}  // namespace

TEST_CASE("bind, search, unbind: three responses in order") {
  ServerFixture fixture(/*assumeSecure=*/true);
  RawConn conn(fixture.server->plainPort());

  RequestMessage bind;
  bind.id = 1;
  bind.dn = kAliceDn;
  bind.params = BindParams{toBytes(kAlicePw)};
  RequestMessage search;
  search.id = 2;
  search.dn = kAliceDn;
  search.params = SearchParams{};
  RequestMessage unbind;
  unbind.id = 3;
  unbind.params = UnbindParams{};

  conn.send(encodeMessage(bind) + encodeMessage(search) + encodeMessage(unbind));
  const std::string raw = conn.readAll();

  std::vector<ResponseMessage> responses;
  std::size_t start = 0;
  while (start < raw.size()) {
    const std::size_t pos = raw.find('\n', start);
    REQUIRE(pos != std::string::npos);
    responses.push_back(decodeResponse(raw.substr(start, pos - start + 1)));
    start = pos + 1;
  }
  REQUIRE(responses.size() == 3);
  CHECK(responses[0].id == 1);
  CHECK(responses[0].ok());
  CHECK(responses[1].id == 2);
  CHECK(responses[1].ok());
  REQUIRE(responses[1].entry.has_value());
  CHECK(responses[1].entry->hasAttribute("userPKCS12") == false);
  CHECK(responses[2].id == 3);
  CHECK(responses[2].ok());
}

TEST_CASE("anonymous search works over an insecure channel") {
  ServerFixture fixture(/*assumeSecure=*/false);
  Client client = fixture.plainClient();
  auto [code, entry] = client.search(kAliceDn);
  CHECK(code == ResultCode::success);
  REQUIRE(entry.has_value());
  CHECK(entry->hasAttribute("userEncryptedPassword"));
  CHECK(!entry->hasAttribute("userPassword"));
  client.unbind();
}

TEST_CASE("passworded bind over plaintext fails with code 13") {
  ServerFixture fixture(/*assumeSecure=*/false);
  Client client = fixture.plainClient();
  CHECK(client.bind(kAliceDn, toBytes(kAlicePw)) == ResultCode::confidentialityRequired);
  client.unbind();
}

TEST_CASE("assume-secure flag marks plaintext connections secure") {
  ServerFixture fixture(/*assumeSecure=*/true);
  Client client = fixture.plainClient();
  CHECK(client.bind(kAliceDn, toBytes(kAlicePw)) == ResultCode::success);
  client.unbind();
}

TEST_CASE("TLS listener: secure binds succeed, pinning enforced") {
  ServerFixture fixture(/*assumeSecure=*/false, /*withTls=*/true);

  SUBCASE("pinned handshake and secure bind") {
    Client client = fixture.tlsClient(fixture.tlsFingerprint);
    CHECK(client.transportSecure());
    CHECK(client.bind(kAliceDn, toBytes(kAlicePw)) == ResultCode::success);
    auto [code, entry] = client.search(kAliceDn);
    CHECK(code == ResultCode::success);
    REQUIRE(entry.has_value());
    CHECK(entry->hasAttribute("userPKCS12") == false);  // none stored
    client.unbind();
  }
  SUBCASE("unpinned TLS works") {
    Client client = fixture.tlsClient();
    CHECK(client.bind(kAliceDn, toBytes(kAlicePw)) == ResultCode::success);
    client.unbind();
  }
  SUBCASE("wrong pin is refused") {
    const std::string wrongPin(64, 'a');
    CHECK_THROWS_AS(fixture.tlsClient(wrongPin), net::NetError);
  }
  SUBCASE("plaintext listener still insecure") {
    Client client = fixture.plainClient();
    CHECK(client.bind(kAliceDn, toBytes(kAlicePw)) ==
          ResultCode::confidentialityRequired);
    client.unbind();
  }
}

TEST_CASE("malformed frame: code-2 response then close") {
  ServerFixture fixture(/*assumeSecure=*/true);
  RawConn conn(fixture.server->plainPort());
  conn.send("this is not json\n");
  conn.halfClose();
  const std::string raw = conn.readAll();
  const ResponseMessage response = decodeResponse(raw);
  CHECK(response.id == 0);
  CHECK(response.code == ResultCode::protocolError);
}

TEST_CASE("truncated frame: code-2 response then close") {
  ServerFixture fixture(/*assumeSecure=*/true);
  RawConn conn(fixture.server->plainPort());
  conn.send("{\"id\":1,\"op\":\"unbind\"}");  // missing LF, then EOF
  conn.halfClose();
  const std::string raw = conn.readAll();
  const ResponseMessage response = decodeResponse(raw);
  CHECK(response.id == 0);
  CHECK(response.code == ResultCode::protocolError);
}

TEST_CASE("duplicate request ids are a protocol error") {
  ServerFixture fixture(/*assumeSecure=*/true);
  RawConn conn(fixture.server->plainPort());
  RequestMessage search;
  search.id = 7;
  search.dn = kAliceDn;
  search.params = SearchParams{};
  conn.send(encodeMessage(search) + encodeMessage(search));
  conn.halfClose();
  const std::string raw = conn.readAll();
  // first response ok, second is the connection-level protocol error
  const std::size_t pos = raw.find('\n');
  REQUIRE(pos != std::string::npos);
  CHECK(decodeResponse(raw.substr(0, pos + 1)).ok());
  CHECK(decodeResponse(raw.substr(pos + 1)).code == ResultCode::protocolError);
}

TEST_CASE("garbage does not kill the server (200 malformed lines)") {
  ServerFixture fixture(/*assumeSecure=*/true);
  auto& rng = testsupport::testRng();
  std::uniform_int_distribution<int> lenDist(0, 200);
  for (int i = 0; i < 200; ++i) {
    RawConn conn(fixture.server->plainPort());
    std::string junk = testsupport::randomTestAscii(lenDist(rng));
    if (i % 3 == 0) {
      const auto bytes = testsupport::randomTestBytes(lenDist(rng));
      junk.assign(bytes.begin(), bytes.end());
    }
    junk.push_back('\n');
    conn.send(junk);
    conn.halfClose();
    conn.readAll();
  }
  // still serving
  Client client = fixture.plainClient();
  CHECK(client.bind(kAliceDn, toBytes(kAlicePw)) == ResultCode::success);
  client.unbind();
}

TEST_CASE("concurrent connections see committed writes") {
  ServerFixture fixture(/*assumeSecure=*/true);
  const int kThreads = 6;
  std::vector<std::thread> threads;
  std::atomic<int> failures{0};
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&fixture, t, &failures] {
      try {
        ClientConfig config;
        config.port = fixture.server->plainPort();
        Client client = Client::connect(config);
        if (client.bind(kAdminDn, toBytes(kAdminPw)) != ResultCode::success) {
          ++failures;
          return;
        }
        const std::string dn = "cn=user" + std::to_string(t) + ",ou=people,o=pki";
        dir::DirectoryEntry entry(DistinguishedName::parse(dn));
        entry.addObjectClass("inetOrgPerson");
        entry.setAttribute("cn", {AttributeValue::text("user")});
        if (client.add(dn, entry) != ResultCode::success) ++failures;
        auto [code, found] = client.search(dn);
        if (code != ResultCode::success || !found) ++failures;
        client.unbind();
      } catch (...) {
        ++failures;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(failures.load() == 0);
  CHECK(fixture.directory.entryCount() == 1 + kThreads);
}
