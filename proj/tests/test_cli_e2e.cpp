#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <thread>

#include "support/test_support.hpp"

using testsupport::CommandResult;
using testsupport::runCommand;

namespace {

const std::string kCli = PKIDIR_CLI_PATH;
constexpr const char* kAliceDn = "cn=alice,ou=people,o=directory-pki";
constexpr const char* kBobDn = "cn=bob,ou=people,o=directory-pki";
constexpr const char* kCarolDn = "cn=carol,ou=people,o=directory-pki";

struct Cli {
  testsupport::TempDir tmp;
  std::unique_ptr<testsupport::ChildProcess> server;
  std::string address;
  std::string tlsAddress;
  std::string tlsPin;

  std::string q(const std::string& s) const { return "'" + s + "'"; }

  CommandResult run(const std::string& args) const { return runCommand(kCli + " " + args); }

  void startServer(bool assumeSecure, bool withTls = false) {
    const CommandResult init = run(
        "ca init --state-dir " + tmp.file("ca") +
        " --admin-password e2e-admin-pw --emit-server-config " + tmp.file("server.json") +
        " --snapshot " + tmp.file("snap.ndjson") + " --plain-port 0 --pub-out " +
        tmp.file("ca-pub.json"));
    REQUIRE(init.exitCode == 0);

    std::string command = kCli + " serve --config " + tmp.file("server.json");
    if (assumeSecure) command += " --assume-secure";
    if (withTls) {
      const auto tls = testsupport::makeTlsFixture(tmp);
      tlsPin = tls.fingerprintSha256Hex;
      command += " --tls-port 0 --tls-cert " + tls.certPath + " --tls-key " + tls.keyPath;
    }
    server = std::make_unique<testsupport::ChildProcess>(
        command + " > " + tmp.file("serve.log") + " 2>&1");

    std::string log;
    for (int i = 0; i < 100; ++i) {
      log = testsupport::readFileText(tmp.file("serve.log"));
      if (log.find("listening plain=") != std::string::npos) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    const auto plainPos = log.find("plain=");
    REQUIRE(plainPos != std::string::npos);
    address = "127.0.0.1:" +
              log.substr(plainPos + 6, log.find(' ', plainPos) - plainPos - 6);
    const auto tlsPos = log.find("tls=");
    REQUIRE(tlsPos != std::string::npos);
    tlsAddress =
        "127.0.0.1:" + log.substr(tlsPos + 4, log.find('\n', tlsPos) - tlsPos - 4);
  }

  std::string conn() const { return " --address " + address; }
  std::string tlsConn() const {
    return " --address " + tlsAddress + " --tls --pin " + tlsPin;
  }
  std::string state() const { return " --state-dir " + tmp.file("ca"); }
};

}  // namespace

TEST_CASE("cli end-to-end over TLS") {
  Cli cli;
  cli.startServer(/*assumeSecure=*/false, /*withTls=*/true);
  const char* dn = "cn=tls-user,ou=people,o=directory-pki";

  REQUIRE(cli.run("client keygen --out " + cli.tmp.file("k.json") + " --pub-out " +
                  cli.tmp.file("p.json"))
              .exitCode == 0);
  REQUIRE(cli.run("ca register" + cli.state() + " --subject " + cli.q(dn) +
                  " --variant full --public-key " + cli.tmp.file("p.json"))
              .exitCode == 0);

  // the plaintext listener is really insecure here: the CA's bind is refused
  const CommandResult refused =
      cli.run("ca provision-pop" + cli.state() + " --subject " + cli.q(dn) + cli.conn());
  CHECK(refused.exitCode != 0);
  CHECK(refused.output.find("CONFIDENTIALITY_REQUIRED") != std::string::npos);

  // over TLS with a pinned fingerprint everything works
  REQUIRE(cli.run("ca provision-pop" + cli.state() + " --subject " + cli.q(dn) +
                  cli.tlsConn())
              .exitCode == 0);
  REQUIRE(cli.run("client activate --subject " + cli.q(dn) + " --key " +
                  cli.tmp.file("k.json") + " --variant full" + cli.tlsConn())
              .exitCode == 0);
  const CommandResult verified = cli.run("ca verify-activation" + cli.state() +
                                         " --subject " + cli.q(dn) + cli.tlsConn());
  CHECK(verified.exitCode == 0);
  CHECK(verified.output.find("activated=true") != std::string::npos);

  // a wrong pin is rejected client-side
  const CommandResult badPin = cli.run(
      "ca verify-activation" + cli.state() + " --subject " + cli.q(dn) + " --address " +
      cli.tlsAddress + " --tls --pin " + std::string(64, 'f'));
  CHECK(badPin.exitCode != 0);

  cli.server->terminate();
}

TEST_CASE("cli end-to-end") {
  Cli cli;
  cli.startServer(/*assumeSecure=*/true);

  // -------- PoP happy path (full variant) ------------------------------
  REQUIRE(cli.run("client keygen --out " + cli.tmp.file("alice-key.json") +
                  " --pub-out " + cli.tmp.file("alice-pub.json"))
              .exitCode == 0);
  REQUIRE(cli.run("ca register" + cli.state() + " --subject " + cli.q(kAliceDn) +
                  " --variant full --public-key " + cli.tmp.file("alice-pub.json"))
              .exitCode == 0);
  const CommandResult provision =
      cli.run("ca provision-pop" + cli.state() + " --subject " + cli.q(kAliceDn) +
              " --now 1000000" + cli.conn());
  REQUIRE(provision.exitCode == 0);
  CHECK(provision.output.find("serial=") != std::string::npos);

  // before activation
  const CommandResult before = cli.run("ca verify-activation" + cli.state() +
                                       " --subject " + cli.q(kAliceDn) + cli.conn());
  CHECK(before.exitCode == 0);
  CHECK(before.output.find("activated=false") != std::string::npos);

  const CommandResult activate =
      cli.run("client activate --subject " + cli.q(kAliceDn) + " --key " +
              cli.tmp.file("alice-key.json") + " --variant full" + cli.conn() +
              " --cert-out " + cli.tmp.file("alice-cert.json"));
  REQUIRE(activate.exitCode == 0);
  CHECK(activate.output.find("activated subject=") != std::string::npos);

  const CommandResult verified = cli.run("ca verify-activation" + cli.state() +
                                         " --subject " + cli.q(kAliceDn) + cli.conn());
  CHECK(verified.exitCode == 0);
  CHECK(verified.output.find("activated=true") != std::string::npos);

  const CommandResult verifiedJson =
      cli.run("--json ca verify-activation" + cli.state() + " --subject " +
              cli.q(kAliceDn) + cli.conn());
  CHECK(verifiedJson.output.find("{\"activated\":true}") != std::string::npos);

  // -------- wrong key: stable token, nonzero exit ----------------------
  REQUIRE(cli.run("client keygen --out " + cli.tmp.file("mallory-key.json")).exitCode == 0);
  REQUIRE(cli.run("client keygen --out " + cli.tmp.file("bob-key.json") + " --pub-out " +
                  cli.tmp.file("bob-pub.json"))
              .exitCode == 0);
  REQUIRE(cli.run("ca register" + cli.state() + " --subject " + cli.q(kBobDn) +
                  " --variant full --public-key " + cli.tmp.file("bob-pub.json"))
              .exitCode == 0);
  REQUIRE(cli.run("ca provision-pop" + cli.state() + " --subject " + cli.q(kBobDn) +
                  " --now 2000000" + cli.conn())
              .exitCode == 0);
  const CommandResult wrongKey =
      cli.run("client activate --subject " + cli.q(kBobDn) + " --key " +
              cli.tmp.file("mallory-key.json") + " --variant full" + cli.conn());
  CHECK(wrongKey.exitCode != 0);
  CHECK(wrongKey.output.find("DECRYPT_FAILED") != std::string::npos);

  // -------- policy clock: bob (unactivated) is deleted past 3 days -----
  const CommandResult early =
      cli.run("ca policy-run" + cli.state() + " --now 2259200" + cli.conn());
  CHECK(early.exitCode == 0);
  CHECK(early.output.find("DELETED") == std::string::npos);

  const CommandResult policy =
      cli.run("ca policy-run" + cli.state() + " --now 2259201" + cli.conn());
  CHECK(policy.exitCode == 0);
  CHECK(policy.output.find(std::string("DELETED ") + kBobDn) != std::string::npos);

  const CommandResult gone = cli.run("ca verify-activation" + cli.state() + " --subject " +
                                     cli.q(kBobDn) + cli.conn());
  CHECK(gone.exitCode != 0);
  CHECK(gone.output.find("NO_SUCH_OBJECT") != std::string::npos);

  // -------- PSE delivery ----------------------------------------------
  REQUIRE(cli.run("ca provision-pse" + cli.state() + " --subject " + cli.q(kCarolDn) +
                  " --registration-password reg-pw-7 --pse-password pse-pw-7" +
                  cli.conn())
              .exitCode == 0);
  const CommandResult fetch = cli.run(
      "client fetch-pse --subject " + cli.q(kCarolDn) +
      " --registration-password reg-pw-7 --pse-password pse-pw-7" + cli.conn() +
      " --save-container " + cli.tmp.file("carol-pse.json"));
  REQUIRE(fetch.exitCode == 0);
  CHECK(fetch.output.find("certificates=1") != std::string::npos);
  CHECK(!testsupport::readFileText(cli.tmp.file("carol-pse.json")).empty());

  const CommandResult wrongPse =
      cli.run("client fetch-pse --subject " + cli.q(kCarolDn) +
              " --registration-password reg-pw-7 --pse-password nope" + cli.conn());
  CHECK(wrongPse.exitCode != 0);
  CHECK(wrongPse.output.find("WRONG_PASSWORD") != std::string::npos);

  // -------- snapshot export/import round-trip --------------------------
  const CommandResult exported =
      cli.run("dir export --snapshot " + cli.tmp.file("snap.ndjson") + " --out " +
              cli.tmp.file("export1.ndjson"));
  REQUIRE(exported.exitCode == 0);
  REQUIRE(cli.run("dir import --in " + cli.tmp.file("export1.ndjson") + " --snapshot " +
                  cli.tmp.file("imported.ndjson"))
              .exitCode == 0);
  REQUIRE(cli.run("dir export --snapshot " + cli.tmp.file("imported.ndjson") + " --out " +
                  cli.tmp.file("export2.ndjson"))
              .exitCode == 0);
  CHECK(testsupport::readFileText(cli.tmp.file("export1.ndjson")) ==
        testsupport::readFileText(cli.tmp.file("export2.ndjson")));
  CHECK(!testsupport::readFileText(cli.tmp.file("export1.ndjson")).empty());

  cli.server->terminate();
}
