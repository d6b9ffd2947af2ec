// Operator and end-user command line for the directory-mediated PKI flows:
// a directory server, CA provisioning/policy commands, and the client agent.

#include <CLI11.hpp>

#include <sys/stat.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "pkidir/agent/agent.hpp"
#include "pkidir/ca/workflow.hpp"
#include "pkidir/crypto/keys.hpp"
#include "pkidir/directory/directory.hpp"
#include "pkidir/directory/password.hpp"
#include "pkidir/session.hpp"
#include "pkidir/util/json.hpp"
#include "pkidir/wire/client.hpp"
#include "pkidir/wire/server.hpp"

namespace {

using pkidir::util::Json;

std::atomic<bool> gStop{false};

void onSignal(int) { gStop.store(true); }

struct CliError : std::runtime_error {
  CliError(std::string tokenIn, const std::string& what)
      : std::runtime_error(what), token(std::move(tokenIn)) {}
  std::string token;
};

const char* tokenForCode(pkidir::ResultCode code) {
  using pkidir::ResultCode;
  switch (code) {
    case ResultCode::confidentialityRequired: return "CONFIDENTIALITY_REQUIRED";
    case ResultCode::noSuchObject: return "NO_SUCH_OBJECT";
    case ResultCode::invalidCredentials: return "INVALID_CREDENTIALS";
    case ResultCode::insufficientAccessRights: return "ACCESS_DENIED";
    case ResultCode::unwillingToPerform: return "UNWILLING_TO_PERFORM";
    case ResultCode::schemaViolation: return "SCHEMA_VIOLATION";
    case ResultCode::entryAlreadyExists: return "ALREADY_EXISTS";
    case ResultCode::protocolError: return "PROTOCOL_ERROR";
    case ResultCode::success: return "OK";
  }
  return "PROTOCOL_ERROR";
}

Json readJsonFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("IO_ERROR", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return pkidir::util::parseJson(buf.str());
}

void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError("IO_ERROR", "cannot write " + path);
  out << text;
}

struct ConnectionOptions {
  std::string address = "127.0.0.1:3893";
  bool useTls = false;
  std::string pin;  // sha256 hex fingerprint

  void attach(CLI::App* cmd) {
    cmd->add_option("--address", address, "directory server host:port");
    cmd->add_flag("--tls", useTls, "connect over TLS");
    cmd->add_option("--pin", pin, "required server certificate SHA-256 fingerprint (hex)");
  }

  pkidir::wire::Client connect() const {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos) throw CliError("USAGE", "bad --address, want host:port");
    pkidir::wire::ClientConfig config;
    config.host = address.substr(0, colon);
    config.port = static_cast<std::uint16_t>(std::stoi(address.substr(colon + 1)));
    config.useTls = useTls;
    if (!pin.empty()) config.pinSha256Hex = pin;
    return pkidir::wire::Client::connect(config);
  }
};

struct CaPaths {
  std::string stateDir;

  std::string statePath() const { return stateDir + "/ca-state.ndjson"; }
  std::string auditPath() const { return stateDir + "/audit.log"; }
  std::string configPath() const { return stateDir + "/ca-config.json"; }

  pkidir::ca::CaEngine load() const {
    const Json cfg = readJsonFile(configPath());
    pkidir::ca::CaConfig config;
    config.statePath = statePath();
    config.auditPath = auditPath();
    config.adminDn = pkidir::util::getString(cfg, "adminDn");
    config.adminPassword = pkidir::util::getString(cfg, "adminPassword");
    return pkidir::ca::CaEngine::load(config);
  }

  /// Policy defaults recorded at init; command-line flags override them.
  pkidir::ca::PolicyConfig policyDefaults() const {
    pkidir::ca::PolicyConfig policy;
    const Json cfg = readJsonFile(configPath());
    if (cfg.contains("policy")) {
      const Json& p = cfg.at("policy");
      if (p.contains("activationDeadlineSeconds")) {
        policy.activationDeadlineSeconds =
            pkidir::util::getInt64(p, "activationDeadlineSeconds");
      }
      if (p.contains("deletePasswordAfterActivation")) {
        policy.deletePasswordAfterActivation =
            pkidir::util::getBool(p, "deletePasswordAfterActivation");
      }
    }
    return policy;
  }
};

std::int64_t nowOrOverride(std::int64_t overrideValue) {
  return overrideValue > 0 ? overrideValue : pkidir::util::nowUtcSeconds();
}

void emit(bool asJson, const Json& json, const std::string& text) {
  if (asJson) {
    std::cout << pkidir::util::canonicalDump(json) << "\n";
  } else {
    std::cout << text << "\n";
  }
}

struct ServeOverrides {
  std::string host, snapshot, adminDn, adminPasswordHash, tlsCert, tlsKey;
  std::int64_t plainPort = -2;  // -2 = not given, -1 = disabled
  std::int64_t tlsPort = -2;
};

int runServe(const std::string& configPath, bool assumeSecure, bool jsonOut,
             const ServeOverrides& over) {
  const Json cfg = configPath.empty() ? Json::object() : readJsonFile(configPath);
  auto stringOr = [&](const char* key, const std::string& flag,
                      const std::string& fallback) {
    if (!flag.empty()) return flag;
    return cfg.contains(key) ? pkidir::util::getString(cfg, key) : fallback;
  };

  pkidir::dir::AdminIdentity admin{
      pkidir::dir::DistinguishedName::parse(
          stringOr("adminDn", over.adminDn, "cn=admin,o=directory-pki")),
      stringOr("adminPasswordHash", over.adminPasswordHash, "")};
  pkidir::dir::Directory directory(std::move(admin));
  pkidir::ca::configureAcls(directory);

  const std::string snapshot = stringOr("snapshotPath", over.snapshot, "");
  if (!snapshot.empty()) directory.setPersistPath(snapshot);

  pkidir::wire::ServerConfig serverConfig;
  serverConfig.host = stringOr("host", over.host, "127.0.0.1");
  std::int64_t plainPort = 3893;
  if (cfg.contains("plainPort")) plainPort = pkidir::util::getInt64(cfg, "plainPort");
  if (over.plainPort != -2) plainPort = over.plainPort;
  serverConfig.plainPort =
      plainPort < 0 ? std::nullopt
                    : std::optional<std::uint16_t>(static_cast<std::uint16_t>(plainPort));
  serverConfig.assumeSecure = assumeSecure || (cfg.contains("assumeSecure") &&
                                               pkidir::util::getBool(cfg, "assumeSecure"));
  serverConfig.tlsCertPath = stringOr("tlsCertPath", over.tlsCert, "");
  serverConfig.tlsKeyPath = stringOr("tlsKeyPath", over.tlsKey, "");
  if (!serverConfig.tlsCertPath.empty()) {
    std::int64_t tlsPort = 6363;
    if (cfg.contains("tlsPort")) tlsPort = pkidir::util::getInt64(cfg, "tlsPort");
    if (over.tlsPort != -2) tlsPort = over.tlsPort;
    serverConfig.tlsPort = static_cast<std::uint16_t>(tlsPort);
  }

  pkidir::wire::Server server(directory, serverConfig);
  server.start();

  Json info;
  info["event"] = "listening";
  info["plainPort"] = server.plainPort();
  info["tlsPort"] = server.tlsPort();
  emit(jsonOut, info,
       "listening plain=" + std::to_string(server.plainPort()) +
           " tls=" + std::to_string(server.tlsPort()));
  std::cout.flush();

  std::signal(SIGINT, onSignal);
  std::signal(SIGTERM, onSignal);
  while (!gStop.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"directory-mediated PKI: directory server, CA workflow, client agent"};
  app.require_subcommand(1);
  bool jsonOut = false;
  app.add_flag("--json", jsonOut, "machine-readable output, one JSON object per line");

  // ---- serve ----------------------------------------------------------
  auto* serve = app.add_subcommand("serve", "run the directory server");
  std::string serveConfig;
  bool assumeSecure = false;
  ServeOverrides over;
  serve->add_option("--config", serveConfig, "server config JSON file");
  serve->add_flag("--assume-secure", assumeSecure,
                  "treat plaintext connections as secure (test mode)");
  serve->add_option("--host", over.host, "listen address (overrides config)");
  serve->add_option("--plain-port", over.plainPort,
                    "plaintext port; -1 disables (overrides config)");
  serve->add_option("--tls-port", over.tlsPort, "TLS port (overrides config)");
  serve->add_option("--tls-cert", over.tlsCert, "TLS certificate PEM (overrides config)");
  serve->add_option("--tls-key", over.tlsKey, "TLS key PEM (overrides config)");
  serve->add_option("--snapshot", over.snapshot, "snapshot path (overrides config)");
  serve->add_option("--admin-dn", over.adminDn, "admin DN (overrides config)");
  serve->add_option("--admin-password-hash", over.adminPasswordHash,
                    "admin password hash (overrides config)");

  // ---- ca -------------------------------------------------------------
  auto* ca = app.add_subcommand("ca", "certification authority workflow");
  ca->require_subcommand(1);
  CaPaths caPaths;
  std::int64_t deadlineSeconds = 259200;
  bool deletePasswordAfterActivation = false;

  auto* caInit = ca->add_subcommand("init", "create CA state and keys");
  std::string caDnText = "cn=pki-ca,o=directory-pki";
  std::string adminDnText = "cn=admin,o=directory-pki";
  std::string adminPassword;
  std::string emitServerConfig;
  std::string emitSnapshot;
  std::string pubOut;
  std::int64_t cfgPlainPort = 3893;
  std::int64_t cfgTlsPort = -1;
  std::string cfgTlsCert, cfgTlsKey, cfgHost = "127.0.0.1";
  caInit->add_option("--state-dir", caPaths.stateDir)->required();
  caInit->add_option("--ca-dn", caDnText, "CA distinguished name");
  caInit->add_option("--admin-dn", adminDnText, "directory admin DN");
  caInit->add_option("--admin-password", adminPassword, "directory admin password")
      ->required();
  caInit->add_option("--emit-server-config", emitServerConfig,
                     "also write a ready server config JSON here");
  caInit->add_option("--snapshot", emitSnapshot, "snapshotPath for the emitted config");
  caInit->add_option("--host", cfgHost, "listen host for the emitted config");
  caInit->add_option("--plain-port", cfgPlainPort, "plaintext port for the emitted config");
  caInit->add_option("--tls-port", cfgTlsPort, "TLS port for the emitted config");
  caInit->add_option("--tls-cert", cfgTlsCert, "TLS certificate path for the emitted config");
  caInit->add_option("--tls-key", cfgTlsKey, "TLS key path for the emitted config");
  caInit->add_option("--pub-out", pubOut, "write the CA public key JSON here");
  caInit->add_option("--deadline-seconds", deadlineSeconds,
                     "default activation deadline recorded in the CA config");
  caInit->add_flag("--delete-password-after-activation", deletePasswordAfterActivation,
                   "default policy flag recorded in the CA config");

  auto* caRegister = ca->add_subcommand("register", "record a registration request");
  std::string subjectText, publicKeyPath, variantText = "full";
  std::int64_t nowOverride = 0;
  caRegister->add_option("--state-dir", caPaths.stateDir)->required();
  caRegister->add_option("--subject", subjectText)->required();
  caRegister->add_option("--variant", variantText, "full | half | secret");
  caRegister->add_option("--public-key", publicKeyPath,
                         "registrant public key JSON (PoP flow)");
  caRegister->add_option("--now", nowOverride, "clock override (UTC seconds)");

  auto* caProvisionPop = ca->add_subcommand("provision-pop", "provision a PoP entry");
  ConnectionOptions popConn;
  std::int64_t validitySeconds = 31536000;
  caProvisionPop->add_option("--state-dir", caPaths.stateDir)->required();
  caProvisionPop->add_option("--subject", subjectText)->required();
  caProvisionPop->add_option("--variant", variantText,
                             "must match the recorded registration when given");
  caProvisionPop->add_option("--deadline-seconds", deadlineSeconds,
                             "activation deadline (default 259200 = 3 days)");
  caProvisionPop->add_option("--validity-seconds", validitySeconds);
  caProvisionPop->add_option("--now", nowOverride, "clock override (UTC seconds)");
  popConn.attach(caProvisionPop);

  auto* caProvisionPse = ca->add_subcommand("provision-pse", "provision a PSE entry");
  ConnectionOptions pseConn;
  std::string registrationPassword, psePassword;
  caProvisionPse->add_option("--state-dir", caPaths.stateDir)->required();
  caProvisionPse->add_option("--subject", subjectText)->required();
  caProvisionPse->add_option("--registration-password", registrationPassword)->required();
  caProvisionPse->add_option("--pse-password", psePassword)->required();
  caProvisionPse->add_option("--validity-seconds", validitySeconds);
  caProvisionPse->add_option("--now", nowOverride, "clock override (UTC seconds)");
  pseConn.attach(caProvisionPse);

  auto* caPolicyRun = ca->add_subcommand("policy-run", "enforce the activation policy");
  ConnectionOptions policyConn;
  caPolicyRun->add_option("--state-dir", caPaths.stateDir)->required();
  caPolicyRun->add_option("--now", nowOverride, "clock override (UTC seconds)");
  caPolicyRun->add_flag("--delete-password-after-activation",
                        deletePasswordAfterActivation,
                        "remove userPassword from activated entries");
  policyConn.attach(caPolicyRun);

  auto* caVerify = ca->add_subcommand("verify-activation", "check PoP completion");
  ConnectionOptions verifyConn;
  caVerify->add_option("--state-dir", caPaths.stateDir)->required();
  caVerify->add_option("--subject", subjectText)->required();
  verifyConn.attach(caVerify);

  // ---- client ----------------------------------------------------------
  auto* client = app.add_subcommand("client", "end-entity agent");
  client->require_subcommand(1);

  auto* keygen = client->add_subcommand("keygen", "generate an RSA-2048 key pair");
  std::string keyOut, keyPubOut;
  keygen->add_option("--out", keyOut, "private key JSON path")->required();
  keygen->add_option("--pub-out", keyPubOut, "public key JSON path");

  auto* activate = client->add_subcommand("activate", "complete PoP and activate");
  ConnectionOptions activateConn;
  std::string keyPath, sharedSecret, certOut;
  activate->add_option("--subject", subjectText)->required();
  activate->add_option("--key", keyPath, "private key JSON")->required();
  activate->add_option("--variant", variantText, "full | half | secret");
  activate->add_option("--shared-secret", sharedSecret,
                       "registration secret (half/secret variants)");
  activate->add_option("--cert-out", certOut, "write the activated certificate here");
  activateConn.attach(activate);

  auto* fetchPse = client->add_subcommand("fetch-pse", "download and open the own PSE");
  ConnectionOptions fetchConn;
  std::string saveContainer;
  fetchPse->add_option("--subject", subjectText)->required();
  fetchPse->add_option("--registration-password", registrationPassword)->required();
  fetchPse->add_option("--pse-password", psePassword)->required();
  fetchPse->add_option("--save-container", saveContainer,
                       "keep the (still password-protected) container locally");
  fetchConn.attach(fetchPse);

  // ---- dir -------------------------------------------------------------
  auto* dirCmd = app.add_subcommand("dir", "snapshot maintenance");
  dirCmd->require_subcommand(1);
  auto* dirExport = dirCmd->add_subcommand("export", "validate + canonicalize a snapshot");
  std::string snapshotPath, outPath, inPath;
  dirExport->add_option("--snapshot", snapshotPath)->required();
  dirExport->add_option("--out", outPath)->required();
  auto* dirImport = dirCmd->add_subcommand("import", "install a snapshot file");
  dirImport->add_option("--in", inPath)->required();
  dirImport->add_option("--snapshot", snapshotPath)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      return runServe(serveConfig, assumeSecure, jsonOut, over);
    }

    if (caInit->parsed()) {
      std::filesystem::create_directories(caPaths.stateDir);
      pkidir::ca::CaConfig config;
      config.statePath = caPaths.statePath();
      config.auditPath = caPaths.auditPath();
      config.adminDn = adminDnText;
      config.adminPassword = adminPassword;
      auto engine = pkidir::ca::CaEngine::create(
          pkidir::dir::DistinguishedName::parse(caDnText), config);

      Json caConfig;
      caConfig["adminDn"] = adminDnText;
      caConfig["adminPassword"] = adminPassword;
      caConfig["policy"] = Json{
          {"activationDeadlineSeconds", deadlineSeconds},
          {"deletePasswordAfterActivation", deletePasswordAfterActivation}};
      writeTextFile(caPaths.configPath(), pkidir::util::canonicalDump(caConfig) + "\n");

      if (!pubOut.empty()) {
        writeTextFile(pubOut,
                      pkidir::util::canonicalDump(engine.caPublicKey().toJson()) + "\n");
      }
      if (!emitServerConfig.empty()) {
        const auto hash =
            pkidir::dir::hashPassword(pkidir::util::toBytes(adminPassword)).render();
        Json server;
        server["adminDn"] = adminDnText;
        server["adminPasswordHash"] = hash;
        server["host"] = cfgHost;
        server["plainPort"] = cfgPlainPort;
        if (cfgTlsPort >= 0) {
          server["tlsPort"] = cfgTlsPort;
          server["tlsCertPath"] = cfgTlsCert;
          server["tlsKeyPath"] = cfgTlsKey;
        }
        if (!emitSnapshot.empty()) server["snapshotPath"] = emitSnapshot;
        writeTextFile(emitServerConfig, pkidir::util::canonicalDump(server) + "\n");
      }
      Json out;
      out["caDn"] = caDnText;
      out["stateDir"] = caPaths.stateDir;
      emit(jsonOut, out, "initialized ca=" + caDnText + " state=" + caPaths.stateDir);
      return 0;
    }

    if (caRegister->parsed()) {
      auto engine = caPaths.load();
      const auto variant = pkidir::ca::popVariantFromName(variantText);
      if (!variant) throw CliError("USAGE", "unknown variant: " + variantText);
      std::optional<pkidir::crypto::PublicKey> publicKey;
      if (!publicKeyPath.empty()) {
        publicKey = pkidir::crypto::PublicKey::fromJson(readJsonFile(publicKeyPath));
      }
      const auto reg = engine.registerSubject(
          pkidir::dir::DistinguishedName::parse(subjectText), std::move(publicKey),
          *variant, nowOrOverride(nowOverride));
      Json out;
      out["sharedSecret"] = reg.sharedSecret ? Json(*reg.sharedSecret) : Json(nullptr);
      out["subject"] = reg.subject.render();
      out["variant"] = std::string(pkidir::ca::popVariantName(reg.variant));
      std::string text = "registered subject=" + reg.subject.render() +
                         " variant=" + std::string(pkidir::ca::popVariantName(reg.variant));
      if (reg.sharedSecret) text += " shared-secret=" + *reg.sharedSecret;
      emit(jsonOut, out, text);
      return 0;
    }

    if (caProvisionPop->parsed()) {
      auto engine = caPaths.load();
      const auto subject = pkidir::dir::DistinguishedName::parse(subjectText);
      const auto reg = engine.registrationFor(subject);
      if (!reg) throw CliError("NO_SUCH_OBJECT", "subject is not registered: " + subjectText);
      if (caProvisionPop->count("--variant") > 0 &&
          pkidir::ca::popVariantFromName(variantText) != reg->variant) {
        throw CliError("USAGE", "registered variant is " +
                                    std::string(pkidir::ca::popVariantName(reg->variant)));
      }
      pkidir::ca::PolicyConfig policy = caPaths.policyDefaults();
      if (caProvisionPop->count("--deadline-seconds") > 0) {
        policy.activationDeadlineSeconds = deadlineSeconds;
      }
      pkidir::wire::WireSession session(popConn.connect());
      const auto cert = engine.provisionPopEntry(session, *reg, policy,
                                                 nowOrOverride(nowOverride), validitySeconds);
      session.client().unbind();
      Json out;
      out["serial"] = cert.serial;
      out["subject"] = subject.render();
      emit(jsonOut, out,
           "provisioned subject=" + subject.render() +
               " serial=" + std::to_string(cert.serial));
      return 0;
    }

    if (caProvisionPse->parsed()) {
      auto engine = caPaths.load();
      const auto subject = pkidir::dir::DistinguishedName::parse(subjectText);
      pkidir::wire::WireSession session(pseConn.connect());
      const auto cert =
          engine.provisionPseEntry(session, subject, registrationPassword, psePassword,
                                   nowOrOverride(nowOverride), validitySeconds);
      session.client().unbind();
      Json out;
      out["serial"] = cert.serial;
      out["subject"] = subject.render();
      emit(jsonOut, out,
           "provisioned subject=" + subject.render() +
               " serial=" + std::to_string(cert.serial));
      return 0;
    }

    if (caPolicyRun->parsed()) {
      auto engine = caPaths.load();
      pkidir::ca::PolicyConfig policy = caPaths.policyDefaults();
      if (deletePasswordAfterActivation) policy.deletePasswordAfterActivation = true;
      pkidir::wire::WireSession session(policyConn.connect());
      const auto actions =
          engine.enforcePolicy(session, nowOrOverride(nowOverride), policy);
      session.client().unbind();
      for (const auto& action : actions) {
        if (jsonOut) {
          const auto space = action.find(' ');
          Json out;
          out["action"] = action.substr(0, space);
          out["dn"] = action.substr(space + 1);
          std::cout << pkidir::util::canonicalDump(out) << "\n";
        } else {
          std::cout << action << "\n";
        }
      }
      return 0;
    }

    if (caVerify->parsed()) {
      auto engine = caPaths.load();
      pkidir::wire::WireSession session(verifyConn.connect());
      const bool activated = engine.verifyActivation(
          session, pkidir::dir::DistinguishedName::parse(subjectText));
      session.client().unbind();
      Json out;
      out["activated"] = activated;
      emit(jsonOut, out, std::string("activated=") + (activated ? "true" : "false"));
      return 0;
    }

    if (keygen->parsed()) {
      const auto keyPair = pkidir::crypto::generateKeyPair();
      writeTextFile(keyOut,
                    pkidir::util::canonicalDump(keyPair.privateKey.toJson()) + "\n");
      ::chmod(keyOut.c_str(), 0600);
      if (!keyPubOut.empty()) {
        writeTextFile(keyPubOut,
                      pkidir::util::canonicalDump(keyPair.publicKey.toJson()) + "\n");
      }
      Json out;
      out["key"] = keyOut;
      emit(jsonOut, out, "keypair written to " + keyOut);
      return 0;
    }

    if (activate->parsed()) {
      const auto variant = pkidir::ca::popVariantFromName(variantText);
      if (!variant) throw CliError("USAGE", "unknown variant: " + variantText);
      pkidir::agent::ActivationInput input{
          pkidir::dir::DistinguishedName::parse(subjectText),
          pkidir::crypto::PrivateKey::fromJson(readJsonFile(keyPath)),
          *variant,
          sharedSecret.empty() ? std::nullopt : std::optional(sharedSecret)};
      pkidir::wire::WireSession session(activateConn.connect());
      const auto cert = pkidir::agent::completePop(session, input);
      session.client().unbind();
      if (!certOut.empty()) {
        writeTextFile(certOut, pkidir::util::toString(cert.encode()) + "\n");
      }
      Json out;
      out["serial"] = cert.serial;
      out["subject"] = cert.subject.render();
      emit(jsonOut, out,
           "activated subject=" + cert.subject.render() +
               " serial=" + std::to_string(cert.serial));
      return 0;
    }

    if (fetchPse->parsed()) {
      pkidir::wire::WireSession session(fetchConn.connect());
      const auto bundle = pkidir::agent::downloadPse(session, subjectText,
                                                     registrationPassword, psePassword);
      if (!saveContainer.empty()) {
        // keep the sealed container (still password-protected), not the keys
        auto [code, entry] = session.search(subjectText);
        if (code == pkidir::ResultCode::success && entry) {
          if (const auto* values = entry->attribute(pkidir::dir::kAttrUserPkcs12)) {
            writeTextFile(saveContainer,
                          pkidir::util::toString(values->front().octets()) + "\n");
          }
        }
      }
      session.client().unbind();
      Json out;
      out["certificates"] = static_cast<std::int64_t>(bundle.certificates.size());
      out["serial"] = bundle.certificates.empty() ? 0 : bundle.certificates.front().serial;
      out["subject"] = subjectText;
      emit(jsonOut, out,
           "pse subject=" + subjectText +
               " certificates=" + std::to_string(bundle.certificates.size()));
      return 0;
    }

    if (dirExport->parsed() || dirImport->parsed()) {
      pkidir::dir::Directory scratch(pkidir::dir::AdminIdentity{
          pkidir::dir::DistinguishedName::parse("cn=admin,o=directory-pki"), ""});
      if (dirExport->parsed()) {
        scratch.importSnapshot(std::filesystem::path(snapshotPath));
        scratch.exportSnapshot(std::filesystem::path(outPath));
        emit(jsonOut, Json{{"entries", static_cast<std::int64_t>(scratch.entryCount())}},
             "exported entries=" + std::to_string(scratch.entryCount()));
      } else {
        scratch.importSnapshot(std::filesystem::path(inPath));
        scratch.exportSnapshot(std::filesystem::path(snapshotPath));
        emit(jsonOut, Json{{"entries", static_cast<std::int64_t>(scratch.entryCount())}},
             "imported entries=" + std::to_string(scratch.entryCount()));
      }
      return 0;
    }
  } catch (const CliError& e) {
    std::cerr << e.token << ": " << e.what() << "\n";
    return 1;
  } catch (const pkidir::agent::AgentError& e) {
    std::cerr << pkidir::agent::agentErrorToken(e.kind()) << ": " << e.what() << "\n";
    return 1;
  } catch (const pkidir::DirectoryError& e) {
    std::cerr << tokenForCode(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const pkidir::crypto::CryptoError& e) {
    const char* token =
        e.kind() == pkidir::crypto::CryptoError::Kind::wrongPassword ? "WRONG_PASSWORD"
        : e.kind() == pkidir::crypto::CryptoError::Kind::decryptFailed ? "DECRYPT_FAILED"
                                                                       : "CRYPTO_ERROR";
    std::cerr << token << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ERROR: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
