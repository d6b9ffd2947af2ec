#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pkidir/wire/message.hpp"
#include "support/test_support.hpp"

using namespace pkidir;
using namespace pkidir::wire;
using pkidir::dir::AttributeValue;
using pkidir::util::toBytes;

namespace {

RequestMessage randomRequest(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> opDist(0, 5);
  std::uniform_int_distribution<std::int64_t> idDist(1, 1 << 30);
  RequestMessage msg;
  msg.id = idDist(rng);
  msg.dn = "cn=" + testsupport::randomTestAscii(6) + ",ou=people,o=pki";
  switch (opDist(rng)) {
    case 0:
      msg.params = BindParams{testsupport::randomTestBytes(16)};
      break;
    case 1: {
      AddParams p;
      p.objectClasses = {"top", "inetOrgPerson"};
      p.attributes.emplace(
          "userEncryptedPassword",
          std::vector<AttributeValue>{AttributeValue::binary(testsupport::randomTestBytes(24))});
      p.attributes.emplace(
          "cn", std::vector<AttributeValue>{AttributeValue::text(testsupport::randomTestAscii(8))});
      msg.params = std::move(p);
      break;
    }
    case 2:
      msg.params = SearchParams{};
      break;
    case 3: {
      std::uniform_int_distribution<int> coin(0, 1);
      ModifyParams p;
      p.attribute = "userCertificate";
      if (coin(rng) == 0) {
        p.value = AttributeValue::binary(testsupport::randomTestBytes(32));
      }
      msg.params = std::move(p);
      break;
    }
    case 4:
      msg.params = DeleteParams{};
      break;
    default:
      msg.dn.clear();
      msg.params = UnbindParams{};
      break;
  }
  return msg;
}

}  // namespace

TEST_CASE("minimal unbind line is exactly the canonical bytes") {
  RequestMessage unbind;
  unbind.id = 1;
  unbind.params = UnbindParams{};
  CHECK(encodeMessage(unbind) == "{\"id\":1,\"op\":\"unbind\"}\n");
  const RequestMessage decoded = decodeRequest("{\"id\":1,\"op\":\"unbind\"}\n");
  CHECK(decoded == unbind);
}

TEST_CASE("bind with binary password round-trips") {
  RequestMessage msg;
  msg.id = 42;
  msg.dn = "cn=alice,ou=people,o=pki";
  msg.params = BindParams{pkidir::util::Bytes{0x00, 0xff, 0x10, 0x7f}};
  const std::string line = encodeMessage(msg);
  CHECK(decodeRequest(line) == msg);
}

TEST_CASE("decode(encode(m)) == m and encode-decode-encode is byte-identical") {
  auto& rng = testsupport::testRng();
  for (int i = 0; i < 300; ++i) {
    const RequestMessage msg = randomRequest(rng);
    const std::string once = encodeMessage(msg);
    CAPTURE(once);
    const RequestMessage decoded = decodeRequest(once);
    CHECK(decoded == msg);
    CHECK(encodeMessage(decoded) == once);
  }
}

TEST_CASE("responses round-trip, including entries") {
  ResponseMessage ok;
  ok.id = 9;
  ok.code = ResultCode::success;
  dir::DirectoryEntry entry(dir::DistinguishedName::parse("cn=a,ou=people,o=pki"));
  entry.addObjectClass("top");
  entry.setAttribute("userCertificate",
                     {AttributeValue::binary(toBytes("certbytes"))});
  ok.entry = entry;
  const std::string line = encodeMessage(ok);
  CHECK(decodeResponse(line) == ok);
  CHECK(encodeMessage(decodeResponse(line)) == line);

  ResponseMessage err;
  err.id = 10;
  err.code = ResultCode::insufficientAccessRights;
  const std::string errLine = encodeMessage(err);
  CHECK(errLine == "{\"code\":50,\"id\":10,\"status\":\"err\"}\n");
  CHECK(decodeResponse(errLine) == err);
}

TEST_CASE("strict decoding rejects bad requests") {
  CHECK_THROWS_AS(decodeRequest("{\"id\":1,\"op\":\"unbind\"}"), CodecError);  // no LF
  CHECK_THROWS_AS(decodeRequest("{\"id\":1,\n\"op\":\"unbind\"}\n"), CodecError);
  CHECK_THROWS_AS(decodeRequest("\n"), CodecError);
  CHECK_THROWS_AS(decodeRequest("[]\n"), CodecError);
  CHECK_THROWS_AS(decodeRequest("{\"id\":1}\n"), CodecError);  // missing op
  CHECK_THROWS_AS(decodeRequest("{\"id\":1,\"op\":\"nope\"}\n"), CodecError);
  CHECK_THROWS_AS(decodeRequest("{\"id\":0,\"op\":\"unbind\"}\n"), CodecError);
  CHECK_THROWS_AS(decodeRequest("{\"id\":-5,\"op\":\"unbind\"}\n"), CodecError);
  CHECK_THROWS_AS(decodeRequest("{\"id\":1.5,\"op\":\"unbind\"}\n"), CodecError);
  // unknown fields rejected
  CHECK_THROWS_AS(decodeRequest("{\"extra\":1,\"id\":1,\"op\":\"unbind\"}\n"), CodecError);
  CHECK_THROWS_AS(decodeRequest("{\"dn\":\"cn=a\",\"id\":1,\"op\":\"unbind\"}\n"),
                  CodecError);
  // payload shape enforced per op
  CHECK_THROWS_AS(decodeRequest("{\"dn\":\"\",\"id\":1,\"op\":\"bind\"}\n"), CodecError);
  CHECK_THROWS_AS(
      decodeRequest("{\"dn\":\"\",\"id\":1,\"op\":\"bind\",\"payload\":{}}\n"),
      CodecError);
  CHECK_THROWS_AS(decodeRequest("{\"dn\":\"\",\"id\":1,\"op\":\"bind\",\"payload\":"
                                "{\"password\":\"@@@\"}}\n"),
                  CodecError);
  CHECK_THROWS_AS(decodeRequest("{\"dn\":\"\",\"id\":1,\"op\":\"search\",\"payload\":"
                                "{}}\n"),
                  CodecError);
  CHECK_THROWS_AS(
      decodeRequest("{\"dn\":\"\",\"id\":1,\"op\":\"modify\",\"payload\":"
                    "{\"attribute\":\"a\",\"delete\":false}}\n"),
      CodecError);
  // invalid UTF-8 in the line
  std::string bad = "{\"dn\":\"\xff\xfe\",\"id\":1,\"op\":\"search\"}\n";
  CHECK_THROWS_AS(decodeRequest(bad), CodecError);
}

TEST_CASE("strict decoding rejects bad responses") {
  CHECK_THROWS_AS(decodeResponse("{\"code\":0,\"id\":1,\"status\":\"err\"}\n"), CodecError);
  CHECK_THROWS_AS(decodeResponse("{\"code\":50,\"id\":1,\"status\":\"ok\"}\n"), CodecError);
  CHECK_THROWS_AS(decodeResponse("{\"code\":47,\"id\":1,\"status\":\"err\"}\n"), CodecError);
  CHECK_THROWS_AS(decodeResponse("{\"code\":0,\"id\":1}\n"), CodecError);
}

TEST_CASE("random truncations never crash and always throw (1000 cases)") {
  auto& rng = testsupport::testRng();
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string whole = encodeMessage(randomRequest(rng));
    std::uniform_int_distribution<std::size_t> cutDist(0, whole.size() - 1);
    const std::string cut = whole.substr(0, cutDist(rng));
    // every strict prefix is either missing its LF or structurally broken
    CHECK_THROWS_AS(decodeRequest(cut), CodecError);
    ++checked;
  }
  CHECK(checked == 1000);
}
