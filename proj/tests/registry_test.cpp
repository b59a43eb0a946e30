#include <gtest/gtest.h>

#include <sstream>

#include "rfidlbs/credentials.hpp"
#include "rfidlbs/reader_link.hpp"
#include "rfidlbs/registry.hpp"
#include "test_support.hpp"

using namespace rfidlbs;
using rfidlbs::testing::fixture;
using rfidlbs::testing::TempDir;

namespace {

Registry parse(const std::string& text) {
  std::istringstream in(text);
  return parse_registry(in);
}

RegistryError registry_error(const std::string& text) {
  try {
    parse(text);
  } catch (const RegistryError& e) {
    return e;
  }
  ADD_FAILURE() << "parse accepted: " << text;
  return RegistryError(RegistryErrc::Io, "");
}

}  // namespace

TEST(Registry, SingleRow) {
  const auto reg = parse("110055B53A\tRoom 101\tComputer Lab\timg/lab.png\n");
  ASSERT_EQ(reg.records.size(), 1u);
  EXPECT_EQ(reg.version, 1u);
  const auto& rec = resolve(reg, TagId(0x110055B53A));
  EXPECT_EQ(rec.name, "Room 101");
  EXPECT_EQ(rec.description, "Computer Lab");
  EXPECT_EQ(rec.image_ref, "img/lab.png");
  EXPECT_TRUE(rec.extras.empty());
}

TEST(Registry, EmptyFileAndComments) {
  EXPECT_TRUE(parse("").records.empty());
  EXPECT_TRUE(parse("# nothing here\n\n").records.empty());
}

TEST(Registry, ExtrasAndMissingImage) {
  const auto reg = parse("2200AA0001\tLibrary\tGround floor\t\thours=9-5\tnote=a=b\r\n");
  const auto& rec = resolve(reg, TagId(0x2200AA0001));
  EXPECT_FALSE(rec.image_ref.has_value());
  EXPECT_EQ(rec.extras.at("hours"), "9-5");
  EXPECT_EQ(rec.extras.at("note"), "a=b");
}

TEST(Registry, Errors) {
  auto dup = registry_error("110055B53A\tA\ta\t\n110055B53A\tB\tb\t\n");
  EXPECT_EQ(dup.code(), RegistryErrc::DuplicateTag);
  EXPECT_EQ(dup.line(), 2u);

  auto bad_id = registry_error("# header\n110055B53\tA\ta\t\n");
  EXPECT_EQ(bad_id.code(), RegistryErrc::ParseError);
  EXPECT_EQ(bad_id.line(), 2u);

  EXPECT_EQ(registry_error("110055B53A\tonly two\n").code(), RegistryErrc::ParseError);
  EXPECT_EQ(registry_error("110055B53A\tA\ta\t\tnot-a-topic\n").code(), RegistryErrc::ParseError);
  EXPECT_THROW(load_registry("/nonexistent/registry.tsv"), RegistryError);
}

TEST(Registry, ResolveIsExactAndDeterministic) {
  const auto reg = load_registry(fixture("registry.tsv"));
  EXPECT_EQ(reg.records.size(), 3u);
  const auto& a = resolve(reg, TagId(0x110055B53A));
  const auto& b = resolve(reg, TagId(0x110055B53A));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.extras.size(), 2u);
  try {
    resolve(reg, TagId(0x110055B53C));
    FAIL();
  } catch (const RegistryError& e) {
    EXPECT_EQ(e.code(), RegistryErrc::NotFound);
  }
}

TEST(Registry, SaveThenLoadPreservesRecords) {
  TempDir dir;
  const auto reg = load_registry(fixture("registry.tsv"));
  save_registry(dir.path() / "copy.tsv", reg);
  const auto again = load_registry(dir.path() / "copy.tsv");
  EXPECT_EQ(again.records, reg.records);
}

TEST(LocationRecord, JsonShape) {
  const auto reg = load_registry(fixture("registry.tsv"));
  const auto j = resolve(reg, TagId(0x110055B53B)).to_json();
  EXPECT_EQ(j["tag"], "110055B53B");
  EXPECT_EQ(j["name"], "Room 102");
  EXPECT_TRUE(j["image"].is_null());
  EXPECT_TRUE(j["extras"].is_object());
  EXPECT_EQ(LocationRecord::from_json(j), resolve(reg, TagId(0x110055B53B)));
}

TEST(Credentials, VerifiesFixtureUsers) {
  const auto store = CredentialStore::load(fixture("credentials.txt"));
  EXPECT_TRUE(store.verify("guest", "guest"));
  EXPECT_FALSE(store.verify("guest", "wrong"));
  EXPECT_FALSE(store.verify("nobody", "x"));
  EXPECT_FALSE(store.verify("nobody", ""));
  EXPECT_TRUE(store.verify("admin", "correct horse"));
}

TEST(Credentials, Sha256KnownAnswer) {
  const std::string abc = "abc";
  const auto d = sha256(std::span(reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()));
  EXPECT_EQ(to_hex(d), "BA7816BF8F01CFEA414140DE5DAE2223B00361A396177A9CB410FF61F20015AD");
}

TEST(Credentials, SetPasswordAndSerialize) {
  CredentialStore store;
  store.set_password("alice", "s3cret");
  EXPECT_TRUE(store.verify("alice", "s3cret"));
  std::istringstream in(store.serialize());
  const auto again = CredentialStore::parse(in);
  EXPECT_TRUE(again.verify("alice", "s3cret"));
  EXPECT_THROW(store.set_password("bad:name", "x"), CredentialError);

  std::istringstream broken("guest:zz:00\n");
  EXPECT_THROW(CredentialStore::parse(broken), CredentialError);
}

TEST(Sessions, TokensAreUniqueHex) {
  double now = 0;
  SessionTable table([&] { return now; });
  std::set<std::string> seen;
  for (int i = 0; i < 100000; ++i) {
    const auto s = table.issue("guest");
    ASSERT_EQ(s.token.size(), 32u);
    ASSERT_TRUE(seen.insert(s.token).second);
  }
  EXPECT_EQ(table.size(), 100000u);
}

TEST(Sessions, ExpireAfterIdleTimeout) {
  double now = 0;
  SessionTable table([&] { return now; });
  const auto s = table.issue("guest");
  now = 29 * 60;
  EXPECT_TRUE(table.validate(s.token).has_value());
  now = 29 * 60 + 30 * 60;  // idle clock restarted at the last use
  EXPECT_TRUE(table.validate(s.token).has_value());
  now += 30 * 60 + 1;
  EXPECT_FALSE(table.validate(s.token).has_value());
  EXPECT_EQ(table.size(), 0u);
  EXPECT_FALSE(table.validate("not-a-token").has_value());
}
