#include <gtest/gtest.h>

#include "rfidlbs/location_service.hpp"
#include "test_support.hpp"

using namespace rfidlbs;
using rfidlbs::testing::fixture;

namespace {

class LocationServiceTest : public ::testing::Test {
protected:
  LocationServiceTest()
      : service_(load_registry(fixture("registry.tsv")),
                 CredentialStore::load(fixture("credentials.txt")), fixture("assets"),
                 [this] { return now_; }) {}

  HttpResponse get(const std::string& path, std::map<std::string, std::string> query = {},
                   std::optional<std::string> token = std::nullopt) {
    HttpRequest r;
    r.path = path;
    r.query = std::move(query);
    if (token) r.headers["x-session"] = *token;
    return service_.handle(r);
  }

  HttpResponse post_login(const std::string& body) {
    HttpRequest r;
    r.method = "POST";
    r.path = "/login";
    r.body = body;
    return service_.handle(r);
  }

  std::string token() {
    const auto res = post_login(R"({"username":"guest","password":"guest"})");
    EXPECT_EQ(res.status, 200);
    return nlohmann::json::parse(res.body)["token"].get<std::string>();
  }

  double now_ = 0;
  LocationService service_;
};

}  // namespace

TEST_F(LocationServiceTest, Healthz) {
  const auto res = get("/healthz");
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(res.body, "ok");
}

TEST_F(LocationServiceTest, LoginIssuesToken) {
  const auto t = token();
  EXPECT_EQ(t.size(), 32u);
  EXPECT_NE(t, token());
}

TEST_F(LocationServiceTest, LoginFailuresAreIndistinguishable) {
  const auto wrong = post_login(R"({"username":"guest","password":"wrong"})");
  const auto unknown = post_login(R"({"username":"nobody","password":"x"})");
  EXPECT_EQ(wrong.status, 401);
  EXPECT_EQ(unknown.status, 401);
  EXPECT_EQ(wrong.body, unknown.body);
  EXPECT_EQ(wrong.content_type, unknown.content_type);
  EXPECT_THROW(service_.login("nobody", "x"), AuthFailed);
}

TEST_F(LocationServiceTest, MalformedLogin) {
  EXPECT_EQ(post_login("not json").status, 400);
  EXPECT_EQ(post_login(R"({"username":"guest"})").status, 400);
  EXPECT_EQ(post_login(R"({"username":1,"password":"x"})").status, 400);
}

TEST_F(LocationServiceTest, LocateNeedsSession) {
  EXPECT_EQ(get("/locate", {{"tag", "110055B53A"}}).status, 401);
  EXPECT_EQ(get("/locate", {{"tag", "110055B53A"}}, "0123456789abcdef0123456789abcdef").status, 401);
  EXPECT_EQ(get("/info", {{"tag", "110055B53A"}, {"topic", "hours"}}).status, 401);
  EXPECT_EQ(get("/image/img/lab.png").status, 401);
}

TEST_F(LocationServiceTest, LocateRegisteredTag) {
  const auto res = get("/locate", {{"tag", "110055B53A"}}, token());
  ASSERT_EQ(res.status, 200);
  const auto j = nlohmann::json::parse(res.body);
  EXPECT_EQ(j["tag"], "110055B53A");
  EXPECT_EQ(j["name"], "Room 101");
  EXPECT_EQ(j["description"], "Computer Lab");
  EXPECT_EQ(j["image"], "img/lab.png");
  EXPECT_EQ(j["extras"]["hours"], "Open 9:00-17:00");
  // Exactly the registry record.
  EXPECT_EQ(LocationRecord::from_json(j), resolve(*service_.registry(), TagId(0x110055B53A)));
}

TEST_F(LocationServiceTest, LocateErrors) {
  const auto t = token();
  EXPECT_EQ(get("/locate", {{"tag", "110055B53C"}}, t).status, 404);
  EXPECT_EQ(get("/locate", {{"tag", "110055B53"}}, t).status, 400);
  EXPECT_EQ(get("/locate", {}, t).status, 400);
  const auto not_found = get("/locate", {{"tag", "110055B53C"}}, t);
  EXPECT_FALSE(nlohmann::json::parse(not_found.body).contains("name"));
}

TEST_F(LocationServiceTest, Info) {
  const auto t = token();
  const auto res = get("/info", {{"tag", "110055B53A"}, {"topic", "staff"}}, t);
  ASSERT_EQ(res.status, 200);
  const auto j = nlohmann::json::parse(res.body);
  EXPECT_EQ(j["topic"], "staff");
  EXPECT_EQ(j["text"], "Lab assistant on duty");
  EXPECT_EQ(get("/info", {{"tag", "110055B53A"}, {"topic", "parking"}}, t).status, 404);
  EXPECT_EQ(get("/info", {{"tag", "110055B53C"}, {"topic", "hours"}}, t).status, 404);
  EXPECT_EQ(get("/info", {{"tag", "110055B53A"}}, t).status, 400);
}

TEST_F(LocationServiceTest, Images) {
  const auto t = token();
  const auto res = get("/image/img/lab.png", {}, t);
  ASSERT_EQ(res.status, 200);
  EXPECT_EQ(res.content_type, "image/png");
  EXPECT_EQ(res.body.substr(1, 3), "PNG");
  EXPECT_EQ(get("/image/missing.png", {}, t).status, 404);
  EXPECT_EQ(get("/image/../registry.tsv", {}, t).status, 404);
  EXPECT_EQ(get("/image/", {}, t).status, 404);

  HttpRequest via_query;
  via_query.path = "/image/img/lab.png";
  via_query.query["session"] = t;
  EXPECT_EQ(service_.handle(via_query).status, 200);
}

TEST_F(LocationServiceTest, MethodsAndUnknownPaths) {
  HttpRequest r;
  r.method = "POST";
  r.path = "/locate";
  EXPECT_EQ(service_.handle(r).status, 405);
  r.method = "GET";
  r.path = "/login";
  EXPECT_EQ(service_.handle(r).status, 405);
  r.method = "DELETE";
  r.path = "/healthz";
  EXPECT_EQ(service_.handle(r).status, 405);
  EXPECT_EQ(get("/nowhere").status, 404);
}

TEST_F(LocationServiceTest, SessionExpiryReturns401) {
  const auto t = token();
  now_ = 31 * 60;
  EXPECT_EQ(get("/locate", {{"tag", "110055B53A"}}, t).status, 401);
}

TEST_F(LocationServiceTest, ReloadBumpsVersion) {
  const auto t = token();
  const auto v1 = service_.registry();
  Registry next;
  LocationRecord rec{TagId(0x110055B53C), "Room 103", "Seminar room", std::nullopt, {}};
  next.records.emplace(rec.tag, rec);
  service_.reload(next);
  EXPECT_EQ(service_.registry()->version, v1->version + 1);
  EXPECT_EQ(get("/locate", {{"tag", "110055B53C"}}, t).status, 200);
  EXPECT_EQ(get("/locate", {{"tag", "110055B53A"}}, t).status, 404);
  // Old snapshot is untouched.
  EXPECT_EQ(v1->records.size(), 3u);
}

TEST(ContentType, ByExtension) {
  EXPECT_EQ(content_type_for("a/b.PNG"), "image/png");
  EXPECT_EQ(content_type_for("x.jpeg"), "image/jpeg");
  EXPECT_EQ(content_type_for("x.svg"), "image/svg+xml");
  EXPECT_EQ(content_type_for("x"), "application/octet-stream");
}
