#include <doctest.h>

#include <chrono>
#include <thread>

#include <httplib.h>

#include "ccrm/transport.hpp"
#include "support/helpers.hpp"

using namespace ccrm;
using namespace ccrm::ingest;
using ccrm::testing::TempDir;

TEST_CASE("cassette JSON round-trip") {
  Cassette c{"https://fr.wikipedia.org/w/api.php?a=1", {200, {{"content-type", "application/json"}}, "{\"x\": \"é\"}"}};
  const auto back = Cassette::from_json_text(c.to_json_text(), "c.json");
  CHECK(back.url == c.url);
  CHECK(back.response.status == 200);
  CHECK(back.response.headers == c.response.headers);
  CHECK(back.response.body == c.response.body);
  CHECK_THROWS_AS(Cassette::from_json_text("{\"status\": 200}", "bad.json"), ParseError);
  CHECK_THROWS_AS(Cassette::from_json_text("not json", "bad.json"), ParseError);
}

TEST_CASE("replay serves recorded responses by exact URL") {
  const auto replay = ReplayTransport::from_directory(ccrm::testing::fixtures_dir() / "http");
  CHECK(replay.size() == 23);
  ReplayTransport r = replay;
  CHECK_THROWS_AS(r.get("https://fr.wikipedia.org/w/api.php?nothing=here"), NetworkError);
  r.add({"https://example.org/a", {200, {}, "a"}});
  CHECK(r.get("https://example.org/a").body == "a");
  CHECK_THROWS_AS(r.add({"https://example.org/a", {200, {}, "b"}}), Error);
  CHECK_THROWS_AS(ReplayTransport::from_directory("/nonexistent/cassettes"), IOError);
}

TEST_CASE("recording writes cassettes that replay identically") {
  TempDir tmp;
  ReplayTransport inner;
  inner.add({"https://example.org/x?q=1", {200, {{"content-type", "text/plain"}}, "one"}});
  inner.add({"https://example.org/y", {404, {}, "missing"}});
  RecordingTransport rec(inner, tmp.path());
  CHECK(rec.get("https://example.org/x?q=1").body == "one");
  CHECK(rec.get("https://example.org/y").status == 404);
  CHECK(std::filesystem::exists(tmp / (cassette_name("https://example.org/y") + ".json")));
  auto replay = ReplayTransport::from_directory(tmp.path());
  CHECK(replay.size() == 2);
  CHECK(replay.get("https://example.org/x?q=1").headers.at("content-type") == "text/plain");
  CHECK(replay.get("https://example.org/y").body == "missing");
}

TEST_CASE("cassette names are 16 hex digits and stable") {
  const auto n = cassette_name("https://example.org/");
  CHECK(n.size() == 16);
  CHECK(n.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(n == cassette_name("https://example.org/"));
  CHECK(n != cassette_name("https://example.org/?"));
  // FNV-1a of the empty string is the offset basis.
  CHECK(cassette_name("") == "cbf29ce484222325");
}

TEST_CASE("URL helpers") {
  CHECK(url_origin("https://fr.wikipedia.org/w/api.php?x=1") == "https://fr.wikipedia.org");
  CHECK(url_origin("http://localhost:8080/a") == "http://localhost:8080");
  CHECK(url_origin("ftp://example.org/") == "");
  CHECK(url_host("https://wikimedia.org/api/rest_v1") == "wikimedia.org");
  CHECK(url_host("http://127.0.0.1:9/x") == "127.0.0.1");
  CHECK(url_host("nonsense") == "");
  CHECK(percent_encode("Cuisine française") == "Cuisine%20fran%C3%A7aise");
  CHECK(percent_encode("a-b_c.d~e") == "a-b_c.d~e");
  CHECK(percent_encode("4242|0|x") == "4242%7C0%7Cx");
}

TEST_CASE("manual clock advances only when sleeping") {
  ManualClock clock;
  const auto t0 = clock.now();
  CHECK(clock.now() == t0);
  clock.sleep_for(std::chrono::milliseconds(250));
  CHECK(clock.now() - t0 == std::chrono::milliseconds(250));
  CHECK(clock.slept() == std::chrono::milliseconds(250));
}

TEST_CASE("http transport against a loopback server") {
  httplib::Server server;
  server.Get("/ok", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("X-Thing", "yes");
    res.set_content("hello", "text/plain");
  });
  server.Get("/gone", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
  server.Get("/moved", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ok"); });
  server.Get("/agent", [](const httplib::Request& req, httplib::Response& res) {
    res.set_content(req.get_header_value("User-Agent"), "text/plain");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const auto base = "http://127.0.0.1:" + std::to_string(port);

  HttpTransport http(5000, "ccrm-test/1");
  const auto ok = http.get(base + "/ok");
  CHECK(ok.status == 200);
  CHECK(ok.body == "hello");
  CHECK(ok.headers.at("x-thing") == "yes");
  CHECK(http.get(base + "/gone").status == 404);
  CHECK(http.get(base + "/moved").status == 302);
  CHECK(http.get(base + "/agent").body == "ccrm-test/1");

  server.stop();
  thread.join();
  CHECK_THROWS_AS(http.get(base + "/ok"), TransportError);
  CHECK_THROWS_AS(http.get("file:///etc/passwd"), NetworkError);
}
