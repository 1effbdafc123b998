#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "bugtriage/tracker.hpp"

using namespace bugtriage;
using namespace bugtriage::tracker;

namespace {

constexpr const char* kTwoBugs = R"({"bugs": [
  {"id": 101, "product": "Ant", "component": "Core", "creator": "alice", "severity": "major",
   "summary": "NPE in copy task"},
  {"id": 102, "product": "Ant", "component": "Docs", "reporter": "bob", "severity": "enhancement",
   "summary": "Document the fork attribute"}]})";

/// Serves one canned response on 127.0.0.1 and records the last request.
class StubTracker {
 public:
  StubTracker(int status, std::string body) {
    server_.Get("/bugzilla/rest/bug", [this, status, body](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu_);
      last_ = req;
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubTracker() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/bugzilla/"; }
  httplib::Request last() {
    std::lock_guard lock(mu_);
    return last_;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mu_;
  httplib::Request last_;
};

}  // namespace

TEST_CASE("fetch: two reports, filters and token") {
  StubTracker stub(200, kTwoBugs);
  Query q;
  q.base_url = stub.url();
  q.token = "secret";
  q.product = "Ant";
  q.timeout_seconds = 5;
  const auto reports = fetch(q);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0] == UnlabeledReport{"101", "Ant", "Core", "alice", "major", "NPE in copy task"});
  CHECK(reports[1].reporter == "bob");

  const auto req = stub.last();
  CHECK(req.get_header_value("X-BUGZILLA-API-KEY") == "secret");
  CHECK(req.get_param_value_count("status") == 2);
  CHECK(req.get_param_value("status", 0) == "RESOLVED");
  CHECK(req.get_param_value("status", 1) == "VERIFIED");
  CHECK(req.get_param_value("resolution") == "FIXED");
  CHECK(req.get_param_value("product") == "Ant");
}

TEST_CASE("fetch: HTTP 500 is a retryable transport error") {
  StubTracker stub(500, "{}");
  Query q;
  q.base_url = stub.url();
  q.timeout_seconds = 5;
  try {
    fetch(q);
    FAIL("expected an error");
  } catch (const TransportError& e) {
    CHECK(e.retryable());
    const auto* status = dynamic_cast<const HttpStatusError*>(&e);
    REQUIRE(status != nullptr);
    CHECK(status->status() == 500);
  }
}

TEST_CASE("fetch: HTTP 404 is not retryable") {
  StubTracker stub(404, "{}");
  Query q;
  q.base_url = stub.url();
  q.timeout_seconds = 5;
  try {
    fetch(q);
    FAIL("expected an error");
  } catch (const HttpStatusError& e) {
    CHECK_FALSE(e.retryable());
  }
}

TEST_CASE("fetch: missing summary is a malformed payload") {
  StubTracker stub(200, R"({"bugs": [{"id": 1, "product": "p", "component": "c",
                           "creator": "r", "severity": "minor"}]})");
  Query q;
  q.base_url = stub.url();
  q.timeout_seconds = 5;
  try {
    fetch(q);
    FAIL("expected an error");
  } catch (const MalformedPayloadError& e) {
    CHECK_FALSE(e.retryable());
    CHECK(std::string(e.what()).find("summary") != std::string::npos);
  }
}

TEST_CASE("fetch: connection refused is a retryable transport error") {
  int port;
  {
    StubTracker stub(200, kTwoBugs);
    port = std::stoi(stub.url().substr(17));
  }
  Query q;
  q.base_url = "http://127.0.0.1:" + std::to_string(port);
  q.timeout_seconds = 2;
  try {
    fetch(q);
    FAIL("expected an error");
  } catch (const TransportError& e) {
    CHECK(e.retryable());
    CHECK(dynamic_cast<const HttpStatusError*>(&e) == nullptr);
  }
}

TEST_CASE("parse_payload and query validation") {
  CHECK_THROWS_AS(parse_payload("not json"), MalformedPayloadError);
  CHECK_THROWS_AS(parse_payload(R"({"items": []})"), MalformedPayloadError);
  CHECK(parse_payload(R"({"bugs": []})").empty());
  Query q;
  q.base_url = "no-scheme";
  CHECK_THROWS_AS(fetch(q), InputError);
  q.base_url = "http://127.0.0.1:1";
  q.statuses.clear();
  CHECK_THROWS_AS(fetch(q), InputError);
}
