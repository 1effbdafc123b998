#include "bugtriage/tracker.hpp"

#include <httplib.h>

#include <json.hpp>

namespace bugtriage::tracker {

namespace {

using nlohmann::json;

struct Endpoint {
  std::string scheme_host_port;
  std::string path_prefix;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InputError("tracker url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.scheme_host_port = url.substr(0, path_start);
  if (path_start != std::string::npos) e.path_prefix = url.substr(path_start);
  while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
  return e;
}

std::string field_as_string(const json& bug, const char* name, std::size_t index) {
  auto it = bug.find(name);
  if (it == bug.end() || it->is_null()) {
    throw MalformedPayloadError("bug #" + std::to_string(index) + " is missing \"" + name + "\"");
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw MalformedPayloadError("bug #" + std::to_string(index) + " has non-scalar \"" + name + "\"");
}

}  // namespace

std::vector<UnlabeledReport> parse_payload(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw MalformedPayloadError(std::string("tracker payload is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("bugs") || !doc["bugs"].is_array()) {
    throw MalformedPayloadError("tracker payload has no \"bugs\" array");
  }
  std::vector<UnlabeledReport> out;
  std::size_t index = 0;
  for (const json& bug : doc["bugs"]) {
    if (!bug.is_object()) throw MalformedPayloadError("bug entry is not an object");
    UnlabeledReport r;
    r.id = field_as_string(bug, "id", index);
    r.product = field_as_string(bug, "product", index);
    r.component = field_as_string(bug, "component", index);
    r.reporter = field_as_string(bug, bug.contains("creator") ? "creator" : "reporter", index);
    r.severity = field_as_string(bug, "severity", index);
    r.summary = field_as_string(bug, "summary", index);
    out.push_back(std::move(r));
    ++index;
  }
  return out;
}

std::vector<UnlabeledReport> fetch(const Query& query) {
  if (query.statuses.empty() || query.resolutions.empty()) {
    throw InputError("tracker query needs at least one status and one resolution");
  }
  const Endpoint endpoint = split_url(query.base_url);
  httplib::Client client(endpoint.scheme_host_port);
  client.set_connection_timeout(query.timeout_seconds, 0);
  client.set_read_timeout(query.timeout_seconds, 0);
  client.set_follow_location(true);

  httplib::Params params;
  for (const auto& s : query.statuses) params.emplace("status", s);
  for (const auto& r : query.resolutions) params.emplace("resolution", r);
  if (!query.product.empty()) params.emplace("product", query.product);
  if (query.limit > 0) params.emplace("limit", std::to_string(query.limit));
  params.emplace("include_fields", "id,product,component,creator,severity,summary");

  httplib::Headers headers;
  if (!query.token.empty()) headers.emplace("X-BUGZILLA-API-KEY", query.token);

  auto result = client.Get(endpoint.path_prefix + "/rest/bug", params, headers);
  if (!result) {
    throw TransportError("tracker request to " + query.base_url +
                         " failed: " + httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw HttpStatusError(result->status, "tracker returned HTTP " +
                                              std::to_string(result->status));
  }
  return parse_payload(result->body);
}

}  // namespace bugtriage::tracker
