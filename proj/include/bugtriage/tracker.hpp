#pragma once

#include <string>
#include <vector>

#include "bugtriage/corpus.hpp"
#include "bugtriage/error.hpp"

namespace bugtriage::tracker {

/// Failure talking to a bug tracker. `retryable()` tells callers whether the
/// same request may succeed later.
class TrackerError : public Error {
 public:
  TrackerError(const std::string& what, bool retryable) : Error(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

/// The request did not complete: connection refused, DNS failure, timeout,
/// or a non-2xx answer (HttpStatusError).
class TransportError : public TrackerError {
 public:
  explicit TransportError(const std::string& what, bool retryable = true)
      : TrackerError(what, retryable) {}
};

/// Only 5xx and 429 are retryable.
class HttpStatusError : public TransportError {
 public:
  HttpStatusError(int status, const std::string& what)
      : TransportError(what, status >= 500 || status == 429), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class MalformedPayloadError : public TrackerError {
 public:
  explicit MalformedPayloadError(const std::string& what) : TrackerError(what, false) {}
};

struct Query {
  std::string base_url;  // e.g. https://bz.apache.org/bugzilla
  std::vector<std::string> statuses{"RESOLVED", "VERIFIED"};
  std::vector<std::string> resolutions{"FIXED"};
  std::string product;   // optional filter
  std::string token;     // sent as X-BUGZILLA-API-KEY when non-empty
  int limit = 0;         // 0 = server default
  int timeout_seconds = 30;
};

/// GET {base_url}/rest/bug with status/resolution filters; parses the
/// Bugzilla `{"bugs": [...]}` payload. The reporter is read from `creator`
/// (Bugzilla 5) or `reporter`.
std::vector<UnlabeledReport> fetch(const Query& query);

/// Parses a Bugzilla REST payload; exposed for testing.
std::vector<UnlabeledReport> parse_payload(const std::string& body);

}  // namespace bugtriage::tracker
