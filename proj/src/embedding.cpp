#include "bugtriage/embedding.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <map>

#include <json.hpp>

#include "bugtriage/random.hpp"

namespace bugtriage {

using nlohmann::json;

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw InputError("hashing embedder: dim must be positive");
}

std::string HashingEmbedder::identity() const { return "hashing-fnv1a:" + std::to_string(dim_); }

std::uint64_t HashingEmbedder::fnv1a(std::string_view token) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : token) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::vector<double>> HashingEmbedder::embed_batch(
    const std::vector<TokenSequence>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& seq : texts) {
    std::vector<double> v(dim_, 0.0);
    for (const auto& token : seq.tokens) {
      const std::uint64_t h = fnv1a(token);
      v[h % dim_] += (mix64(h) >> 63) ? -1.0 : 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    }
    out.push_back(std::move(v));
  }
  return out;
}

SidecarEmbedder::SidecarEmbedder(std::string host, std::uint16_t port, std::size_t batch_size,
                                 int timeout_seconds)
    : host_(std::move(host)), port_(port), batch_size_(batch_size == 0 ? 1 : batch_size) {
  const std::string endpoint = host_ + ":" + std::to_string(port_);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = getaddrinfo(host_.c_str(), std::to_string(port_).c_str(), &hints, &res); rc != 0) {
    throw BackendUnavailableError("embedding sidecar " + endpoint + " unavailable: " +
                                  gai_strerror(rc));
  }
  for (addrinfo* p = res; p; p = p->ai_next) {
    int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    timeval tv{timeout_seconds, 0};
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
    if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  freeaddrinfo(res);
  if (fd_ < 0) {
    throw BackendUnavailableError("embedding sidecar " + endpoint +
                                  " unavailable: " + std::strerror(errno));
  }

  send_line(json{{"type", "hello"}, {"version", kProtocolVersion}}.dump());
  json reply;
  try {
    reply = json::parse(read_line());
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("sidecar handshake is not JSON: ") + e.what());
  }
  if (reply.value("type", "") == "error") {
    throw ProtocolError("sidecar rejected handshake: " + reply.value("message", ""));
  }
  if (reply.value("type", "") != "hello" || reply.value("version", -1) != kProtocolVersion ||
      !reply.contains("dim") || !reply["dim"].is_number_unsigned() || reply["dim"] == 0) {
    throw ProtocolError("sidecar handshake malformed or version mismatch");
  }
  dim_ = reply["dim"].get<std::size_t>();
  model_ = reply.value("model", "unknown");
}

SidecarEmbedder::~SidecarEmbedder() {
  if (fd_ >= 0) ::close(fd_);
}

std::string SidecarEmbedder::identity() const {
  return "sidecar:" + model_ + ":" + std::to_string(dim_);
}

void SidecarEmbedder::send_line(const std::string& line) {
  std::string frame = line + "\n";
  std::size_t sent = 0;
  while (sent < frame.size()) {
    ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      throw BackendUnavailableError("embedding sidecar " + host_ + ":" + std::to_string(port_) +
                                    " connection lost while sending");
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string SidecarEmbedder::read_line() {
  while (true) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char chunk[65536];
    ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      throw BackendUnavailableError("embedding sidecar " + host_ + ":" + std::to_string(port_) +
                                    " closed the connection");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

bool SidecarEmbedder::ping() {
  std::lock_guard lock(mutex_);
  send_line("PING");
  return read_line() == "PONG";
}

std::vector<std::vector<double>> SidecarEmbedder::embed_chunk(const std::vector<std::string>& texts) {
  json requests = json::array();
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::string id = std::to_string(next_id_++);
    slot.emplace(id, i);
    requests.push_back({{"id", id}, {"text", texts[i]}});
  }
  send_line(json{{"type", "embed"}, {"requests", requests}}.dump());

  json reply;
  try {
    reply = json::parse(read_line());
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("sidecar reply is not JSON: ") + e.what());
  }
  if (reply.value("type", "") == "error") {
    throw ProtocolError("sidecar error: " + reply.value("message", ""));
  }
  if (reply.value("type", "") != "embed" || !reply.contains("responses") ||
      !reply["responses"].is_array()) {
    throw ProtocolError("sidecar reply is not an embed frame");
  }

  std::vector<std::vector<double>> out(texts.size());
  std::vector<bool> filled(texts.size(), false);
  for (const json& r : reply["responses"]) {
    const std::string id = r.value("id", "");
    auto it = slot.find(id);
    if (it == slot.end()) throw ProtocolError("sidecar returned unknown id '" + id + "'");
    if (filled[it->second]) throw ProtocolError("sidecar returned id '" + id + "' twice");
    if (!r.contains("vector") || !r["vector"].is_array()) {
      throw ProtocolError("sidecar response '" + id + "' has no vector");
    }
    std::vector<double> v;
    for (const json& x : r["vector"]) {
      if (!x.is_number()) throw ProtocolError("sidecar vector has a non-numeric entry");
      v.push_back(x.get<double>());
      if (!std::isfinite(v.back())) throw ProtocolError("sidecar vector has a non-finite entry");
    }
    if (v.size() != dim_) {
      throw ProtocolError("sidecar vector dim " + std::to_string(v.size()) +
                          " differs from announced dim " + std::to_string(dim_));
    }
    out[it->second] = std::move(v);
    filled[it->second] = true;
  }

  std::vector<std::size_t> rejected;
  if (reply.contains("rejected")) {
    for (const json& id : reply["rejected"]) {
      auto it = slot.find(id.is_string() ? id.get<std::string>() : std::string());
      if (it == slot.end() || filled[it->second]) throw ProtocolError("sidecar rejected an unknown id");
      rejected.push_back(it->second);
    }
  }
  std::size_t missing = 0;
  for (bool f : filled) missing += f ? 0 : 1;
  if (missing != rejected.size()) throw ProtocolError("sidecar dropped request ids");

  if (!rejected.empty()) {
    if (texts.size() == 1) throw ProtocolError("sidecar rejected a single-text batch");
    // Resubmit the rejected texts in two halves.
    std::vector<std::string> again;
    for (std::size_t i : rejected) again.push_back(texts[i]);
    const std::size_t half = (again.size() + 1) / 2;
    std::vector<std::string> a(again.begin(), again.begin() + half);
    std::vector<std::string> b(again.begin() + half, again.end());
    auto va = embed_chunk(a);
    auto vb = b.empty() ? std::vector<std::vector<double>>{} : embed_chunk(b);
    for (std::size_t i = 0; i < rejected.size(); ++i) {
      out[rejected[i]] = i < half ? std::move(va[i]) : std::move(vb[i - half]);
    }
  }
  return out;
}

std::vector<std::vector<double>> SidecarEmbedder::embed_batch(
    const std::vector<TokenSequence>& texts) {
  std::lock_guard lock(mutex_);
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
    std::vector<std::string> chunk;
    for (std::size_t i = start; i < std::min(texts.size(), start + batch_size_); ++i) {
      chunk.push_back(texts[i].joined());
    }
    for (auto& v : embed_chunk(chunk)) out.push_back(std::move(v));
  }
  return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec) {
  if (spec.kind == EmbedderKind::Fallback) return std::make_unique<HashingEmbedder>(spec.dim);
  const auto colon = spec.sidecar_address.rfind(':');
  if (colon == std::string::npos) {
    throw InputError("sidecar address must be host:port, got '" + spec.sidecar_address + "'");
  }
  int port = 0;
  try {
    port = std::stoi(spec.sidecar_address.substr(colon + 1));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port <= 0 || port > 65535) throw InputError("invalid sidecar port in '" + spec.sidecar_address + "'");
  return std::make_unique<SidecarEmbedder>(spec.sidecar_address.substr(0, colon),
                                           static_cast<std::uint16_t>(port));
}

}  // namespace bugtriage
