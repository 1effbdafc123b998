#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "bugtriage/error.hpp"
#include "bugtriage/preprocess.hpp"

namespace bugtriage {

/// Maps a token sequence to a fixed-length vector. Implementations are
/// deterministic and safe to call from several threads.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dim() const = 0;
  /// Stable description of the backend and its parameters.
  virtual std::string identity() const = 0;
  virtual std::vector<std::vector<double>> embed_batch(const std::vector<TokenSequence>& texts) = 0;

  std::vector<double> embed(const TokenSequence& tokens) { return embed_batch({tokens}).front(); }
};

/// Feature-hashing embedder used when no transformer sidecar is available.
///
/// Each token t contributes sign(t) to bucket(t), where
///   h         = FNV-1a 64-bit hash of the token bytes
///   bucket(t) = h mod dim
///   sign(t)   = -1 if the top bit of mix64(h) is set, else +1
/// and the summed vector is scaled to unit L2 norm. An empty sequence, or one
/// whose contributions cancel, yields the zero vector.
class HashingEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 64;

  explicit HashingEmbedder(std::size_t dim = kDefaultDim);
  std::size_t dim() const override { return dim_; }
  std::string identity() const override;
  std::vector<std::vector<double>> embed_batch(const std::vector<TokenSequence>& texts) override;

  static std::uint64_t fnv1a(std::string_view token);

 private:
  std::size_t dim_;
};

class BackendUnavailableError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Client for the embedding sidecar: newline-delimited JSON frames over TCP.
///
///   -> {"type":"hello","version":1}
///   <- {"type":"hello","version":1,"dim":N,"model":"..."}
///   -> {"type":"embed","requests":[{"id":"...","text":"..."}, ...]}
///   <- {"type":"embed","responses":[{"id":"...","vector":[...]}, ...],
///       "rejected":["...", ...]}
///   <- {"type":"error","message":"..."}   (any time; fatal)
///   -> PING   <- PONG                      (health check, raw lines)
///
/// Texts are the space-joined stems. Rejected ids (oversized batch) are
/// resubmitted in halves. One request is in flight per connection; calls
/// are serialized by an internal mutex.
class SidecarEmbedder final : public Embedder {
 public:
  static constexpr int kProtocolVersion = 1;

  SidecarEmbedder(std::string host, std::uint16_t port, std::size_t batch_size = 32,
                  int timeout_seconds = 60);
  ~SidecarEmbedder() override;
  SidecarEmbedder(const SidecarEmbedder&) = delete;
  SidecarEmbedder& operator=(const SidecarEmbedder&) = delete;

  std::size_t dim() const override { return dim_; }
  std::string identity() const override;
  const std::string& model() const noexcept { return model_; }
  std::vector<std::vector<double>> embed_batch(const std::vector<TokenSequence>& texts) override;
  bool ping();

 private:
  void send_line(const std::string& line);
  std::string read_line();
  std::vector<std::vector<double>> embed_chunk(const std::vector<std::string>& texts);

  std::string host_;
  std::uint16_t port_;
  std::size_t batch_size_;
  int fd_ = -1;
  std::size_t dim_ = 0;
  std::string model_;
  std::string buffer_;
  std::uint64_t next_id_ = 0;
  std::mutex mutex_;
};

enum class EmbedderKind { Fallback, Sidecar };

struct EmbedderSpec {
  EmbedderKind kind = EmbedderKind::Fallback;
  std::size_t dim = HashingEmbedder::kDefaultDim;  // fallback only; the sidecar announces its own
  std::string sidecar_address = "127.0.0.1:7601";  // host:port
};

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec);

}  // namespace bugtriage
