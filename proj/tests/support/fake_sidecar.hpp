#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace testing {

/// In-process stand-in for the embedding sidecar, serving the JSON-lines
/// protocol on 127.0.0.1 with an ephemeral port.
class FakeSidecar {
 public:
  struct Behavior {
    std::size_t dim = 8;
    std::string model = "fixture-model";
    std::size_t max_batch = 1000;  // ids beyond this are listed as rejected
    bool wrong_dim = false;        // answer with dim + 1 entries
    bool drop_one = false;         // silently omit the last response
    bool refuse_hello = false;     // answer the handshake with an error frame
  };

  explicit FakeSidecar(Behavior behavior);
  ~FakeSidecar();
  FakeSidecar(const FakeSidecar&) = delete;
  FakeSidecar& operator=(const FakeSidecar&) = delete;

  std::uint16_t port() const { return port_; }
  std::string address() const { return "127.0.0.1:" + std::to_string(port_); }

  /// Deterministic fixture vector for `text`: zero for empty text.
  static std::vector<double> vector_for(const std::string& text, std::size_t dim);

  std::size_t embed_frames() const { return embed_frames_.load(); }
  std::vector<std::size_t> batch_sizes() const;

 private:
  void serve();
  void handle(int fd);

  Behavior behavior_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
  std::atomic<std::size_t> embed_frames_{0};
  mutable std::mutex mutex_;
  std::vector<std::size_t> batch_sizes_;
  std::thread thread_;
  std::vector<std::thread> connections_;  // one per accepted client, owned by serve()
};

}  // namespace testing
