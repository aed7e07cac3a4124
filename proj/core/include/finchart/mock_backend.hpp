#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <string_view>

#include "finchart/backend.hpp"

namespace finchart {

/// Marker sentences the mock emits for its trend forecast. The final
/// instruction-stage answer always contains exactly one of them, computed
/// from the predict segment embedded in the request, which lets an offline
/// evaluation extract the direction and compare it against the trend oracle.
inline constexpr std::string_view kMockOutlookUp = "the outlook points upward";
inline constexpr std::string_view kMockOutlookDown = "the outlook points downward";
inline constexpr std::string_view kMockOutlookFlat = "the outlook points sideways";

struct MockBackendOptions {
  /// Flat-band threshold in parts per million; keep equal to the pipeline's
  /// trend epsilon so the echoed outlook matches the oracle label.
  std::int64_t epsilon_ppm = 5000;
  /// Per-request simulated latency; nonzero values let tests observe real
  /// concurrency overlap. Latency never influences the generated text.
  int simulated_latency_ms = 0;
};

/// Deterministic offline stand-in for the chat backend. The reply is a pure
/// function of the request: the mock re-parses the k-line blocks embedded in
/// the prompt and writes its analysis from those numbers, so the downstream
/// parser, content filters, and trend oracle get exercised end to end with
/// no network.
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockBackendOptions options = {}) : options_(options) {}

  std::string id() const override { return "mock"; }
  std::string complete(const AnnotationRequest& request) override;

  // Instrumentation for concurrency tests.
  int calls() const { return calls_.load(); }
  int peak_in_flight() const { return peak_in_flight_.load(); }

 private:
  MockBackendOptions options_;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_in_flight_{0};
};

}  // namespace finchart
