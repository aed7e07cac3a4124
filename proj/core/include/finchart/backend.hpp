#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "finchart/prompts.hpp"

namespace finchart {

/// Completed annotation for one request.
struct AnnotationResponse {
  std::string record_id;
  std::string raw_text;
  std::string backend_id;
  std::int64_t latency_ms = 0;
  int attempt = 1;  // attempts consumed, including the successful one
};

/// A chat-completion backend. Implementations must be safe to call from
/// multiple workers at once.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  /// One completion attempt. Throws TransientBackendError for conditions
  /// worth retrying (transport faults, rate-limit signals), AuthFailure for
  /// credential problems, Error otherwise.
  virtual std::string complete(const AnnotationRequest& request) = 0;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_delay{1000};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_delay{30000};
  double jitter = 0.1;  // +/- fraction of the delay
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

/// Runs one request with exponential backoff on transient failures. Returns
/// the first successful completion with its attempt count. Throws
/// BackendExhausted once max_attempts transient failures accumulate,
/// EmptyCompletion for a blank success, and passes AuthFailure through
/// untouched. `sleep` defaults to a real wall-clock sleep; tests inject a
/// recorder.
AnnotationResponse annotate(const AnnotationRequest& request, Backend& backend,
                            const RetryPolicy& policy = {}, const SleepFn& sleep = {});

/// Outcome slot for one batch element; `error` is set when ok is false.
struct BatchItem {
  bool ok = false;
  AnnotationResponse response;
  std::string error;
};

/// Annotates a batch with at most `max_in_flight` requests outstanding.
/// The returned list is positionally aligned with the input regardless of
/// completion order, and per-request failures are reported in place without
/// aborting the batch.
std::vector<BatchItem> annotate_batch(std::span<const AnnotationRequest> requests,
                                      Backend& backend, const RetryPolicy& policy,
                                      int max_in_flight, const SleepFn& sleep = {});

}  // namespace finchart
