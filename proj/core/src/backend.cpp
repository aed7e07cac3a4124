#include "finchart/backend.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "finchart/errors.hpp"
#include "finchart/hash.hpp"
#include "finchart/text.hpp"

namespace finchart {

namespace {

// Deterministic jitter in [-1, 1), derived from the request id and attempt so
// reruns schedule identically without a shared RNG.
double jitter_unit(const std::string& record_id, int attempt) {
  const auto digest = sha256(record_id + "#attempt" + std::to_string(attempt));
  const std::uint64_t bits = digest_to_u64(digest);
  return static_cast<double>(bits >> 11) * 0x1.0p-52 - 1.0;
}

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, const std::string& record_id,
                                        int attempt) {
  double delay = static_cast<double>(policy.initial_delay.count()) *
                 std::pow(policy.backoff_factor, attempt - 1);
  delay = std::min(delay, static_cast<double>(policy.max_delay.count()));
  delay *= 1.0 + policy.jitter * jitter_unit(record_id, attempt);
  delay = std::clamp(delay, 0.0, static_cast<double>(policy.max_delay.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(delay)));
}

}  // namespace

AnnotationResponse annotate(const AnnotationRequest& request, Backend& backend,
                            const RetryPolicy& policy, const SleepFn& sleep) {
  const SleepFn do_sleep =
      sleep ? sleep : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  const int max_attempts = std::max(policy.max_attempts, 1);

  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const auto started = std::chrono::steady_clock::now();
    try {
      std::string text = backend.complete(request);
      if (trim(text).empty()) throw EmptyCompletion("backend returned an empty completion");
      AnnotationResponse response;
      response.record_id = request.record_id;
      response.raw_text = std::move(text);
      response.backend_id = backend.id();
      response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - started)
                                .count();
      response.attempt = attempt;
      return response;
    } catch (const TransientBackendError& e) {
      last_error = e.what();
      if (attempt < max_attempts) do_sleep(backoff_delay(policy, request.record_id, attempt));
    }
    // AuthFailure, EmptyCompletion and other errors propagate to the caller.
  }
  throw BackendExhausted("gave up after " + std::to_string(max_attempts) +
                         " attempts; last error: " + last_error);
}

std::vector<BatchItem> annotate_batch(std::span<const AnnotationRequest> requests,
                                      Backend& backend, const RetryPolicy& policy,
                                      int max_in_flight, const SleepFn& sleep) {
  std::vector<BatchItem> results(requests.size());
  if (requests.empty()) return results;

  const int worker_count =
      static_cast<int>(std::min<std::size_t>(std::max(max_in_flight, 1), requests.size()));
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) break;
      try {
        results[i].response = annotate(requests[i], backend, policy, sleep);
        results[i].ok = true;
      } catch (const Error& e) {
        results[i].error = e.what();
      }
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  for (int w = 0; w < worker_count; ++w) workers.emplace_back(worker);
  for (std::thread& t : workers) t.join();
  return results;
}

}  // namespace finchart
