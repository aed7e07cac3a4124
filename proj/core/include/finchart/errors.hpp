#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace finchart {

/// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string message) : std::runtime_error(std::move(message)) {}
};

// market-data
class FileUnreadable : public Error {
 public:
  using Error::Error;
};
class EmptySeries : public Error {
 public:
  using Error::Error;
};

// window-sampler
class SeriesTooShort : public Error {
 public:
  using Error::Error;
};
class NoEligibleSeries : public Error {
 public:
  using Error::Error;
};

// chart-renderer
class EmptyPromptSegment : public Error {
 public:
  using Error::Error;
};
class RenderBackendFailure : public Error {
 public:
  using Error::Error;
};

// prompt-builder
class EmptyBars : public Error {
 public:
  using Error::Error;
};

// annotation-client
class TransientBackendError : public Error {
 public:
  using Error::Error;
};
class BackendExhausted : public Error {
 public:
  using Error::Error;
};
class AuthFailure : public Error {
 public:
  using Error::Error;
};
class EmptyCompletion : public Error {
 public:
  using Error::Error;
};

// response-parser
class EmptyAnswer : public Error {
 public:
  using Error::Error;
};
class UnpairedSegments : public Error {
 public:
  using Error::Error;
};
class TurnCountOutOfRange : public Error {
 public:
  TurnCountOutOfRange(std::size_t count, std::string message)
      : Error(std::move(message)), count_(count) {}
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

/// Raised when generated text violates a content rule. Carries the rule that
/// fired and the span of text that matched it.
class ContentViolation : public Error {
 public:
  ContentViolation(std::string rule, std::string matched, std::size_t offset)
      : Error("content violation [" + rule + "]: \"" + matched + "\" at offset " +
              std::to_string(offset)),
        rule_(std::move(rule)),
        matched_(std::move(matched)),
        offset_(offset) {}

  const std::string& rule() const { return rule_; }
  const std::string& matched() const { return matched_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string rule_;
  std::string matched_;
  std::size_t offset_;
};

// dataset-writer
class IdMismatch : public Error {
 public:
  using Error::Error;
};
class InvariantViolation : public Error {
 public:
  using Error::Error;
};
class IoFailure : public Error {
 public:
  using Error::Error;
};
class DanglingImagePath : public Error {
 public:
  using Error::Error;
};
class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

// trend-eval
class EmptySegment : public Error {
 public:
  using Error::Error;
};
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// cli
class ConfigInvalid : public Error {
 public:
  ConfigInvalid(std::string field, const std::string& reason)
      : Error("invalid config field '" + field + "': " + reason), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};
class ManifestMissing : public Error {
 public:
  using Error::Error;
};

}  // namespace finchart
