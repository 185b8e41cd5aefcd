#pragma once

#include <stdexcept>
#include <string>

namespace armeval {

/// Malformed input data: corpus/annotation files that violate the schema.
/// `record_id` names the offending record when one is known.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what, std::string record_id = {})
        : std::runtime_error(record_id.empty() ? what : what + " [record " + record_id + "]"),
          record_id_(std::move(record_id)) {}

    [[nodiscard]] const std::string& record_id() const noexcept { return record_id_; }

  private:
    std::string record_id_;
};

/// Bad command-line usage or configuration.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Any failure talking to a model backend, including replay-cache misses.
class BackendError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class TransportError : public BackendError {
  public:
    using BackendError::BackendError;
};

class CacheMissError : public BackendError {
  public:
    explicit CacheMissError(std::string digest)
        : BackendError("replay cache miss for request " + digest), digest_(std::move(digest)) {}

    [[nodiscard]] const std::string& digest() const noexcept { return digest_; }

  private:
    std::string digest_;
};

/// Model output did not contain the expected tagged span(s).
class ExtractionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace armeval
