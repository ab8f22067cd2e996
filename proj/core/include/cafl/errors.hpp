#pragma once

#include <stdexcept>
#include <string>

namespace cafl {

// Invalid experiment, CA, mobility, latency or trainer settings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data that cannot support the requested operation (e.g. a class too small to
// stratify).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while reading an IDX file. `kind()` distinguishes the cause.
class IngestionError : public DataError {
 public:
  enum class Kind { kIo, kBadMagic, kTruncated, kCountMismatch, kBadLabel };

  IngestionError(Kind kind, const std::string& what)
      : DataError(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// A caller broke a documented precondition (empty shard, empty FedAvg input,
// mismatched parameter lengths).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A filesystem write failed.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cafl
