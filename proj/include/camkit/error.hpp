#pragma once

#include <stdexcept>
#include <string>

namespace camkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Metric has no value for the given label mix, e.g. ROC-AUC over one class.
class UndefinedMetric : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class FormatErrc {
  truncated_header,
  bad_magic,
  unsupported_version,
  unsupported_dtype,
  bad_rank,
  bad_shape,
  length_mismatch,
  non_finite,
};

const char* to_string(FormatErrc code) noexcept;

// Malformed CAMT container.
class FormatError : public ValidationError {
 public:
  FormatError(FormatErrc code, const std::string& what)
      : ValidationError(std::string(to_string(code)) + ": " + what), code_(code) {}

  FormatErrc code() const noexcept { return code_; }

 private:
  FormatErrc code_;
};

}  // namespace camkit
