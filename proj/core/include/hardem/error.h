#ifndef HARDEM_ERROR_H_
#define HARDEM_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hardem {

// Base of every error raised by the library. Contract violations (bad
// arguments, mismatched variants) use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input record does not follow the expected schema. `line` is 1-based, 0 when
// the error is not tied to a line.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NonNumericAnswer : public Error {
 public:
  using Error::Error;
};

class AggregationTypeError : public Error {
 public:
  using Error::Error;
};

class FeatureDimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptySolutionSet : public Error {
 public:
  using Error::Error;
};

class NonFiniteLoss : public Error {
 public:
  explicit NonFiniteLoss(const std::string& example_id)
      : Error("non-finite loss on example '" + example_id + "'"),
        example_id_(example_id) {}
  const std::string& example_id() const { return example_id_; }

 private:
  std::string example_id_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace hardem

#endif  // HARDEM_ERROR_H_
