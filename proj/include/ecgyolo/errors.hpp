#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ecgyolo {

// Base of everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Errors caused by bad input data or configuration (CLI exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : InputError(line ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what
                        : what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedFormat : public InputError {
 public:
  using InputError::InputError;
};

class TruncatedSignal : public InputError {
 public:
  TruncatedSignal(std::size_t expected, std::size_t actual)
      : InputError("truncated format 212 signal: expected at least " + std::to_string(expected) +
                   " bytes, got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected_bytes() const noexcept { return expected_; }
  std::size_t actual_bytes() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class OutOfRangeAnnotation : public InputError {
 public:
  OutOfRangeAnnotation(std::int64_t sample, std::int64_t num_samples)
      : InputError("annotation at sample " + std::to_string(sample) + " lies outside record of " +
                   std::to_string(num_samples) + " samples"),
        sample_(sample) {}

  std::int64_t sample() const noexcept { return sample_; }

 private:
  std::int64_t sample_;
};

class RecordTooShort : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace ecgyolo
