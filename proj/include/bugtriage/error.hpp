#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bugtriage {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input supplied by the caller: malformed files, schema mismatches,
/// invalid arguments. The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public InputError {
 public:
  SchemaError(const std::string& column, const std::string& what)
      : InputError(what), column_(column) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class RowError : public InputError {
 public:
  RowError(std::size_t row, const std::string& what)
      : InputError("row " + std::to_string(row) + ": " + what), row_(row) {}
  /// 1-based data row number (the header is row 0).
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

/// Stratification or split cannot satisfy its preconditions.
class InfeasibleError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace bugtriage
