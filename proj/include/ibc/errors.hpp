#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ibc {

// Bad or inconsistent input data (malformed files, rejected records,
// inconsistent balance sheets). Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or parameters. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A malformed line in a transaction file.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : DataError("line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// A gross loan record that violates amount > 0 or lender != borrower.
class RejectedRecord : public DataError {
 public:
  RejectedRecord(std::size_t row, const std::string& what)
      : DataError("record " + std::to_string(row) + " rejected: " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace ibc
