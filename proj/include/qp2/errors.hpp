#pragma once

#include <stdexcept>
#include <string>

namespace qp2 {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// No available evaluation route can answer the question (treat as unknown).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request exceeds the size an oracle is built for.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// k is not of the form 2^a or 2^a + 2^b.
class ShapeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A constructed certificate failed re-verification. Always an upstream bug.
class CertificateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A data record failed primality or divisibility verification.
class VerificationError : public std::runtime_error {
 public:
  VerificationError(std::string record, const std::string& reason)
      : std::runtime_error(record + ": " + reason), record_(std::move(record)) {}

  const std::string& record() const noexcept { return record_; }

 private:
  std::string record_;
};

}  // namespace qp2
