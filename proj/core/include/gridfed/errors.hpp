#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridfed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("parse error at line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Raised when a configuration invariant does not hold. `key()` names the
/// offending configuration key.
class ValidationError : public Error {
 public:
  ValidationError(std::string key, const std::string& detail)
      : Error("invalid value for '" + key + "': " + detail), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Federation

class FederationStarted : public Error {
 public:
  FederationStarted() : Error("federation already started") {}
};

class DuplicateName : public Error {
 public:
  explicit DuplicateName(const std::string& name) : Error("duplicate federate name: " + name) {}
};

class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

class FederateTimeout : public Error {
 public:
  using Error::Error;
};

class FederateFailure : public Error {
 public:
  using Error::Error;
};

// Wire protocol

class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error("decode error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

// Metrics

class EmptyDistribution : public Error {
 public:
  EmptyDistribution() : Error("reliability distribution is empty") {}
};

class UsageError : public Error {
 public:
  using Error::Error;
};

} // namespace gridfed
