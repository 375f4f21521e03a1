#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uavnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (d <= 0, zero vector, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller broke an operation's precondition (e.g. a multi-player diff passed to an audit).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class DuplicateCentroidError : public Error {
 public:
  using Error::Error;
};

class ConnectivityError : public Error {
 public:
  using Error::Error;
};

class InfeasibleCoverageError : public Error {
 public:
  InfeasibleCoverageError(std::size_t user, const std::string& what)
      : Error(what), user_(user) {}
  std::size_t user() const noexcept { return user_; }

 private:
  std::size_t user_;
};

// Remote embedder/generator could not be reached; safe to retry.
class TransportError : public Error {
 public:
  using Error::Error;
};

// A generated document failed to parse or violated WeightProposal invariants.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw_response() const noexcept { return raw_; }

 private:
  std::string raw_;
};

}  // namespace uavnet
