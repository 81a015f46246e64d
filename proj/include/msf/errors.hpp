#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace msf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Intersecting a filter with section domains produced the empty set.
class EmptyTrace : public Error {
 public:
  EmptyTrace() : Error("filter trace contains the empty set") {}
};

class NotOpen : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::string message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

class EpsOutOfRange : public Error {
 public:
  using Error::Error;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name)
      : Error("unbound variable '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Local forcing is only defined over nonempty open sets.
class EmptyOpen : public Error {
 public:
  EmptyOpen() : Error("local forcing over the empty open set") {}
};

/// The generic model construction needs a regular base and an ultrafilter of
/// regular opens. `hypothesis()` is one of "regularity", "not-ultra",
/// "not-regular-opens".
class HypothesisViolated : public Error {
 public:
  explicit HypothesisViolated(std::string hypothesis)
      : Error("hypothesis violated: " + hypothesis),
        hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

class ValidationFailure : public Error {
 public:
  ValidationFailure(std::string clause, std::string witness)
      : Error("validation failed: " + clause + " (" + witness + ")"),
        clause_(std::move(clause)),
        witness_(std::move(witness)) {}
  const std::string& clause() const noexcept { return clause_; }
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string clause_;
  std::string witness_;
};

/// Malformed sheaf document or unresolvable name.
class DocumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace msf
