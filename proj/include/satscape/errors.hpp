#pragma once

#include <stdexcept>
#include <string>

namespace satscape {

/// Caller passed arguments outside an operation's domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured cap or budget would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& budget, const std::string& what)
      : std::runtime_error(what + " (budget: " + budget + ")"), budget_(budget) {}

  const std::string& budget() const noexcept { return budget_; }

 private:
  std::string budget_;
};

/// A postcondition or structural precondition did not hold.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numeric argument outside a function's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace satscape
