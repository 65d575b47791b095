#pragma once

#include <stdexcept>
#include <string>

namespace pqsim {

/// Register too large (or too small) to be represented.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A caller broke an operation's precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested run would exceed the configured memory budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace detail
}  // namespace pqsim
