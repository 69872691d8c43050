#pragma once

#include <stdexcept>

namespace hrsearch {

// Bad user input or an inconsistent configuration. Maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class DivisionByZero : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A floating-point value outside the supported range of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The guarded evaluator could not decide a case within its precision cap.
class UndecidedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pipeline and oracle disagree. Maps to exit code 3.
class OracleMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hrsearch
