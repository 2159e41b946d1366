#pragma once

#include <stdexcept>
#include <string>

namespace pots {

/// Invalid scenario parameterization (indivisible population, empty ranges...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller misuse of an API: mismatched lengths, bad ids, empty sequences.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A statistic that is mathematically undefined for the given input.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pots
