#pragma once

#include <stdexcept>
#include <string>

namespace seqinv {

// Index outside the domain of a sequence or estimator (j < 1, k > J, ...).
class IndexDomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed experiment description or unknown tag.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data violating a numeric precondition (nonpositive risk, zero alpha).
class DataError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace seqinv
