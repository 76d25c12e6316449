#pragma once

#include <stdexcept>
#include <string>

namespace ceo {

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A decoder, model or bound was asked to work outside its validity
// preconditions (even L for the median rule, r < 2 for regular theory, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The quantity does not exist for this model, e.g. Fisher information of a
// model whose support moves with the parameter.
class UndefinedQuantityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// No certified regularity constants are known for a channel/model pair.
class CertificateUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ceo
