#pragma once

#include <stdexcept>
#include <string>

namespace textnet {

/// Bad input data: malformed files, inconsistent ids, contract violations.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An embedding provider could not serve a request.
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace textnet
