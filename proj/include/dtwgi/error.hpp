#pragma once

#include <stdexcept>
#include <string>

namespace dtwgi {

/// Bad arguments or solver configuration (wrong flag values, gamma <= 0, ...).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Inputs that are well-formed requests but carry unusable data:
/// mismatched dimensionalities, non-finite values, malformed files.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public DataError {
public:
  DimensionError(const std::string &what, long long dim_a, long long dim_b)
      : DataError(what + " (dims " + std::to_string(dim_a) + " vs " +
                  std::to_string(dim_b) + ")"),
        dim_a_(dim_a), dim_b_(dim_b) {}

  long long dim_a() const { return dim_a_; }
  long long dim_b() const { return dim_b_; }

private:
  long long dim_a_;
  long long dim_b_;
};

} // namespace dtwgi
