#pragma once

#include <stdexcept>
#include <string>

namespace cpt {

/// Base of every exception thrown by the library. `kind()` lets the CLI map
/// failures onto exit codes without string matching.
class Error : public std::runtime_error {
public:
  enum class Kind {
    InvalidParameters,
    Pole,
    Domain,
    NeverConverges,
    Numeric,
    DegenerateSpectrum,
    Config,
  };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

  /// Validation-type failures (bad input) as opposed to numeric breakdowns.
  bool is_validation() const noexcept {
    return kind_ == Kind::InvalidParameters || kind_ == Kind::Config || kind_ == Kind::Domain ||
           kind_ == Kind::NeverConverges;
  }

private:
  Kind kind_;
};

class InvalidParameters : public Error {
public:
  explicit InvalidParameters(const std::string& what) : Error(Kind::InvalidParameters, what) {}
};

/// Raised when a detuning falls inside the guard band around delta = +-omega2/2.
class PoleError : public Error {
public:
  PoleError(double delta, const std::string& what) : Error(Kind::Pole, what), delta_(delta) {}
  double delta() const noexcept { return delta_; }

private:
  double delta_;
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& what) : Error(Kind::Domain, what) {}
};

class NeverConverges : public Error {
public:
  explicit NeverConverges(const std::string& what) : Error(Kind::NeverConverges, what) {}
};

class NumericError : public Error {
public:
  explicit NumericError(const std::string& what) : Error(Kind::Numeric, what) {}
};

class DegenerateSpectrum : public Error {
public:
  explicit DegenerateSpectrum(const std::string& what) : Error(Kind::DegenerateSpectrum, what) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(Kind::Config, what) {}
};

}  // namespace cpt
