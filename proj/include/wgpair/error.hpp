#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wgpair {

// Base for every error raised by the library. The CLI maps subclasses onto
// exit codes, so keep configuration problems separate from numerical ones.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: config files, material files, stack definitions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Wavelength outside the window a dispersion model was fitted on.
class ValidityError : public Error {
 public:
  using Error::Error;
};

// Mesh does not contain the field (boundary energy too high) or grids of two
// modes do not match.
class GridError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class TrackingError : public Error {
 public:
  using Error::Error;
};

// A fit that hit its iteration cap. Carries the best parameters seen so
// callers can still inspect them.
class FitError : public Error {
 public:
  FitError(const std::string& what, std::vector<double> best, double rms)
      : Error(what), best_(std::move(best)), rms_(rms) {}

  const std::vector<double>& best() const noexcept { return best_; }
  double rms() const noexcept { return rms_; }

 private:
  std::vector<double> best_;
  double rms_;
};

// Estimators that are undefined for the given inputs (zero coincidences,
// zero correction factors, beta2 == 0 ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace wgpair
