#pragma once

#include <stdexcept>
#include <string>

namespace bgfit {

// Base of every error raised by the library. Callers that only care about
// "estimation failed" can catch this; simstudy catches it per estimator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A moment of the beta-geometric law that does not exist for the given alpha.
class MomentNotExistError : public Error {
 public:
  MomentNotExistError(const std::string& what, int order)
      : Error(what), order_(order) {}
  int order() const { return order_; }

 private:
  int order_;
};

// Operation needs per-observation data or m2, but only (n, sum_x) is known.
class MissingMomentsError : public Error {
 public:
  using Error::Error;
};

// Moment equations have no admissible solution (no overdispersion or
// alpha_hat <= 2).
class InvalidMomentRegionError : public Error {
 public:
  using Error::Error;
};

// Data that cannot identify the model (e.g. every delay is zero).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// Iterative fit stopped without meeting its tolerance. Carries the last
// iterate so callers can inspect or restart from it.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double alpha, double beta,
                      int iterations)
      : Error(what), alpha_(alpha), beta_(beta), iterations_(iterations) {}
  double last_alpha() const { return alpha_; }
  double last_beta() const { return beta_; }
  int iterations() const { return iterations_; }

 private:
  double alpha_;
  double beta_;
  int iterations_;
};

// Iterate left the numerically meaningful parameter box.
class DivergenceError : public NonConvergenceError {
 public:
  using NonConvergenceError::NonConvergenceError;
};

// Unparseable input file or row.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line) : Error(what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Invalid study configuration; the message starts with the offending field
// path, e.g. "laws[1].alpha: must be positive".
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bgfit
