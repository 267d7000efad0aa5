#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phaseshift {

// Root of every error raised by the library. The CLI maps ValidationError
// to exit code 2 and everything else derived from Error to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class BesselOverflow : public Error {
 public:
  BesselOverflow(int l, double x);
  int order() const { return l_; }
  double argument() const { return x_; }

 private:
  int l_;
  double x_;
};

// Raised when k^2 - q_i is too small for an oscillatory solution in layer i.
class EvanescentLayer : public Error {
 public:
  EvanescentLayer(std::size_t layer, double kappa_squared);
  // 1-based layer index.
  std::size_t layer() const { return layer_; }
  double kappa_squared() const { return kappa_squared_; }

 private:
  std::size_t layer_;
  double kappa_squared_;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

}  // namespace phaseshift
