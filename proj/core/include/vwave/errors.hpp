#ifndef VWAVE_ERRORS_HPP
#define VWAVE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vwave {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Expression text could not be parsed; `position` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Evaluation left the domain of an elementary function (sqrt of a negative
// number, division by zero, ...).
class EvalDomainError : public Error {
 public:
  using Error::Error;
};

// p or q lost positivity during a Goursat update.
class NonpositivePQError : public Error {
 public:
  NonpositivePQError(const std::string& what, int i, int j)
      : Error(what), i_(i), j_(j) {}
  int i() const { return i_; }
  int j() const { return j_; }

 private:
  int i_, j_;
};

// NaN or diverging corrector at a lattice node.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SliceOutOfDomainError : public Error {
 public:
  using Error::Error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class SingularSliceError : public Error {
 public:
  using Error::Error;
};

class DegeneratePathError : public Error {
 public:
  using Error::Error;
};

class NonConstantCoefficientsError : public Error {
 public:
  using Error::Error;
};

class TooManyAtomsError : public Error {
 public:
  using Error::Error;
};

// Bad run configuration (missing key, wrong type, invalid value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vwave

#endif
