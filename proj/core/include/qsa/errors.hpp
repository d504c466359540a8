#pragma once

#include <stdexcept>
#include <string>

namespace qsa {

// Base class for every error raised by the library. Callers that do not care
// about the specific failure can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotADensityMatrix : public Error {
 public:
  using Error::Error;
};

class NotAPureState : public Error {
 public:
  using Error::Error;
};

class NotOrthonormal : public Error {
 public:
  using Error::Error;
};

class BadRank : public Error {
 public:
  using Error::Error;
};

class NotAChannel : public Error {
 public:
  using Error::Error;
};

class POutOfRange : public Error {
 public:
  using Error::Error;
};

class NotAnIsometry : public Error {
 public:
  using Error::Error;
};

class RankMismatch : public Error {
 public:
  using Error::Error;
};

class BasisNotBalanced : public Error {
 public:
  using Error::Error;
};

class InvalidEnsemble : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace qsa
