#pragma once

#include <stdexcept>
#include <string>

namespace toeplitz_forge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point or index lies beyond every level that can be evaluated exactly.
class DepthBudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A cell, digit, or scan budget would be exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class InfeasibleEntropy : public Error {
 public:
  using Error::Error;
};

class CertificationFailure : public Error {
 public:
  using Error::Error;
};

// Violated precondition or malformed argument.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace toeplitz_forge
