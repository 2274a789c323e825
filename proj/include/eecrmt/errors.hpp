#pragma once

#include <stdexcept>
#include <string>

namespace eecrmt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EECRMT_ERROR(Name)                \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

EECRMT_ERROR(PoleError)
EECRMT_ERROR(DomainError)
EECRMT_ERROR(OverflowError)
EECRMT_ERROR(ParamError)
EECRMT_ERROR(DegreeError)
EECRMT_ERROR(SkewError)
EECRMT_ERROR(RangeError)
EECRMT_ERROR(MomentError)
EECRMT_ERROR(DegenerateError)
EECRMT_ERROR(BlowupError)
EECRMT_ERROR(PrecisionError)
EECRMT_ERROR(RejectionBudgetError)

#undef EECRMT_ERROR

// Carries the best estimate reached before the budget ran out.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double partial, double err_est)
      : Error(what), partial_(partial), err_est_(err_est) {}
  double partial() const { return partial_; }
  double err_est() const { return err_est_; }

 private:
  double partial_;
  double err_est_;
};

// size is the leading principal dimension whose 2x2 pivot failed.
class PivotError : public Error {
 public:
  PivotError(const std::string& what, int size) : Error(what), size_(size) {}
  int size() const { return size_; }

 private:
  int size_;
};

}  // namespace eecrmt
