#pragma once

#include <stdexcept>
#include <string>

namespace sicg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SICG_ERROR(Name)                     \
  class Name : public Error {                \
   public:                                   \
    explicit Name(const std::string& what)   \
        : Error(std::string(#Name ": ") + what) {} \
  }

SICG_ERROR(NonInvertible);
SICG_ERROR(DecompositionFailed);
SICG_ERROR(TooLarge);
SICG_ERROR(NotNormal);
SICG_ERROR(NotAbelian);
SICG_ERROR(NotCoprime);
SICG_ERROR(BadRVector);
SICG_ERROR(NotAProjector);
SICG_ERROR(SearchBudgetExceeded);
SICG_ERROR(MissingExpressionData);
SICG_ERROR(ZeroProjection);
SICG_ERROR(FormatError);

#undef SICG_ERROR

// Carries the best residual reached when a search gives up.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, double best_residual)
      : Error("NotConverged: " + what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace sicg
