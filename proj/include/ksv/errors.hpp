#pragma once

#include <stdexcept>
#include <string>

namespace ksv {

// Coarse error category; the CLI maps these to process exit codes
// (verification failure -> 1, input -> 2, limit -> 3).
enum class ErrorKind {
  verification,
  input,
  limit,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define KSV_DEFINE_ERROR(NAME, KIND)            \
  class NAME : public Error {                   \
   public:                                      \
    explicit NAME(const std::string& what)      \
        : Error(ErrorKind::KIND, what) {}       \
  }

KSV_DEFINE_ERROR(ZeroVectorError, input);
KSV_DEFINE_ERROR(DimensionMismatchError, input);
KSV_DEFINE_ERROR(NotHermitianError, input);
KSV_DEFINE_ERROR(NotAStateError, input);
KSV_DEFINE_ERROR(DuplicateRayError, input);
KSV_DEFINE_ERROR(GraphMismatchError, input);
KSV_DEFINE_ERROR(NonCommutingPairError, input);
KSV_DEFINE_ERROR(WeightMismatchError, input);
KSV_DEFINE_ERROR(PlanMismatchError, input);
KSV_DEFINE_ERROR(UncolorableError, input);
KSV_DEFINE_ERROR(ParseError, input);
KSV_DEFINE_ERROR(KTooLargeError, limit);
KSV_DEFINE_ERROR(TooLargeError, limit);
KSV_DEFINE_ERROR(OverflowError, limit);
KSV_DEFINE_ERROR(PhaseConstraintError, verification);
KSV_DEFINE_ERROR(VerificationFailedError, verification);

#undef KSV_DEFINE_ERROR

}  // namespace ksv
