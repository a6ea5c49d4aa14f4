#pragma once

#include <stdexcept>
#include <string>

namespace rsg {

// Base of every error raised by the library. CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RSG_DEFINE_ERROR(Name)            \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

RSG_DEFINE_ERROR(DomainError)
RSG_DEFINE_ERROR(BracketError)
RSG_DEFINE_ERROR(NonConvergence)
RSG_DEFINE_ERROR(AsymptoticUndecided)
RSG_DEFINE_ERROR(HypothesisViolated)
RSG_DEFINE_ERROR(EpsilonTooLarge)
RSG_DEFINE_ERROR(GapClosed)
RSG_DEFINE_ERROR(MonotonicityRepairFailed)
RSG_DEFINE_ERROR(EmptySample)
RSG_DEFINE_ERROR(ContainmentFailed)
RSG_DEFINE_ERROR(NonFinite)
RSG_DEFINE_ERROR(Blowup)
RSG_DEFINE_ERROR(ValidationFailed)
RSG_DEFINE_ERROR(ConfigError)

#undef RSG_DEFINE_ERROR

}  // namespace rsg
