#pragma once

#include <stdexcept>
#include <string>

namespace powsim {

enum class Err {
  UnknownParent,
  DuplicateId,
  UnknownId,
  NonPositivePower,
  InvalidScenario,
  InvalidPowers,
  MoreThanTwoTips,
  IllegalTransition,
  NotStochastic,
  NoConvergence,
  WindowNotExpired,
  DefenseDisabled,
  EmptyChain,
  BadOverride,
  IoError,
};

const char* to_string(Err code);

/// Single exception type for all library errors; `code()` identifies the
/// failed contract, `what()` carries context.
class SimError : public std::runtime_error {
 public:
  SimError(Err code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

inline const char* to_string(Err code) {
  switch (code) {
    case Err::UnknownParent: return "UnknownParent";
    case Err::DuplicateId: return "DuplicateId";
    case Err::UnknownId: return "UnknownId";
    case Err::NonPositivePower: return "NonPositivePower";
    case Err::InvalidScenario: return "InvalidScenario";
    case Err::InvalidPowers: return "InvalidPowers";
    case Err::MoreThanTwoTips: return "MoreThanTwoTips";
    case Err::IllegalTransition: return "IllegalTransition";
    case Err::NotStochastic: return "NotStochastic";
    case Err::NoConvergence: return "NoConvergence";
    case Err::WindowNotExpired: return "WindowNotExpired";
    case Err::DefenseDisabled: return "DefenseDisabled";
    case Err::EmptyChain: return "EmptyChain";
    case Err::BadOverride: return "BadOverride";
    case Err::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace powsim
