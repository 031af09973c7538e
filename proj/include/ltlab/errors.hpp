#pragma once

#include <stdexcept>
#include <string>

namespace ltlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define LTLAB_ERROR(Name)                                            \
  struct Name : Error {                                              \
    explicit Name(const std::string& what) : Error(what) {}          \
    const char* kind() const noexcept override { return #Name; }     \
  };

LTLAB_ERROR(PrecisionExhausted)
LTLAB_ERROR(NotEisenstein)
LTLAB_ERROR(NotIrreducibleDetected)
LTLAB_ERROR(OutOfConvergenceDomain)
LTLAB_ERROR(FieldMismatch)
LTLAB_ERROR(Unsupported)
LTLAB_ERROR(NonConvergentComposition)
LTLAB_ERROR(TailNotDominated)
LTLAB_ERROR(IntegralityViolation)
LTLAB_ERROR(LevelUnsupported)
LTLAB_ERROR(NotInEtaSpan)
LTLAB_ERROR(CharacterMismatch)
LTLAB_ERROR(TruncationTooShort)
LTLAB_ERROR(NonUnitSupport)
LTLAB_ERROR(ConductorExceedsLevel)
LTLAB_ERROR(NotLocallyConstantOnUnits)
LTLAB_ERROR(NotDeRham)
LTLAB_ERROR(ExceptionalPole)
LTLAB_ERROR(RamifiedCharacter)
LTLAB_ERROR(WrongVariant)
LTLAB_ERROR(HigherOrderPole)
LTLAB_ERROR(ConfigError)

#undef LTLAB_ERROR

}  // namespace ltlab
