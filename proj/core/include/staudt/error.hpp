#pragma once

#include <stdexcept>
#include <string>

namespace staudt {

enum class Err {
  // fields
  NotPrime,
  DegreeOutOfRange,
  NoEmbedding,
  CharacteristicMismatch,
  FieldTooSmall,
  DivisionByZero,
  // proj
  CoincidentPoints,
  CoincidentLines,
  DegenerateTuple,
  PointNotOnLine,
  // slp
  SyntaxError,
  ReservedVariable,
  BudgetExceeded,
  // config
  DuplicateElement,
  UnintendedIncidence,
  IntendedIncidenceFails,
  ConcurrencyViolation,
  // gadgets
  CoincidenceRetryExhausted,
  CharTwo,
  CoincidentInputs,
  CaseViolation,
  DegenerateChoice,
  // compile / cli
  WitnessDoesNotSolve,
  SchemaError,
  TooLargeToRender,
  UsageError,
};

const char* err_name(Err k);

class Error : public std::runtime_error {
 public:
  Error(Err kind, const std::string& msg)
      : std::runtime_error(std::string(err_name(kind)) + ": " + msg), kind_(kind) {}
  Err kind() const { return kind_; }

 private:
  Err kind_;
};

[[noreturn]] inline void fail(Err kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace staudt
