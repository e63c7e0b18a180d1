#pragma once

#include "staudt/compile.hpp"

namespace staudt {

/// Result of exhaustively enumerating a gadget's free choices over a small
/// field: the set of output values achieved across every admissible choice.
/// The verdict passes iff that set is exactly the expected singleton and no
/// non-degenerate choice failed (for equality: realizes iff values agree).
struct OracleResult {
  std::string kind;
  std::string field;
  std::vector<std::string> inputs;
  std::vector<std::string> achieved;
  std::string expected;
  std::uint64_t admissible = 0;
  std::uint64_t degenerate = 0;
  std::uint64_t failed = 0;
  bool pass = false;
  std::string detail;
  std::string str() const;
};

/// kind: parallel_shift | midpoint | reflect | generic_addition |
/// generic_multiplication | equality. Inputs are chart values (positions for
/// midpoint/reflect). Err::BudgetExceeded when |F|^3 exceeds the budget.
OracleResult gadget_oracle(const std::string& kind, const FieldPtr& spec,
                           const std::vector<Scalar>& inputs, std::uint64_t budget = 5000);

struct SoundnessEntry {
  std::vector<std::string> assignment;
  bool solves = false;
  bool realized = false;
  std::string error;
};

struct SoundnessReport {
  std::string field;
  std::vector<SoundnessEntry> entries;
  std::uint64_t n_solutions = 0;
  std::uint64_t n_realized = 0;
  bool pass = true;
  std::string str() const;
};

/// For every assignment over the field: the construction realizes iff the
/// assignment solves the system. Construction runs without the upfront
/// witness check, so failures arise geometrically (IntendedIncidenceFails).
SoundnessReport soundness_suite(const std::vector<Poly>& polys, const FieldPtr& spec,
                                std::uint64_t seed, std::uint64_t budget = 4096, int threads = 2);

struct AuditReport {
  std::uint64_t ledger = 0;
  std::uint64_t from_traces = 0;
  std::map<std::string, int> per_kind;
  bool gadget_counts_ok = true;  // every gadget trace records exactly 3 draws
  bool pass = false;
  std::string str() const;
};

/// Recompute the free-variable count s from the traces and diff against the
/// configuration ledger.
AuditReport freedom_audit(const Configuration& cfg);

struct RealizationReport {
  ConditionReport conditions;   // includes the full incidence re-check
  bool witness_consistent = true;
  std::vector<std::string> notes;
  bool pass() const { return conditions.pass() && witness_consistent; }
  std::string str() const;
};

/// Recompute all pair incidences against the ledger, re-verify the
/// Definition conditions, and re-extract each variable's chart coordinate to
/// re-evaluate the embedded program.
RealizationReport check_realization(const Configuration& cfg, const std::string& program_text,
                                    int threads = 2);

}  // namespace staudt
