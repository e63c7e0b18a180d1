#pragma once

#include "staudt/gadgets.hpp"
#include "staudt/slp.hpp"

namespace staudt {

/// The reference labels a framing-type is drawn from: {-1, 0, 1}, or
/// {0, 1, j} in characteristic 2 (j a chosen root of t^2 + t - 1).
std::vector<Scalar> framing_labels(const FieldPtr& f, const Scalar& j);

/// Deterministic lexicographically-first 2-subset of the reference labels
/// avoiding q. The labels come back in reference order.
std::array<Scalar, 2> choose_framing_type(const Scalar& q, const std::vector<Scalar>& refs);

/// Chart relabeling: the value of the same point when the framing points are
/// relabeled (s1, s2) -> (s1', s2'). Pure bookkeeping, no geometry.
Scalar relabel_value(const Scalar& q, const Scalar& s1, const Scalar& s2, const Scalar& s1p,
                     const Scalar& s2p);
FramedCarrier relabel(const FramedCarrier& c, const Scalar& new_label0, const Scalar& new_label1);

struct CaseTag {
  std::size_t eq_index = 0;  // index into the program's equation list
  std::string op;            // "eq", "neg", "add", "mul", "zero"
  std::string case_name;     // "generic", "one_plus", "zero_plus", "translate",
                             // "char2_one_plus", "char2_zero_plus", "same_framing", ...
  std::string predicate;     // the witness-value predicate that selected it
};

struct CompileOptions {
  std::uint64_t seed = 1;
  int compile_attempts = 3;  // reseeds after a failed general-position draw
  bool check_witness = true;
  bool run_bystanders = true;
  bool run_conditions = true;
  int threads = 2;
  std::optional<std::uint32_t> force_extension;
};

struct CompileReport {
  std::vector<CaseTag> cases;
  std::size_t n_points = 0, n_lines = 0;
  std::uint64_t free_count = 0;
  std::string working_field;
  std::uint64_t estimated_elements = 0;
  double construct_ms = 0, check_ms = 0;
  ConditionReport conditions;
  std::uint64_t seed_used = 0;
  std::string str() const;
};

struct CompileResult {
  Configuration cfg;
  CompileReport report;
  SLProgram prog;
  std::vector<Scalar> witness;  // over the witness field F_{p^k} or Q
};

/// Element-count estimate E driving the field-size policy.
std::uint64_t estimate_elements(const SLProgram& prog);
/// Smallest multiple N of k (even when p = 2, so that j exists) with
/// p^N >= max(2^16, 64 E^2).
std::uint32_t extension_degree(std::uint64_t p, std::uint32_t k, std::uint64_t E);

/// The assembler: anchors, initial framing, variable-line placement, and the
/// full case dispatch for the four connecting problems.
class Assembler {
 public:
  Assembler(FieldPtr work, const CompileOptions& opt);

  Configuration& cfg() { return cfg_; }
  const Configuration& cfg() const { return cfg_; }
  const std::vector<CaseTag>& cases() const { return cases_; }
  const Scalar& j() const { return j_; }
  Sampler& sampler() { return rng_; }

  /// p != 2: construct -1 on the x-axis (reflect). p = 2: construct j and
  /// k = j^2 on the x-axis and enforce j^2 = 1 - j.
  void initial_framing();

  /// A general variable-bearing line carrying `value`; framing-type chosen
  /// deterministically. `value_draw` marks translation variables whose value
  /// was itself a free draw.
  FramedCarrier place_variable_line(const std::string& label, const Scalar& value,
                                    std::optional<DrawRecord> value_draw = std::nullopt);

  /// Per-use parallel-shifted copy of the x-axis treated as a framed carrier
  /// of the given reference value (0, 1, or j^2 in characteristic 2).
  FramedCarrier axis_constant(const Scalar& value);

  void enforce_equality(const FramedCarrier& a, const FramedCarrier& b,
                        std::size_t eq_index = static_cast<std::size_t>(-1));
  void enforce_negation(const FramedCarrier& a, const FramedCarrier& b, std::size_t eq_index);
  void enforce_sum(const FramedCarrier& a, const FramedCarrier& b, const FramedCarrier& c,
                   std::size_t eq_index);
  void enforce_prod(const FramedCarrier& a, const FramedCarrier& b, const FramedCarrier& c,
                    std::size_t eq_index);
  void enforce_zero(const FramedCarrier& a, std::size_t eq_index);

  /// Case dispatch on witness values (total functions).
  std::string addition_case(const Scalar& u, const Scalar& v, const Scalar& w) const;
  std::string multiplication_case(const Scalar& u, const Scalar& v, const Scalar& w) const;
  /// Simple-case constructibility of u + v (cases 1-3 with all their
  /// side conditions); empty when only the translation case would work.
  std::string construct_sum_case(const Scalar& u, const Scalar& v) const;

  /// Run a whole program: place lines for x1..xm, enforce each equation.
  void run_program(const SLProgram& prog, const std::vector<Scalar>& assign);

 private:
  FramedCarrier port(const FramedCarrier& c, const std::array<Scalar, 2>& target);
  FramedCarrier ported_for(const FramedCarrier& c, const Scalar& t0, const Scalar& t1);
  FramedCarrier construct_sum(const FramedCarrier& a, const FramedCarrier& b);
  FramedCarrier construct_prod_generic(const FramedCarrier& a, const FramedCarrier& b);
  FramedCarrier half_carrier(const FramedCarrier& b);  // midpoint trick: value/2
  void enforce_sum_simple(const FramedCarrier& a, const FramedCarrier& b, const FramedCarrier& c,
                          const std::string& case_name);
  int ref_point(const Scalar& s) const;
  bool values_ok_for_figure(const Scalar& u, const Scalar& v, const Scalar& sum_or_prod) const;
  Scalar draw_value(const std::vector<Scalar>& avoid, DrawRecord* rec, const char* purpose);

  Configuration cfg_;
  CompileOptions opt_;
  Sampler rng_;
  RandomChoice choice_;
  std::uint64_t p_;
  AnchorIds ids_;
  Scalar zero_, one_, mone_, two_, j_, j2_;
  std::vector<Scalar> refs_;                      // framing label universe
  std::vector<std::pair<Scalar, int>> refpts_;    // x-axis reference points
  std::vector<CaseTag> cases_;
  int translation_count_ = 0;
};

CompileResult compile_system(const std::vector<Poly>& polys, std::uint64_t p, std::uint32_t k,
                             const std::optional<std::vector<Scalar>>& witness,
                             const CompileOptions& opt = {});

/// Witness serialization used in the configuration JSON ("a/b" or
/// "c0;c1;...").
std::string witness_str(const Scalar& s);
Scalar parse_witness_value(const std::string& text, const FieldPtr& f);

}  // namespace staudt
