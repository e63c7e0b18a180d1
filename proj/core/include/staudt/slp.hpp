#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "staudt/fields.hpp"

namespace staudt {

/// Sparse integer polynomial in x1..xn. Keys are exponent vectors of length
/// nvars; zero coefficients are never stored.
struct Poly {
  std::uint32_t nvars = 0;
  std::map<std::vector<std::uint32_t>, mpz_class> terms;

  bool is_zero() const { return terms.empty(); }
  void set_nvars(std::uint32_t n);  // widen exponent vectors
  std::string str() const;

  static Poly zero(std::uint32_t n) { return Poly{n, {}}; }
  static Poly constant(std::uint32_t n, const mpz_class& c);
  static Poly variable(std::uint32_t n, std::uint32_t i);  // 1-based index

  /// xs[i] is x_{i+1}; `f` overrides the field inferred from xs (required
  /// when the polynomial has no variables).
  Scalar eval(const std::vector<Scalar>& xs, FieldPtr f = nullptr) const;
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator-(const Poly& a);
bool operator==(const Poly& a, const Poly& b);

/// One polynomial per line; grammar: integer literals, x<i>, + - * ^, parens.
/// x0 is reserved. '#' starts a comment. All returned polys share nvars.
std::vector<Poly> parse_system(const std::string& text);
Poly parse_poly(const std::string& line, std::uint32_t min_vars = 0);

/// The five atomic equation forms. Index 0 denotes the constant 1.
///   Copy: x_a - x_b = 0        (a is the defined variable)
///   Neg:  x_a + x_b = 0        (a is the defined variable)
///   Sum:  x_a + x_b - x_c = 0  (c is the defined variable; a != b)
///   Prod: x_a x_b  - x_c = 0   (c is the defined variable; a != b)
///   Zero: x_a = 0
enum class AtomKind { Copy, Neg, Sum, Prod, Zero };

struct AtomicEq {
  AtomKind kind;
  std::uint32_t a = 0, b = 0, c = 0;
  std::string note;  // provenance
  std::string str() const;
};

struct SLProgram {
  std::uint32_t ninputs = 0;  // n
  std::uint32_t nvars = 0;    // m: highest variable index (x0 excluded)
  std::vector<AtomicEq> eqs;

  /// Structural invariants: single definition before use, operand
  /// distinctness, x0 never defined. Throws Err::SchemaError on violation.
  void validate() const;
  std::string text() const;  // stable printable form, one equation per line
};

/// Parse the stable text form back into a program. The input count is the
/// largest variable index never defined by an equation.
SLProgram program_from_text(const std::string& text);

/// Decompose a polynomial system into atomic equations; the result passes
/// equivalence_check against the input.
SLProgram decompose(const std::vector<Poly>& polys, std::uint32_t n);

struct EvalResult {
  std::vector<Scalar> assign;    // index 0..m; assign[0] = 1
  std::vector<Scalar> residuals; // one per Zero / constraint equation
  bool solves = false;
};
EvalResult eval_program(const SLProgram& prog, const std::vector<Scalar>& inputs);

/// Lexicographically smallest solution over a finite field, if any.
/// Err::BudgetExceeded when p^(k n) exceeds the budget (or the field is Q).
std::optional<std::vector<Scalar>> find_witness(const std::vector<Poly>& polys, const FieldPtr& f,
                                                std::uint64_t budget = 1u << 22);

/// Exact back-substitution: do the program's constraints generate exactly the
/// input polynomials (as a multiset)?
bool equivalence_check(const std::vector<Poly>& polys, const SLProgram& prog);

}  // namespace staudt
