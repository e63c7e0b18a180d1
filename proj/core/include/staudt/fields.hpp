#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "staudt/error.hpp"

namespace staudt {

/// Description of the coefficient field: the rationals (characteristic 0) or
/// F_{p^k} with an explicit monic irreducible modulus for k >= 2.
///
/// Construction is a pure function of (p, k): the modulus is always the
/// lexicographically smallest monic irreducible of degree k over F_p, with
/// coefficients compared constant term first.
struct FieldSpec {
  std::uint64_t characteristic = 0;  // 0 means Q, otherwise a prime
  std::uint32_t degree = 1;          // k; 1 in characteristic 0
  // k+1 coefficients, constant term first, leading coefficient 1.
  // Empty in characteristic 0 and for prime fields (k == 1).
  std::vector<std::uint64_t> modulus;

  bool rational() const { return characteristic == 0; }
  bool same(const FieldSpec& o) const {
    return characteristic == o.characteristic && degree == o.degree;
  }
  /// min(p^k, 2^62), used for sampling admissibility checks.
  std::uint64_t order_clamped() const;
  std::string name() const;  // "Q", "F_7", "F_{7^10}"
};

using FieldPtr = std::shared_ptr<const FieldSpec>;

/// Deterministic field construction. p == 0 with k == 1 gives Q.
FieldPtr make_field(std::uint64_t p, std::uint32_t k);

/// An exact field element. Characteristic 0 values are reduced fractions of
/// arbitrary-precision integers; characteristic p values are coefficient
/// vectors over F_p (bit-packed into one word when p == 2).
class Scalar {
 public:
  Scalar();  // zero of Q

  static Scalar zero(const FieldPtr& f);
  static Scalar one(const FieldPtr& f);
  static Scalar of_int(const FieldPtr& f, long v);
  static Scalar of_mpz(const FieldPtr& f, const mpz_class& v);
  static Scalar of_rational(const mpq_class& v);
  /// char p only; coefficients are reduced mod p. Missing trailing
  /// coefficients are treated as zero.
  static Scalar from_coeffs(const FieldPtr& f, const std::vector<std::uint64_t>& coeffs);

  const FieldPtr& spec() const { return spec_; }
  bool is_zero() const;
  bool is_one() const;
  /// Coefficient of t^i in the canonical representation (char p).
  std::uint64_t coeff(std::uint32_t i) const;
  std::vector<std::uint64_t> coeffs() const;  // length k (char p)
  const mpq_class& rat() const;               // char 0
  /// Raw storage (char p): k words for odd p, one bit-packed word for p = 2.
  const std::vector<std::uint64_t>& raw() const { return fp_; }

  Scalar operator-() const;
  Scalar inv() const;  // Err::DivisionByZero on zero
  Scalar pow(const mpz_class& e) const;

  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  friend bool operator==(const Scalar& a, const Scalar& b);
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  /// Strict total order on elements of a common spec, used for deterministic
  /// tie-breaking: numeric order on Q, lexicographic on coefficient vectors
  /// (constant term first) in characteristic p.
  static int cmp(const Scalar& a, const Scalar& b);
  friend bool operator<(const Scalar& a, const Scalar& b) { return cmp(a, b) < 0; }

  std::string str() const;  // "a/b" or "[a0,...,ak-1]"

 private:
  friend class FieldOps;
  FieldPtr spec_;
  mpq_class rat_;                   // char 0 payload
  std::vector<std::uint64_t> fp_;   // char p payload; p == 2: fp_[0] holds bits
};

/// Seeded deterministic generator. Holds the only mutable state used during
/// compilation; also carries the characteristic-0 sampling half-window.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed), seed_(seed) {}
  std::uint64_t raw() { return gen_(); }
  void set_char0_window(long long half) { window_ = half < 2 ? 2 : half; }
  long long char0_window() const { return window_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_;
  long long window_ = 1 << 16;
};

/// Canonical embedding F_{p^k} -> F_{p^N} (k | N): coefficients are rewritten
/// in terms of the canonically smallest root of the source modulus in the
/// target. Prime-field elements are fixed.
Scalar embed(const Scalar& x, const FieldPtr& target);

/// A general (seeded-random) element avoiding `forbidden`. Characteristic 0
/// draws integers from [-W, W] where W is the sampler window.
Scalar sample_general(const FieldPtr& f, const std::vector<Scalar>& forbidden, Sampler& rng);

/// Smallest root of t^2 + c1 t + c0 over f, if any. The result re-substitutes
/// to exactly zero.
std::optional<Scalar> find_quadratic_root(const Scalar& c0, const Scalar& c1, const FieldPtr& f);

/// Visit all elements of a finite field in canonical order while fn returns
/// true. Err::BudgetExceeded if the field order exceeds `budget`.
void enumerate_field(const FieldPtr& f, std::uint64_t budget,
                     const std::function<bool(const Scalar&)>& fn);

}  // namespace staudt
