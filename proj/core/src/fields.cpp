#include "staudt/fields.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>

#include "fp_kernels.hpp"

namespace staudt {

const char* err_name(Err k) {
  switch (k) {
    case Err::NotPrime: return "NotPrime";
    case Err::DegreeOutOfRange: return "DegreeOutOfRange";
    case Err::NoEmbedding: return "NoEmbedding";
    case Err::CharacteristicMismatch: return "CharacteristicMismatch";
    case Err::FieldTooSmall: return "FieldTooSmall";
    case Err::DivisionByZero: return "DivisionByZero";
    case Err::CoincidentPoints: return "CoincidentPoints";
    case Err::CoincidentLines: return "CoincidentLines";
    case Err::DegenerateTuple: return "DegenerateTuple";
    case Err::PointNotOnLine: return "PointNotOnLine";
    case Err::SyntaxError: return "SyntaxError";
    case Err::ReservedVariable: return "ReservedVariable";
    case Err::BudgetExceeded: return "BudgetExceeded";
    case Err::DuplicateElement: return "DuplicateElement";
    case Err::UnintendedIncidence: return "UnintendedIncidence";
    case Err::IntendedIncidenceFails: return "IntendedIncidenceFails";
    case Err::ConcurrencyViolation: return "ConcurrencyViolation";
    case Err::CoincidenceRetryExhausted: return "CoincidenceRetryExhausted";
    case Err::CharTwo: return "CharTwo";
    case Err::CoincidentInputs: return "CoincidentInputs";
    case Err::CaseViolation: return "CaseViolation";
    case Err::DegenerateChoice: return "DegenerateChoice";
    case Err::WitnessDoesNotSolve: return "WitnessDoesNotSolve";
    case Err::SchemaError: return "SchemaError";
    case Err::TooLargeToRender: return "TooLargeToRender";
    case Err::UsageError: return "UsageError";
  }
  return "Unknown";
}

namespace {

constexpr std::uint64_t kMaxPrime = 1ull << 20;
constexpr std::uint32_t kMaxDegreeOdd = 24;
constexpr std::uint32_t kMaxDegree2 = 62;

using fpk::addm;
using fpk::subm;
using fpk::mulm;
std::uint64_t powm(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  while (e) {
    if (e & 1) r = mulm(r, a, p);
    a = mulm(a, a, p);
    e >>= 1;
  }
  return r;
}
std::uint64_t invm(std::uint64_t a, std::uint64_t p) {
  if (a == 0) fail(Err::DivisionByZero, "inverse of 0 mod p");
  return powm(a, p - 2, p);
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// ---- dense polynomials over F_p (vector of coefficients, constant first) ----

using Fpx = std::vector<std::uint64_t>;

void fpx_trim(Fpx& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Fpx fpx_mul(const Fpx& a, const Fpx& b, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Fpx r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = addm(r[i + j], mulm(a[i], b[j], p), p);
  }
  return r;
}

// a mod f, f monic
Fpx fpx_mod(Fpx a, const Fpx& f, std::uint64_t p) {
  fpx_trim(a);
  const std::size_t df = f.size() - 1;
  while (a.size() > df) {
    std::uint64_t c = a.back();
    std::size_t shift = a.size() - 1 - df;
    if (c) {
      for (std::size_t j = 0; j < df; ++j) a[shift + j] = subm(a[shift + j], mulm(c, f[j], p), p);
    }
    a.pop_back();
    fpx_trim(a);
  }
  return a;
}

Fpx fpx_mulmod(const Fpx& a, const Fpx& b, const Fpx& f, std::uint64_t p) {
  return fpx_mod(fpx_mul(a, b, p), f, p);
}

Fpx fpx_powmod(Fpx base, const mpz_class& e, const Fpx& f, std::uint64_t p) {
  Fpx r{1 % p};
  fpx_trim(r);
  base = fpx_mod(std::move(base), f, p);
  const mp_bitcnt_t nb = mpz_sizeinbase(e.get_mpz_t(), 2);
  if (e == 0) return r;
  for (mp_bitcnt_t i = nb; i-- > 0;) {
    r = fpx_mulmod(r, r, f, p);
    if (mpz_tstbit(e.get_mpz_t(), i)) r = fpx_mulmod(r, base, f, p);
  }
  return r;
}

Fpx fpx_gcd(Fpx a, Fpx b, std::uint64_t p) {
  fpx_trim(a);
  fpx_trim(b);
  while (!b.empty()) {
    // fpx_mod expects a monic divisor
    if (b.back() != 1) {
      std::uint64_t s = invm(b.back(), p);
      for (auto& c : b) c = mulm(c, s, p);
    }
    Fpx r = fpx_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty() && a.back() != 1) {
    std::uint64_t s = invm(a.back(), p);
    for (auto& c : a) c = mulm(c, s, p);
  }
  return a;
}

// Rabin irreducibility: f (monic, degree k) over F_p is irreducible iff
// x^{p^k} = x mod f and gcd(x^{p^{k/q}} - x, f) = 1 for every prime q | k.
bool fpx_irreducible(const Fpx& f, std::uint64_t p) {
  const std::size_t k = f.size() - 1;
  if (k == 0) return false;
  if (f[0] == 0) return k == 1;
  Fpx x{0, 1};
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(k));
  Fpx xq = fpx_powmod(x, pk, f, p);
  Fpx diff = xq;
  // xq - x
  if (diff.size() < 2) diff.resize(2, 0);
  diff[1] = subm(diff[1], 1, p);
  fpx_trim(diff);
  if (!diff.empty()) return false;
  std::uint64_t kk = k;
  for (std::uint64_t q = 2; q * q <= kk; ++q) {
    if (kk % q) continue;
    while (kk % q == 0) kk /= q;
    mpz_class e;
    mpz_ui_pow_ui(e.get_mpz_t(), p, static_cast<unsigned long>(k / q));
    Fpx xe = fpx_powmod(x, e, f, p);
    if (xe.size() < 2) xe.resize(2, 0);
    xe[1] = subm(xe[1], 1, p);
    fpx_trim(xe);
    Fpx g = fpx_gcd(xe, f, p);
    if (g.size() > 1) return false;
  }
  if (kk > 1) {
    mpz_class e;
    mpz_ui_pow_ui(e.get_mpz_t(), p, static_cast<unsigned long>(k / kk));
    Fpx xe = fpx_powmod(x, e, f, p);
    if (xe.size() < 2) xe.resize(2, 0);
    xe[1] = subm(xe[1], 1, p);
    fpx_trim(xe);
    Fpx g = fpx_gcd(xe, f, p);
    if (g.size() > 1) return false;
  }
  return true;
}

// extended gcd for coefficient-vector elements: inverse of a mod f
Fpx fpx_invmod(const Fpx& a0, const Fpx& f, std::uint64_t p) {
  Fpx r0 = f, r1 = fpx_mod(a0, f, p);
  if (r1.empty()) fail(Err::DivisionByZero, "inverse of 0");
  Fpx s0{}, s1{1};
  while (!r1.empty()) {
    // r0 = q*r1 + r2 via repeated leading-term elimination
    Fpx q;
    Fpx r2 = r0;
    fpx_trim(r2);
    const std::size_t d1 = r1.size() - 1;
    std::uint64_t lead_inv = invm(r1.back(), p);
    while (r2.size() >= r1.size() && !r2.empty()) {
      std::size_t shift = r2.size() - 1 - d1;
      std::uint64_t c = mulm(r2.back(), lead_inv, p);
      if (q.size() < shift + 1) q.resize(shift + 1, 0);
      q[shift] = addm(q[shift], c, p);
      for (std::size_t j = 0; j < r1.size(); ++j)
        r2[shift + j] = subm(r2[shift + j], mulm(c, r1[j], p), p);
      fpx_trim(r2);
    }
    Fpx qs1 = fpx_mul(q, s1, p);
    Fpx s2 = s0;
    if (s2.size() < qs1.size()) s2.resize(qs1.size(), 0);
    for (std::size_t j = 0; j < qs1.size(); ++j) s2[j] = subm(s2[j], qs1[j], p);
    fpx_trim(s2);
    r0 = std::move(r1);
    r1 = std::move(r2);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  // r0 = gcd (a unit since f irreducible); normalize
  if (r0.size() != 1) fail(Err::DivisionByZero, "non-invertible element");
  std::uint64_t s = invm(r0[0], p);
  for (auto& c : s0) c = mulm(c, s, p);
  s0 = fpx_mod(std::move(s0), f, p);
  return s0;
}

// ---- bit-packed polynomials over F_2 (degree <= 62) ----

using fpk::bit_deg;
using fpk::clmul;
using fpk::bit_mod;
using fpk::bit_mulmod;

std::uint64_t bit_invmod(std::uint64_t a, std::uint64_t f) {
  if (!a) fail(Err::DivisionByZero, "inverse of 0");
  std::uint64_t r0 = f, r1 = a, s0 = 0, s1 = 1;
  while (r1) {
    // divide r0 by r1
    std::uint64_t q = 0, r2 = r0;
    int d1 = bit_deg(r1);
    while (bit_deg(r2) >= d1) {
      int sh = bit_deg(r2) - d1;
      q ^= 1ull << sh;
      r2 ^= r1 << sh;
    }
    std::uint64_t s2 = s0 ^ static_cast<std::uint64_t>(clmul(q, s1));
    r0 = r1;
    r1 = r2;
    s0 = s1;
    s1 = s2;
  }
  return bit_mod(clmul(s0, 1), f);
}

}  // namespace

// ---- FieldSpec ----

std::uint64_t FieldSpec::order_clamped() const {
  if (rational()) return ~0ull;
  unsigned __int128 o = 1;
  for (std::uint32_t i = 0; i < degree; ++i) {
    o *= characteristic;
    if (o > ((unsigned __int128)1 << 62)) return 1ull << 62;
  }
  return static_cast<std::uint64_t>(o);
}

std::string FieldSpec::name() const {
  if (rational()) return "Q";
  std::ostringstream os;
  if (degree == 1)
    os << "F_" << characteristic;
  else
    os << "F_{" << characteristic << "^" << degree << "}";
  return os.str();
}

FieldPtr make_field(std::uint64_t p, std::uint32_t k) {
  if (p == 0) {
    if (k != 1) fail(Err::DegreeOutOfRange, "characteristic 0 requires degree 1");
    static FieldPtr q = std::make_shared<FieldSpec>(FieldSpec{0, 1, {}});
    return q;
  }
  if (!is_prime_u64(p) || p > kMaxPrime) fail(Err::NotPrime, "characteristic must be prime <= 2^20: " + std::to_string(p));
  const std::uint32_t cap = (p == 2) ? kMaxDegree2 : kMaxDegreeOdd;
  if (k < 1 || k > cap) fail(Err::DegreeOutOfRange, "degree " + std::to_string(k) + " out of range for p=" + std::to_string(p));
  {
    long double sz = 1;
    for (std::uint32_t i = 0; i < k; ++i) sz *= static_cast<long double>(p);
    if (sz > static_cast<long double>(1ull << 62)) fail(Err::DegreeOutOfRange, "p^k exceeds 2^62");
  }

  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, std::uint32_t>, FieldPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({p, k});
  if (it != cache.end()) return it->second;

  FieldSpec spec;
  spec.characteristic = p;
  spec.degree = k;
  if (k >= 2) {
    // lexicographically smallest monic irreducible, constant term first
    Fpx f(k + 1, 0);
    f[k] = 1;
    std::vector<std::uint64_t> c(k, 0);
    bool found = false;
    while (!found) {
      for (std::uint32_t i = 0; i < k; ++i) f[i] = c[i];
      if (c[0] != 0 && fpx_irreducible(f, p)) {
        found = true;
        break;
      }
      // lex ascending: last coordinate varies fastest
      int i = static_cast<int>(k) - 1;
      while (i >= 0 && c[i] == p - 1) c[i--] = 0;
      if (i < 0) fail(Err::DegreeOutOfRange, "no irreducible found (unreachable)");
      ++c[i];
    }
    spec.modulus.assign(f.begin(), f.end());
  }
  FieldPtr ptr = std::make_shared<FieldSpec>(std::move(spec));
  cache[{p, k}] = ptr;
  return ptr;
}

// ---- Scalar ----

namespace {

// modulus as a bitmask for p == 2 fields (includes leading bit); x^k itself for k==1 is unused
std::uint64_t modulus_bits(const FieldSpec& s) {
  std::uint64_t m = 0;
  for (std::uint32_t i = 0; i <= s.degree; ++i)
    if (i < s.modulus.size() && s.modulus[i]) m |= 1ull << i;
  if (s.degree == 1) m = 2;  // t
  return m;
}

}  // namespace

Scalar::Scalar() : spec_(make_field(0, 1)), rat_(0) {}

Scalar Scalar::zero(const FieldPtr& f) {
  Scalar s;
  s.spec_ = f;
  if (!f->rational()) {
    s.rat_ = 0;
    s.fp_.assign(f->characteristic == 2 ? 1 : f->degree, 0);
  }
  return s;
}

Scalar Scalar::one(const FieldPtr& f) { return of_int(f, 1); }

Scalar Scalar::of_int(const FieldPtr& f, long v) { return of_mpz(f, mpz_class(v)); }

Scalar Scalar::of_mpz(const FieldPtr& f, const mpz_class& v) {
  Scalar s = zero(f);
  if (f->rational()) {
    s.rat_ = mpq_class(v);
  } else {
    mpz_class r = v % static_cast<unsigned long>(f->characteristic);
    if (r < 0) r += static_cast<unsigned long>(f->characteristic);
    s.fp_[0] = r.get_ui();
  }
  return s;
}

Scalar Scalar::of_rational(const mpq_class& v) {
  Scalar s;
  s.rat_ = v;
  s.rat_.canonicalize();
  return s;
}

Scalar Scalar::from_coeffs(const FieldPtr& f, const std::vector<std::uint64_t>& coeffs) {
  if (f->rational()) fail(Err::CharacteristicMismatch, "coefficient vector over Q");
  if (coeffs.size() > f->degree) fail(Err::DegreeOutOfRange, "too many coefficients");
  Scalar s = zero(f);
  const std::uint64_t p = f->characteristic;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    std::uint64_t c = coeffs[i] % p;
    if (p == 2) {
      if (c) s.fp_[0] |= 1ull << i;
    } else {
      s.fp_[i] = c;
    }
  }
  return s;
}

bool Scalar::is_zero() const {
  if (spec_->rational()) return rat_ == 0;
  for (auto c : fp_)
    if (c) return false;
  return true;
}

bool Scalar::is_one() const {
  if (spec_->rational()) return rat_ == 1;
  if (spec_->characteristic == 2) return fp_[0] == 1;
  if (fp_[0] != 1) return false;
  for (std::size_t i = 1; i < fp_.size(); ++i)
    if (fp_[i]) return false;
  return true;
}

std::uint64_t Scalar::coeff(std::uint32_t i) const {
  if (spec_->rational()) fail(Err::CharacteristicMismatch, "coeff() on rational");
  if (i >= spec_->degree) return 0;
  if (spec_->characteristic == 2) return (fp_[0] >> i) & 1;
  return fp_[i];
}

std::vector<std::uint64_t> Scalar::coeffs() const {
  std::vector<std::uint64_t> out(spec_->degree);
  for (std::uint32_t i = 0; i < spec_->degree; ++i) out[i] = coeff(i);
  return out;
}

const mpq_class& Scalar::rat() const {
  if (!spec_->rational()) fail(Err::CharacteristicMismatch, "rat() on finite-field element");
  return rat_;
}

namespace {
void check_same(const Scalar& a, const Scalar& b) {
  if (!a.spec()->same(*b.spec())) fail(Err::CharacteristicMismatch, "mixed field operands");
}
}  // namespace

Scalar operator+(const Scalar& a, const Scalar& b) {
  check_same(a, b);
  Scalar r = a;
  const auto& s = *a.spec_;
  if (s.rational()) {
    r.rat_ += b.rat_;
  } else if (s.characteristic == 2) {
    r.fp_[0] ^= b.fp_[0];
  } else {
    for (std::size_t i = 0; i < r.fp_.size(); ++i) r.fp_[i] = addm(r.fp_[i], b.fp_[i], s.characteristic);
  }
  return r;
}

Scalar operator-(const Scalar& a, const Scalar& b) {
  check_same(a, b);
  Scalar r = a;
  const auto& s = *a.spec_;
  if (s.rational()) {
    r.rat_ -= b.rat_;
  } else if (s.characteristic == 2) {
    r.fp_[0] ^= b.fp_[0];
  } else {
    for (std::size_t i = 0; i < r.fp_.size(); ++i) r.fp_[i] = subm(r.fp_[i], b.fp_[i], s.characteristic);
  }
  return r;
}

Scalar Scalar::operator-() const {
  Scalar r = *this;
  const auto& s = *spec_;
  if (s.rational()) {
    r.rat_ = -r.rat_;
  } else if (s.characteristic != 2) {
    for (auto& c : r.fp_) c = c ? s.characteristic - c : 0;
  }
  return r;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  check_same(a, b);
  Scalar r = a;
  const auto& s = *a.spec_;
  const std::uint64_t p = s.characteristic;
  if (s.rational()) {
    r.rat_ *= b.rat_;
    return r;
  }
  if (p == 2) {
    if (s.degree == 1)
      r.fp_[0] = a.fp_[0] & b.fp_[0];
    else
      r.fp_[0] = bit_mulmod(a.fp_[0], b.fp_[0], modulus_bits(s));
    return r;
  }
  if (s.degree == 1) {
    r.fp_[0] = mulm(a.fp_[0], b.fp_[0], p);
    return r;
  }
  // schoolbook convolution; p < 2^20 and degree <= 24 keep sums in 64 bits
  const std::uint32_t k = s.degree;
  std::uint64_t acc[2 * kMaxDegreeOdd] = {0};
  for (std::uint32_t i = 0; i < k; ++i) {
    if (!a.fp_[i]) continue;
    for (std::uint32_t j = 0; j < k; ++j) acc[i + j] += a.fp_[i] * b.fp_[j];
  }
  // reduce degree 2k-2 .. k using the monic modulus
  for (std::uint32_t d = 2 * k - 2; d >= k; --d) {
    std::uint64_t c = acc[d] % p;
    if (c) {
      for (std::uint32_t j = 0; j < k; ++j) {
        std::uint64_t mj = s.modulus[j] % p;
        if (mj) acc[d - k + j] += c * (p - mj);
      }
    }
    acc[d] = 0;
    if (d == k) break;
  }
  for (std::uint32_t i = 0; i < k; ++i) r.fp_[i] = acc[i] % p;
  return r;
}

Scalar Scalar::inv() const {
  const auto& s = *spec_;
  if (s.rational()) {
    if (rat_ == 0) fail(Err::DivisionByZero, "1/0 over Q");
    Scalar r = *this;
    r.rat_ = 1 / rat_;
    return r;
  }
  if (is_zero()) fail(Err::DivisionByZero, "1/0 over " + s.name());
  Scalar r = *this;
  const std::uint64_t p = s.characteristic;
  if (p == 2) {
    r.fp_[0] = s.degree == 1 ? 1 : bit_invmod(fp_[0], modulus_bits(s));
    return r;
  }
  if (s.degree == 1) {
    r.fp_[0] = invm(fp_[0], p);
    return r;
  }
  Fpx f(s.modulus.begin(), s.modulus.end());
  Fpx a(fp_.begin(), fp_.end());
  fpx_trim(a);
  Fpx in = fpx_invmod(a, f, p);
  std::fill(r.fp_.begin(), r.fp_.end(), 0);
  for (std::size_t i = 0; i < in.size(); ++i) r.fp_[i] = in[i];
  return r;
}

Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inv(); }

Scalar Scalar::pow(const mpz_class& e) const {
  if (e < 0) return inv().pow(-e);
  Scalar r = Scalar::one(spec_);
  if (e == 0) return r;
  const mp_bitcnt_t nb = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (mp_bitcnt_t i = nb; i-- > 0;) {
    r = r * r;
    if (mpz_tstbit(e.get_mpz_t(), i)) r = r * *this;
  }
  return r;
}

bool operator==(const Scalar& a, const Scalar& b) {
  check_same(a, b);
  if (a.spec_->rational()) return a.rat_ == b.rat_;
  return a.fp_ == b.fp_;
}

int Scalar::cmp(const Scalar& a, const Scalar& b) {
  check_same(a, b);
  if (a.spec_->rational()) return ::cmp(a.rat_, b.rat_);
  const std::uint32_t k = a.spec_->degree;
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uint64_t ca = a.coeff(i), cb = b.coeff(i);
    if (ca != cb) return ca < cb ? -1 : 1;
  }
  return 0;
}

std::string Scalar::str() const {
  std::ostringstream os;
  if (spec_->rational()) {
    os << rat_.get_num().get_str() << "/" << rat_.get_den().get_str();
    return os.str();
  }
  os << "[";
  for (std::uint32_t i = 0; i < spec_->degree; ++i) {
    if (i) os << ",";
    os << coeff(i);
  }
  os << "]";
  return os.str();
}

// ---- enumeration ----

void enumerate_field(const FieldPtr& f, std::uint64_t budget,
                     const std::function<bool(const Scalar&)>& fn) {
  if (f->rational()) fail(Err::BudgetExceeded, "cannot enumerate Q");
  if (f->order_clamped() > budget) fail(Err::BudgetExceeded, "field order exceeds budget");
  const std::uint64_t p = f->characteristic;
  std::vector<std::uint64_t> c(f->degree, 0);
  while (true) {
    if (!fn(Scalar::from_coeffs(f, c))) return;
    // canonical (lexicographic, constant first) successor: last coeff fastest
    int i = static_cast<int>(f->degree) - 1;
    while (i >= 0 && c[i] == p - 1) c[i--] = 0;
    if (i < 0) return;
    ++c[i];
  }
}

// ---- embedding ----

namespace {

// Gaussian elimination over F_p: solve M x = rhs; returns particular solution
// and writes kernel basis. M is column-major: M[c] is column c, length nrows.
struct LinSolve {
  bool consistent = false;
  std::vector<std::uint64_t> particular;                // length ncols
  std::vector<std::vector<std::uint64_t>> kernel;       // each length ncols
};

LinSolve solve_mod_p(std::vector<std::vector<std::uint64_t>> cols,
                     std::vector<std::uint64_t> rhs, std::uint64_t p) {
  const std::size_t ncols = cols.size();
  const std::size_t nrows = rhs.size();
  // build row-major augmented matrix
  std::vector<std::vector<std::uint64_t>> m(nrows, std::vector<std::uint64_t>(ncols + 1, 0));
  for (std::size_t c = 0; c < ncols; ++c)
    for (std::size_t r = 0; r < nrows; ++r) m[r][c] = cols[c][r] % p;
  for (std::size_t r = 0; r < nrows; ++r) m[r][ncols] = rhs[r] % p;

  std::vector<int> pivot_of_col(ncols, -1);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < ncols && rank < nrows; ++c) {
    std::size_t sel = rank;
    while (sel < nrows && m[sel][c] == 0) ++sel;
    if (sel == nrows) continue;
    std::swap(m[sel], m[rank]);
    std::uint64_t iv = invm(m[rank][c], p);
    for (std::size_t j = c; j <= ncols; ++j) m[rank][j] = mulm(m[rank][j], iv, p);
    for (std::size_t r = 0; r < nrows; ++r) {
      if (r == rank || m[r][c] == 0) continue;
      std::uint64_t factor = m[r][c];
      for (std::size_t j = c; j <= ncols; ++j)
        m[r][j] = subm(m[r][j], mulm(factor, m[rank][j], p), p);
    }
    pivot_of_col[c] = static_cast<int>(rank);
    ++rank;
  }
  LinSolve out;
  for (std::size_t r = rank; r < nrows; ++r)
    if (m[r][ncols] != 0) return out;  // inconsistent
  out.consistent = true;
  out.particular.assign(ncols, 0);
  for (std::size_t c = 0; c < ncols; ++c)
    if (pivot_of_col[c] >= 0) out.particular[c] = m[pivot_of_col[c]][ncols];
  for (std::size_t c = 0; c < ncols; ++c) {
    if (pivot_of_col[c] >= 0) continue;
    std::vector<std::uint64_t> v(ncols, 0);
    v[c] = 1;
    for (std::size_t c2 = 0; c2 < ncols; ++c2)
      if (pivot_of_col[c2] >= 0) v[c2] = subm(0, m[pivot_of_col[c2]][c], p);
    out.kernel.push_back(std::move(v));
  }
  return out;
}

// canonical-min root of the source modulus inside the target field; cached
Scalar embedding_root(const FieldPtr& src, const FieldPtr& tgt) {
  using Key = std::pair<std::pair<std::uint64_t, std::uint32_t>, std::uint32_t>;
  static std::mutex mu;
  static std::map<Key, Scalar> cache;
  Key key{{src->characteristic, src->degree}, tgt->degree};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const std::uint64_t p = src->characteristic;
  const std::uint32_t ks = src->degree, N = tgt->degree;
  // subfield F_{p^ks} inside tgt = kernel of Frobenius^ks - id
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), p, ks);
  std::vector<std::vector<std::uint64_t>> cols;
  for (std::uint32_t i = 0; i < N; ++i) {
    std::vector<std::uint64_t> e(N, 0);
    e[i] = 1;
    Scalar bi = Scalar::from_coeffs(tgt, e);
    Scalar fi = bi.pow(pk) - bi;
    cols.push_back(fi.coeffs());
  }
  LinSolve ls = solve_mod_p(cols, std::vector<std::uint64_t>(N, 0), p);
  {
    long double combos = 1;
    for (std::size_t i = 0; i < ls.kernel.size(); ++i) combos *= static_cast<long double>(p);
    if (combos > (1 << 20)) fail(Err::BudgetExceeded, "embedding subfield too large to enumerate");
  }
  // enumerate kernel combinations, collect roots of the source modulus
  std::vector<std::uint64_t> lambda(ls.kernel.size(), 0);
  std::optional<Scalar> best;
  std::vector<Scalar> g;  // source modulus as target-field constants
  for (std::uint32_t i = 0; i <= ks; ++i)
    g.push_back(Scalar::of_mpz(tgt, mpz_class(src->modulus[i])));
  while (true) {
    std::vector<std::uint64_t> v(N, 0);
    for (std::size_t b = 0; b < lambda.size(); ++b) {
      if (!lambda[b]) continue;
      for (std::uint32_t i = 0; i < N; ++i)
        v[i] = addm(v[i], mulm(lambda[b], ls.kernel[b][i], p), p);
    }
    Scalar y = Scalar::from_coeffs(tgt, v);
    Scalar val = Scalar::zero(tgt);
    for (std::uint32_t i = ks + 1; i-- > 0;) val = val * y + g[i];
    if (val.is_zero()) {
      if (!best || Scalar::cmp(y, *best) < 0) best = y;
    }
    std::size_t b = lambda.size();
    while (b > 0 && lambda[b - 1] == p - 1) lambda[--b] = 0;
    if (b == 0) break;
    ++lambda[b - 1];
  }
  if (!best) fail(Err::NoEmbedding, "no root of source modulus in target (internal)");
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, *best);
  return *best;
}

}  // namespace

Scalar embed(const Scalar& x, const FieldPtr& target) {
  const FieldPtr& src = x.spec();
  if (src->characteristic != target->characteristic)
    fail(Err::CharacteristicMismatch, "embed across characteristics");
  if (src->rational()) return x;
  if (target->degree % src->degree != 0)
    fail(Err::NoEmbedding, "source degree does not divide target degree");
  if (src->degree == target->degree) {
    Scalar r = Scalar::from_coeffs(target, x.coeffs());
    return r;
  }
  if (src->degree == 1) return Scalar::of_mpz(target, mpz_class(x.coeff(0)));
  Scalar alpha = embedding_root(src, target);
  Scalar acc = Scalar::zero(target);
  for (std::uint32_t i = src->degree; i-- > 0;)
    acc = acc * alpha + Scalar::of_mpz(target, mpz_class(x.coeff(i)));
  return acc;
}

// ---- sampling ----

Scalar sample_general(const FieldPtr& f, const std::vector<Scalar>& forbidden, Sampler& rng) {
  // distinct forbidden values only
  std::vector<Scalar> forb = forbidden;
  std::sort(forb.begin(), forb.end(), [](const Scalar& a, const Scalar& b) { return Scalar::cmp(a, b) < 0; });
  forb.erase(std::unique(forb.begin(), forb.end()), forb.end());
  auto is_forbidden = [&](const Scalar& s) {
    auto it = std::lower_bound(forb.begin(), forb.end(), s,
                               [](const Scalar& a, const Scalar& b) { return Scalar::cmp(a, b) < 0; });
    return it != forb.end() && *it == s;
  };

  if (f->rational()) {
    const long long W = rng.char0_window();
    const unsigned long long span = 2ull * W + 1;
    if (forb.size() >= span) fail(Err::FieldTooSmall, "char-0 window exhausted");
    for (int tries = 0; tries < 10000; ++tries) {
      long long v = static_cast<long long>(rng.raw() % span) - W;
      Scalar s = Scalar::of_rational(mpq_class(static_cast<long>(v)));
      if (!is_forbidden(s)) return s;
    }
    for (long long v = -W; v <= W; ++v) {
      Scalar s = Scalar::of_rational(mpq_class(static_cast<long>(v)));
      if (!is_forbidden(s)) return s;
    }
    fail(Err::FieldTooSmall, "char-0 window exhausted");
  }

  if (forb.size() >= f->order_clamped())
    fail(Err::FieldTooSmall, f->name() + " exhausted by forbidden set");
  const std::uint64_t p = f->characteristic;
  for (int tries = 0; tries < 10000; ++tries) {
    std::vector<std::uint64_t> c(f->degree);
    for (auto& ci : c) ci = rng.raw() % p;
    Scalar s = Scalar::from_coeffs(f, c);
    if (!is_forbidden(s)) return s;
  }
  // deterministic fallback: first admissible element in canonical order
  Scalar out = Scalar::zero(f);
  bool found = false;
  enumerate_field(f, ~0ull >> 1, [&](const Scalar& s) {
    if (!is_forbidden(s)) {
      out = s;
      found = true;
      return false;
    }
    return true;
  });
  if (!found) fail(Err::FieldTooSmall, f->name() + " exhausted");
  return out;
}

// ---- quadratic roots ----

namespace {

// square root in F_q, q odd (Tonelli-Shanks); nullopt if non-residue
std::optional<Scalar> sqrt_odd(const Scalar& d, const FieldPtr& f) {
  if (d.is_zero()) return Scalar::zero(f);
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), f->characteristic, f->degree);
  mpz_class qm1 = q - 1;
  Scalar leg = d.pow(qm1 / 2);
  if (!leg.is_one()) return std::nullopt;
  // q - 1 = Q * 2^S
  mpz_class Q = qm1;
  unsigned long S = 0;
  while (mpz_even_p(Q.get_mpz_t())) {
    Q /= 2;
    ++S;
  }
  if (S == 1) {
    return d.pow((q + 1) / 4);
  }
  // first non-residue in canonical order
  Scalar z = Scalar::zero(f);
  bool found = false;
  enumerate_field(f, ~0ull >> 1, [&](const Scalar& s) {
    if (s.is_zero()) return true;
    if (!s.pow(qm1 / 2).is_one()) {
      z = s;
      found = true;
      return false;
    }
    return true;
  });
  if (!found) fail(Err::NotPrime, "no quadratic non-residue (field of even order?)");
  unsigned long M = S;
  Scalar c = z.pow(Q);
  Scalar t = d.pow(Q);
  Scalar r = d.pow((Q + 1) / 2);
  while (!t.is_one()) {
    // find least i with t^{2^i} = 1
    unsigned long i = 0;
    Scalar tt = t;
    while (!tt.is_one()) {
      tt = tt * tt;
      ++i;
      if (i == M) return std::nullopt;  // defensive; cannot happen for residues
    }
    Scalar b = c;
    for (unsigned long j = 0; j + i + 1 < M; ++j) b = b * b;
    M = i;
    c = b * b;
    t = t * c;
    r = r * b;
  }
  return r;
}

// solutions of u^2 + u = c over F_{2^N} via F_2-linear algebra
std::vector<Scalar> artin_schreier_solve(const Scalar& c, const FieldPtr& f) {
  const std::uint32_t N = f->degree;
  std::vector<std::vector<std::uint64_t>> cols;
  for (std::uint32_t i = 0; i < N; ++i) {
    std::vector<std::uint64_t> e(N, 0);
    e[i] = 1;
    Scalar bi = Scalar::from_coeffs(f, e);
    Scalar li = bi * bi + bi;
    cols.push_back(li.coeffs());
  }
  LinSolve ls = solve_mod_p(cols, c.coeffs(), 2);
  std::vector<Scalar> out;
  if (!ls.consistent) return out;
  Scalar u0 = Scalar::from_coeffs(f, ls.particular);
  out.push_back(u0);
  for (const auto& kv : ls.kernel) out.push_back(u0 + Scalar::from_coeffs(f, kv));
  return out;
}

}  // namespace

std::optional<Scalar> find_quadratic_root(const Scalar& c0, const Scalar& c1, const FieldPtr& f) {
  auto verify = [&](const Scalar& r) { return (r * r + c1 * r + c0).is_zero(); };
  if (f->rational()) {
    // discriminant must be the square of a rational
    mpq_class disc = c1.rat() * c1.rat() - 4 * c0.rat();
    if (disc < 0) return std::nullopt;
    mpz_class num = disc.get_num(), den = disc.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
      return std::nullopt;
    mpz_class sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    mpq_class s(sn, sd);
    s.canonicalize();
    mpq_class r1 = (-c1.rat() + s) / 2, r2 = (-c1.rat() - s) / 2;
    Scalar a = Scalar::of_rational(r1 < r2 ? r1 : r2);
    if (!verify(a)) fail(Err::DegenerateTuple, "internal: bad rational root");
    return a;
  }
  if (f->characteristic == 2) {
    std::vector<Scalar> roots;
    if (c1.is_zero()) {
      // t^2 = c0: Frobenius is bijective, sqrt = c0^{2^{N-1}}
      mpz_class e;
      mpz_ui_pow_ui(e.get_mpz_t(), 2, f->degree == 0 ? 0 : f->degree - 1);
      roots.push_back(c0.pow(e));
    } else {
      // t = c1 u reduces to u^2 + u = c0 / c1^2
      Scalar c = c0 / (c1 * c1);
      for (const Scalar& u : artin_schreier_solve(c, f)) roots.push_back(c1 * u);
    }
    std::optional<Scalar> best;
    for (const Scalar& r : roots) {
      if (!verify(r)) continue;
      if (!best || Scalar::cmp(r, *best) < 0) best = r;
    }
    return best;
  }
  // odd characteristic: quadratic formula
  Scalar disc = c1 * c1 - Scalar::of_int(f, 4) * c0;
  auto s = sqrt_odd(disc, f);
  if (!s) return std::nullopt;
  Scalar two_inv = Scalar::of_int(f, 2).inv();
  Scalar r1 = (-c1 + *s) * two_inv, r2 = (-c1 - *s) * two_inv;
  Scalar best = Scalar::cmp(r1, r2) <= 0 ? r1 : r2;
  if (!verify(best)) fail(Err::DegenerateTuple, "internal: bad quadratic root");
  return best;
}

}  // namespace staudt
