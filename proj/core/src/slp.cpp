#include "staudt/slp.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace staudt {

// ---- Poly ----

void Poly::set_nvars(std::uint32_t n) {
  if (n < nvars) fail(Err::SchemaError, "cannot shrink variable count");
  if (n == nvars) return;
  std::map<std::vector<std::uint32_t>, mpz_class> wide;
  for (const auto& [e, c] : terms) {
    std::vector<std::uint32_t> w = e;
    w.resize(n, 0);
    wide.emplace(std::move(w), c);
  }
  terms = std::move(wide);
  nvars = n;
}

Poly Poly::constant(std::uint32_t n, const mpz_class& c) {
  Poly p = zero(n);
  if (c != 0) p.terms.emplace(std::vector<std::uint32_t>(n, 0), c);
  return p;
}

Poly Poly::variable(std::uint32_t n, std::uint32_t i) {
  Poly p = zero(n);
  std::vector<std::uint32_t> e(n, 0);
  e[i - 1] = 1;
  p.terms.emplace(std::move(e), 1);
  return p;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r = a;
  Poly bb = b;
  std::uint32_t n = std::max(a.nvars, b.nvars);
  r.set_nvars(n);
  bb.set_nvars(n);
  for (const auto& [e, c] : bb.terms) {
    auto it = r.terms.find(e);
    if (it == r.terms.end()) {
      r.terms.emplace(e, c);
    } else {
      it->second += c;
      if (it->second == 0) r.terms.erase(it);
    }
  }
  return r;
}

Poly operator-(const Poly& a) {
  Poly r = a;
  for (auto& [e, c] : r.terms) c = -c;
  return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
  std::uint32_t n = std::max(a.nvars, b.nvars);
  Poly aa = a, bb = b;
  aa.set_nvars(n);
  bb.set_nvars(n);
  Poly r = Poly::zero(n);
  for (const auto& [ea, ca] : aa.terms) {
    for (const auto& [eb, cb] : bb.terms) {
      std::vector<std::uint32_t> e(n);
      for (std::uint32_t i = 0; i < n; ++i) e[i] = ea[i] + eb[i];
      mpz_class c = ca * cb;
      auto it = r.terms.find(e);
      if (it == r.terms.end()) {
        r.terms.emplace(std::move(e), c);
      } else {
        it->second += c;
        if (it->second == 0) r.terms.erase(it);
      }
    }
  }
  return r;
}

bool operator==(const Poly& a, const Poly& b) {
  Poly aa = a, bb = b;
  std::uint32_t n = std::max(a.nvars, b.nvars);
  aa.set_nvars(n);
  bb.set_nvars(n);
  return aa.terms == bb.terms;
}

Scalar Poly::eval(const std::vector<Scalar>& xs, FieldPtr f) const {
  if (xs.size() < nvars) fail(Err::SchemaError, "eval: not enough inputs");
  if (!f) f = xs.empty() ? make_field(0, 1) : xs[0].spec();
  Scalar acc = Scalar::zero(f);
  for (const auto& [e, c] : terms) {
    Scalar t = Scalar::of_mpz(f, c);
    for (std::uint32_t i = 0; i < nvars; ++i)
      for (std::uint32_t k = 0; k < e[i]; ++k) t = t * xs[i];
    acc = acc + t;
  }
  return acc;
}

std::string Poly::str() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // leading monomials first (reverse lexicographic on exponent vectors)
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    const auto& [e, c] = *it;
    mpz_class ac = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool has_var = std::any_of(e.begin(), e.end(), [](std::uint32_t x) { return x > 0; });
    if (ac != 1 || !has_var) {
      os << ac.get_str();
      if (has_var) os << "*";
    }
    bool first_var = true;
    for (std::uint32_t i = 0; i < nvars; ++i) {
      if (!e[i]) continue;
      if (!first_var) os << "*";
      first_var = false;
      os << "x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

// ---- parser ----

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;
  std::uint32_t max_var = 0;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void err(const std::string& what) {
    fail(Err::SyntaxError, what + " at position " + std::to_string(pos));
  }

  Poly parse_expr() {
    skip_ws();
    bool neg = false;
    if (eat('-')) neg = true;
    else eat('+');
    Poly acc = parse_term();
    if (neg) acc = -acc;
    while (true) {
      skip_ws();
      if (eat('+')) {
        acc = acc + parse_term();
      } else if (eat('-')) {
        acc = acc - parse_term();
      } else {
        break;
      }
    }
    return acc;
  }

  Poly parse_term() {
    Poly acc = parse_factor();
    while (true) {
      skip_ws();
      if (eat('*')) {
        acc = acc * parse_factor();
      } else {
        break;
      }
    }
    return acc;
  }

  Poly parse_factor() {
    Poly base = parse_base();
    skip_ws();
    if (eat('^')) {
      skip_ws();
      if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) err("expected exponent");
      std::uint64_t e = 0;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        e = e * 10 + (s[pos] - '0');
        if (e > 64) err("exponent too large");
        ++pos;
      }
      Poly acc = Poly::constant(base.nvars, 1);
      for (std::uint64_t i = 0; i < e; ++i) acc = acc * base;
      return acc;
    }
    return base;
  }

  Poly parse_base() {
    skip_ws();
    if (pos >= s.size()) err("unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      Poly inner = parse_expr();
      if (!eat(')')) err("expected ')'");
      return inner;
    }
    if (c == '-') {
      ++pos;
      return -parse_base();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) digits += s[pos++];
      return Poly::constant(0, mpz_class(digits));
    }
    if (c == 'x') {
      ++pos;
      if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) err("expected variable index");
      std::uint64_t idx = 0;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        idx = idx * 10 + (s[pos] - '0');
        if (idx > 4096) err("variable index too large");
        ++pos;
      }
      if (idx == 0) fail(Err::ReservedVariable, "x0 is reserved for the constant 1");
      max_var = std::max<std::uint32_t>(max_var, static_cast<std::uint32_t>(idx));
      return Poly::variable(static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx));
    }
    err(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Poly parse_poly(const std::string& line, std::uint32_t min_vars) {
  Parser p{line};
  Poly out = p.parse_expr();
  p.skip_ws();
  if (p.pos != line.size()) p.err("trailing input");
  out.set_nvars(std::max(std::max(out.nvars, p.max_var), min_vars));
  return out;
}

std::vector<Poly> parse_system(const std::string& text) {
  std::vector<Poly> polys;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    bool blank = std::all_of(line.begin(), line.end(),
                             [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (blank) continue;
    polys.push_back(parse_poly(line));
  }
  std::uint32_t n = 0;
  for (const auto& p : polys) n = std::max(n, p.nvars);
  for (auto& p : polys) p.set_nvars(n);
  return polys;
}

// ---- SLProgram ----

std::string AtomicEq::str() const {
  std::ostringstream os;
  auto v = [](std::uint32_t i) { return "x" + std::to_string(i); };
  switch (kind) {
    case AtomKind::Copy: os << v(a) << " = " << v(b); break;
    case AtomKind::Neg: os << v(a) << " = -" << v(b); break;
    case AtomKind::Sum: os << v(c) << " = " << v(a) << " + " << v(b); break;
    case AtomKind::Prod: os << v(c) << " = " << v(a) << " * " << v(b); break;
    case AtomKind::Zero: os << "zero " << v(a); break;
  }
  return os.str();
}

std::string SLProgram::text() const {
  std::ostringstream os;
  for (const auto& e : eqs) os << e.str() << "\n";
  return os.str();
}

SLProgram program_from_text(const std::string& text) {
  SLProgram prog;
  std::istringstream in(text);
  std::string line;
  auto var = [&](const std::string& tok) -> std::uint32_t {
    if (tok.size() < 2 || tok[0] != 'x') fail(Err::SchemaError, "bad variable token " + tok);
    std::uint32_t i = static_cast<std::uint32_t>(std::stoul(tok.substr(1)));
    prog.nvars = std::max(prog.nvars, i);
    return i;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string t1, t2, t3, t4, t5;
    ls >> t1;
    if (t1 == "zero") {
      ls >> t2;
      prog.eqs.push_back({AtomKind::Zero, var(t2), 0, 0, ""});
      continue;
    }
    ls >> t2 >> t3;
    if (t2 != "=") fail(Err::SchemaError, "bad program line: " + line);
    std::uint32_t lhs = var(t1);
    if (t3[0] == '-') {
      prog.eqs.push_back({AtomKind::Neg, lhs, var(t3.substr(1)), 0, ""});
      continue;
    }
    if (!(ls >> t4)) {
      prog.eqs.push_back({AtomKind::Copy, lhs, var(t3), 0, ""});
      continue;
    }
    ls >> t5;
    if (t4 == "+")
      prog.eqs.push_back({AtomKind::Sum, var(t3), var(t5), lhs, ""});
    else if (t4 == "*")
      prog.eqs.push_back({AtomKind::Prod, var(t3), var(t5), lhs, ""});
    else
      fail(Err::SchemaError, "bad operator in program line: " + line);
  }
  // inputs: indices never defined
  std::vector<bool> defined(prog.nvars + 1, false);
  for (const auto& e : prog.eqs) {
    std::uint32_t target = (e.kind == AtomKind::Sum || e.kind == AtomKind::Prod) ? e.c
                           : (e.kind == AtomKind::Zero)                          ? 0
                                                                                 : e.a;
    if (target && !defined[target]) defined[target] = true;
  }
  std::uint32_t n = 0;
  for (std::uint32_t i = 1; i <= prog.nvars; ++i)
    if (!defined[i]) n = i;
  prog.ninputs = n;
  prog.validate();
  return prog;
}

void SLProgram::validate() const {
  std::vector<bool> defined(nvars + 1, false);
  defined[0] = true;
  for (std::uint32_t i = 1; i <= ninputs; ++i) defined[i] = true;
  auto used_ok = [&](std::uint32_t i) { return i <= nvars && defined[i]; };
  for (const auto& e : eqs) {
    switch (e.kind) {
      case AtomKind::Copy:
      case AtomKind::Neg: {
        if (e.a == 0) fail(Err::SchemaError, "x0 on the left of a defining equation");
        if (!used_ok(e.b)) fail(Err::SchemaError, "operand used before definition: " + e.str());
        if (e.a > nvars) fail(Err::SchemaError, "index out of range: " + e.str());
        if (defined[e.a]) {
          // constraint form relating two defined variables; allowed
        } else {
          defined[e.a] = true;
        }
        break;
      }
      case AtomKind::Sum:
      case AtomKind::Prod: {
        if (e.a == e.b) fail(Err::SchemaError, "operands must be distinct: " + e.str());
        if (!used_ok(e.a) || !used_ok(e.b))
          fail(Err::SchemaError, "operand used before definition: " + e.str());
        if (e.c == 0) fail(Err::SchemaError, "x0 on the left of a defining equation");
        if (e.c > nvars) fail(Err::SchemaError, "index out of range: " + e.str());
        if (!defined[e.c]) defined[e.c] = true;
        // else: constraint form
        break;
      }
      case AtomKind::Zero: {
        if (!used_ok(e.a) || e.a == 0) fail(Err::SchemaError, "zero on undefined index: " + e.str());
        break;
      }
    }
  }
  for (std::uint32_t i = 1; i <= nvars; ++i)
    if (!defined[i]) fail(Err::SchemaError, "variable x" + std::to_string(i) + " never defined");
}

// ---- decompose ----

namespace {

struct Builder {
  SLProgram prog;
  std::uint32_t next;

  explicit Builder(std::uint32_t n) : next(n + 1) {
    prog.ninputs = n;
    prog.nvars = n;
  }

  std::uint32_t fresh() {
    std::uint32_t v = next++;
    prog.nvars = v;
    return v;
  }
  std::uint32_t copy(std::uint32_t src, const std::string& note) {
    std::uint32_t v = fresh();
    prog.eqs.push_back({AtomKind::Copy, v, src, 0, note});
    return v;
  }
  std::uint32_t neg(std::uint32_t src, const std::string& note) {
    std::uint32_t v = fresh();
    prog.eqs.push_back({AtomKind::Neg, v, src, 0, note});
    return v;
  }
  std::uint32_t sum(std::uint32_t a, std::uint32_t b, const std::string& note) {
    std::uint32_t v = fresh();
    prog.eqs.push_back({AtomKind::Sum, a, b, v, note});
    return v;
  }
  std::uint32_t prod(std::uint32_t a, std::uint32_t b, const std::string& note) {
    std::uint32_t v = fresh();
    prog.eqs.push_back({AtomKind::Prod, a, b, v, note});
    return v;
  }

  // |c| >= 1 times the variable `base`, via binary doubling on `base`;
  // digit adds use fresh copies so Sum operands stay distinct.
  std::uint32_t scaled(std::uint32_t base, const mpz_class& c, const std::string& note) {
    mpz_class a = abs(c);
    std::uint32_t acc = base;
    const std::size_t bits = mpz_sizeinbase(a.get_mpz_t(), 2);
    for (std::size_t i = bits - 1; i-- > 0;) {
      std::uint32_t dup = copy(acc, note);
      acc = sum(acc, dup, note);
      if (mpz_tstbit(a.get_mpz_t(), i)) {
        std::uint32_t add = copy(base, note);
        acc = sum(acc, add, note);
      }
    }
    if (c < 0) acc = neg(acc, note);
    return acc;
  }

  // constants are built from x0; |c| >= 2 goes through a chain of negative
  // partial values (doubling -1) so the intermediate sums stay away from 0
  // and 1 at generic primes
  std::uint32_t constant(const mpz_class& c, const std::string& note) {
    if (c == 1) return copy(0, note);
    if (c == -1) return neg(0, note);
    mpz_class a = abs(c);
    std::uint32_t acc = neg(0, note);  // -1
    const std::size_t bits = mpz_sizeinbase(a.get_mpz_t(), 2);
    for (std::size_t i = bits - 1; i-- > 0;) {
      std::uint32_t dup = copy(acc, note);
      acc = sum(acc, dup, note);
      if (mpz_tstbit(a.get_mpz_t(), i)) {
        std::uint32_t extra = neg(copy(0, note), note);
        acc = sum(acc, extra, note);
      }
    }
    if (c > 0) acc = neg(acc, note);  // acc held -|c|
    return acc;
  }

  // monomial product chain in index order
  std::uint32_t monomial(const std::vector<std::uint32_t>& e, const std::string& note) {
    std::vector<std::uint32_t> factors;
    for (std::uint32_t i = 0; i < e.size(); ++i)
      for (std::uint32_t k = 0; k < e[i]; ++k) factors.push_back(i + 1);
    if (factors.empty()) return 0;  // the constant 1
    std::uint32_t acc = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) {
      std::uint32_t f = factors[i];
      if (f == acc) f = copy(f, note);  // distinct-operand rule for squares
      acc = prod(acc, f, note);
    }
    return acc;
  }
};

}  // namespace

SLProgram decompose(const std::vector<Poly>& polys, std::uint32_t n) {
  Builder b(n);
  int fi = 0;
  for (const Poly& f : polys) {
    ++fi;
    const std::string fname = "f" + std::to_string(fi);
    if (f.is_zero()) {
      // the zero polynomial: emit x - x on some available variable
      std::uint32_t base = n >= 1 ? 1 : 0;
      std::uint32_t dup = b.copy(base, fname);
      std::uint32_t nd = b.neg(dup, fname);
      std::uint32_t z = b.sum(base, nd, fname);
      b.prog.eqs.push_back({AtomKind::Zero, z, 0, 0, fname});
      continue;
    }
    std::vector<std::uint32_t> term_vars;
    // leading monomials first
    for (auto it = f.terms.rbegin(); it != f.terms.rend(); ++it) {
      const auto& [e, c] = *it;
      const std::string note = fname + " term " + Poly{f.nvars, {{e, c}}}.str();
      std::uint32_t m = b.monomial(e, note);
      std::uint32_t tv;
      if (m == 0) {
        tv = b.constant(c, note);
      } else if (c == 1) {
        tv = m;
      } else if (c == -1) {
        tv = b.neg(m, note);
      } else {
        tv = b.scaled(m, c, note);
      }
      term_vars.push_back(tv);
    }
    std::uint32_t acc = term_vars[0];
    for (std::size_t i = 1; i < term_vars.size(); ++i)
      acc = b.sum(acc, term_vars[i], fname + " sum");
    if (acc <= n) acc = b.copy(acc, fname + " residual");
    b.prog.eqs.push_back({AtomKind::Zero, acc, 0, 0, fname});
  }
  b.prog.validate();
  return b.prog;
}

// ---- evaluation ----

EvalResult eval_program(const SLProgram& prog, const std::vector<Scalar>& inputs) {
  if (inputs.size() != prog.ninputs) fail(Err::SchemaError, "eval_program: wrong input count");
  FieldPtr f = inputs.empty() ? make_field(0, 1) : inputs[0].spec();
  EvalResult out;
  out.assign.assign(prog.nvars + 1, Scalar::zero(f));
  out.assign[0] = Scalar::one(f);
  std::vector<bool> defined(prog.nvars + 1, false);
  defined[0] = true;
  for (std::uint32_t i = 1; i <= prog.ninputs; ++i) {
    out.assign[i] = inputs[i - 1];
    defined[i] = true;
  }
  auto val = [&](std::uint32_t i) { return out.assign[i]; };
  for (const auto& e : prog.eqs) {
    switch (e.kind) {
      case AtomKind::Copy:
        if (defined[e.a]) {
          out.residuals.push_back(val(e.a) - val(e.b));
        } else {
          out.assign[e.a] = val(e.b);
          defined[e.a] = true;
        }
        break;
      case AtomKind::Neg:
        if (defined[e.a]) {
          out.residuals.push_back(val(e.a) + val(e.b));
        } else {
          out.assign[e.a] = -val(e.b);
          defined[e.a] = true;
        }
        break;
      case AtomKind::Sum:
        if (defined[e.c]) {
          out.residuals.push_back(val(e.a) + val(e.b) - val(e.c));
        } else {
          out.assign[e.c] = val(e.a) + val(e.b);
          defined[e.c] = true;
        }
        break;
      case AtomKind::Prod:
        if (defined[e.c]) {
          out.residuals.push_back(val(e.a) * val(e.b) - val(e.c));
        } else {
          out.assign[e.c] = val(e.a) * val(e.b);
          defined[e.c] = true;
        }
        break;
      case AtomKind::Zero:
        out.residuals.push_back(val(e.a));
        break;
    }
  }
  out.solves = std::all_of(out.residuals.begin(), out.residuals.end(),
                           [](const Scalar& r) { return r.is_zero(); });
  return out;
}

std::optional<std::vector<Scalar>> find_witness(const std::vector<Poly>& polys, const FieldPtr& f,
                                                std::uint64_t budget) {
  if (f->rational()) fail(Err::BudgetExceeded, "witness enumeration over Q is unbounded");
  std::uint32_t n = 0;
  for (const auto& p : polys) n = std::max(n, p.nvars);
  long double total = 1;
  for (std::uint32_t i = 0; i < n; ++i) total *= static_cast<long double>(f->order_clamped());
  if (total > static_cast<long double>(budget))
    fail(Err::BudgetExceeded, "witness search space exceeds budget");

  // all field elements in canonical order
  std::vector<Scalar> elems;
  enumerate_field(f, budget, [&](const Scalar& s) {
    elems.push_back(s);
    return true;
  });
  std::vector<std::size_t> idx(n, 0);
  std::vector<Scalar> xs(n, Scalar::zero(f));
  while (true) {
    for (std::uint32_t i = 0; i < n; ++i) xs[i] = elems[idx[i]];
    bool ok = true;
    for (const auto& p : polys)
      if (!p.eval(xs, f).is_zero()) {
        ok = false;
        break;
      }
    if (ok) return xs;
    // lexicographic successor, last coordinate fastest
    int i = static_cast<int>(n) - 1;
    while (i >= 0 && idx[i] + 1 == elems.size()) idx[i--] = 0;
    if (i < 0) return std::nullopt;
    ++idx[i];
  }
}

bool equivalence_check(const std::vector<Poly>& polys, const SLProgram& prog) {
  const std::uint32_t n = prog.ninputs;
  std::vector<Poly> table(prog.nvars + 1, Poly::zero(n));
  std::vector<bool> defined(prog.nvars + 1, false);
  table[0] = Poly::constant(n, 1);
  defined[0] = true;
  for (std::uint32_t i = 1; i <= n; ++i) {
    table[i] = Poly::variable(n, i);
    defined[i] = true;
  }
  std::vector<Poly> generators;
  for (const auto& e : prog.eqs) {
    switch (e.kind) {
      case AtomKind::Copy:
        if (defined[e.a]) generators.push_back(table[e.a] - table[e.b]);
        else { table[e.a] = table[e.b]; defined[e.a] = true; }
        break;
      case AtomKind::Neg:
        if (defined[e.a]) generators.push_back(table[e.a] + table[e.b]);
        else { table[e.a] = -table[e.b]; defined[e.a] = true; }
        break;
      case AtomKind::Sum:
        if (defined[e.c]) generators.push_back(table[e.a] + table[e.b] - table[e.c]);
        else { table[e.c] = table[e.a] + table[e.b]; defined[e.c] = true; }
        break;
      case AtomKind::Prod:
        if (defined[e.c]) generators.push_back(table[e.a] * table[e.b] - table[e.c]);
        else { table[e.c] = table[e.a] * table[e.b]; defined[e.c] = true; }
        break;
      case AtomKind::Zero:
        generators.push_back(table[e.a]);
        break;
    }
  }
  if (generators.size() != polys.size()) return false;
  // multiset equality
  std::vector<bool> used(polys.size(), false);
  for (const auto& g : generators) {
    bool matched = false;
    for (std::size_t i = 0; i < polys.size(); ++i) {
      if (used[i]) continue;
      if (g == polys[i]) {
        used[i] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace staudt
