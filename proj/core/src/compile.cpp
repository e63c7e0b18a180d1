#include "staudt/compile.hpp"

#include <chrono>
#include <sstream>

namespace staudt {

std::vector<Scalar> framing_labels(const FieldPtr& f, const Scalar& j) {
  if (f->characteristic == 2) return {Scalar::zero(f), Scalar::one(f), j};
  return {-Scalar::one(f), Scalar::zero(f), Scalar::one(f)};
}

std::array<Scalar, 2> choose_framing_type(const Scalar& q, const std::vector<Scalar>& refs) {
  for (std::size_t i = 0; i < refs.size(); ++i)
    for (std::size_t k = i + 1; k < refs.size(); ++k)
      if (refs[i] != q && refs[k] != q) return {refs[i], refs[k]};
  fail(Err::CaseViolation, "no admissible framing-type (reference set too small)");
}

Scalar relabel_value(const Scalar& q, const Scalar& s1, const Scalar& s2, const Scalar& s1p,
                     const Scalar& s2p) {
  return s1p + (s2p - s1p) * (q - s1) / (s2 - s1);
}

FramedCarrier relabel(const FramedCarrier& c, const Scalar& new_label0, const Scalar& new_label1) {
  FramedCarrier out = c;
  out.value = relabel_value(c.value, c.labels[0], c.labels[1], new_label0, new_label1);
  out.labels = {new_label0, new_label1};
  return out;
}

std::uint64_t estimate_elements(const SLProgram& prog) {
  return 80 + 30ull * prog.nvars + 120ull * prog.eqs.size();
}

std::uint32_t extension_degree(std::uint64_t p, std::uint32_t k, std::uint64_t E) {
  if (p == 0) return 1;
  unsigned __int128 need = (unsigned __int128)64 * E * E;
  if (need < (1u << 16)) need = 1u << 16;
  const std::uint32_t cap = p == 2 ? 62 : 24;
  std::uint32_t N = k;
  auto big_enough = [&](std::uint32_t n) {
    unsigned __int128 v = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
      v *= p;
      if (v >= need) return true;
    }
    return v >= need;
  };
  while (!big_enough(N) || (p == 2 && (N % 2))) {
    N += k;
    if (N > cap)
      fail(Err::DegreeOutOfRange, "extension policy needs degree beyond the supported cap");
  }
  return N;
}

std::string CompileReport::str() const {
  std::ostringstream os;
  os << "working field: " << working_field << "\n";
  os << "elements: " << n_points << " points, " << n_lines << " lines (estimate " << estimated_elements
     << ")\n";
  os << "free draws (s): " << free_count << "\n";
  os << "seed: " << seed_used << "\n";
  os << "cases:\n";
  for (const auto& c : cases)
    os << "  eq " << c.eq_index << " " << c.op << " -> " << c.case_name << "  " << c.predicate
       << "\n";
  os << "construct: " << construct_ms << " ms, checks: " << check_ms << " ms\n";
  os << "conditions: " << (conditions.pass() ? "pass" : conditions.str()) << "\n";
  return os.str();
}

// ---- Assembler ----

Assembler::Assembler(FieldPtr work, const CompileOptions& opt)
    : cfg_(init_anchors(work, &ids_)),
      opt_(opt),
      rng_(opt.seed),
      choice_(rng_),
      p_(work->characteristic),
      zero_(Scalar::zero(work)),
      one_(Scalar::one(work)),
      mone_(-Scalar::one(work)),
      two_(Scalar::of_int(work, 2)),
      j_(Scalar::zero(work)),
      j2_(Scalar::zero(work)) {
  cfg_.set_seed(opt.seed);
}

int Assembler::ref_point(const Scalar& s) const {
  for (const auto& [val, id] : refpts_)
    if (val == s) return id;
  fail(Err::CaseViolation, "no reference point for label " + s.str());
}

void Assembler::initial_framing() {
  const FieldPtr& f = cfg_.field();
  if (p_ != 2) {
    int neg = reflect(cfg_, ids_.l13, ids_.p1, ids_.unit, choice_);
    refpts_ = {{mone_, neg}, {zero_, ids_.p1}, {one_, ids_.unit}};
    refs_ = framing_labels(f, j_);
            // label the point for readability
    return;
  }
  // p = 2: construct j and k = j^2 on the x-axis, enforce j^2 = 1 - j
  auto root = find_quadratic_root(-one_, one_, f);
  if (!root) fail(Err::DegreeOutOfRange, "working field too small to contain j (degree must be even)");
  j_ = *root;
  j2_ = j_ * j_;
  refs_ = framing_labels(f, j_);
  int jpt = cfg_.add_point(affine_point(j_, zero_), PointRole::Unit, "j", "initial", {ids_.l13});
  FramedCarrier axis_j{ids_.l13, {zero_, one_}, {ids_.p1, ids_.unit}, jpt, j_};
  FramedCarrier c1 = parallel_shift(cfg_, axis_j, choice_);
  FramedCarrier c2 = parallel_shift(cfg_, axis_j, choice_);
  FramedCarrier c3 = generic_multiplication(cfg_, c1, c2, choice_);
  int kpt = cfg_.add_point(affine_point(j2_, zero_), PointRole::Unit, "j2", "initial", {ids_.l13});
  FramedCarrier axis_k{ids_.l13, {zero_, one_}, {ids_.p1, ids_.unit}, kpt, j2_};
  equality(cfg_, c3, axis_k, choice_);  // k = j * j
  // reinterpret the ({0,1}, j) x-axis as a ({1,0}, 1-j) carrier and shift it
  // back onto the axis at k: this enforces k = 1 - j
  FramedCarrier axis_rel{ids_.l13, {one_, zero_}, {ids_.p1, ids_.unit}, jpt, one_ - j_};
  equality(cfg_, axis_rel, axis_k, choice_);
  refpts_ = {{zero_, ids_.p1}, {one_, ids_.unit}, {j_, jpt}, {j2_, kpt}};
}

FramedCarrier Assembler::place_variable_line(const std::string& label, const Scalar& value,
                                             std::optional<DrawRecord> value_draw) {
  const FieldPtr& f = cfg_.field();
  // framing-types may be chosen freely; prefer {0,1} so the generic figures
  // need no reframing port
  std::vector<Scalar> pref = {zero_, one_};
  for (const Scalar& r : refs_)
    if (r != zero_ && r != one_) pref.push_back(r);
  std::array<Scalar, 2> F = choose_framing_type(value, pref);
  GadgetTrace tr;
  tr.id = static_cast<int>(cfg_.traces().size());
  tr.kind = "variable_line";
  tr.relation = "carries " + label;
  auto body = [&]() {
    if (value_draw) tr.draws.push_back(*value_draw);
    std::vector<Scalar> hforb = cfg_.horizontal_forbidden();
    hforb.push_back(zero_);
    hforb.push_back(one_);
    Scalar y0 = choice_.draw(f, hforb, "line_y");
    int lid = cfg_.add_line(horizontal_line(y0), LineRole::VariableBearing, label, {ids_.p3});
    std::vector<Scalar> xsol;
    for (const auto& ml : cfg_.lines()) {
      if (is_horizontal(ml.ln)) continue;
      xsol.push_back(-(ml.ln.c[1] * y0 + ml.ln.c[2]));
    }
    Scalar u1 = choice_.draw(f, xsol, "framing_x1");
    // V sits at u1 + (u2 - u1) lam; forbid u2 values that place V on an
    // existing line or on the first framing point
    Scalar lam = (value - F[0]) / (F[1] - F[0]);
    std::vector<Scalar> u2forb = xsol;
    u2forb.push_back(u1);
    for (const Scalar& bad : xsol) u2forb.push_back(u1 + (bad - u1) / lam);
    Scalar u2 = choice_.draw(f, u2forb, "framing_x2");
    int f0 = cfg_.add_point(affine_point(u1, y0), PointRole::Framing, label + ".f0", tr.kind,
                            {lid});
    int f1 = cfg_.add_point(affine_point(u2, y0), PointRole::Framing, label + ".f1", tr.kind,
                            {lid});
    Scalar upos = u1 + (u2 - u1) * lam;
    int vp = cfg_.add_point(affine_point(upos, y0), PointRole::Variable, label + ".V", tr.kind,
                            {lid});
    FramedCarrier out{lid, F, {f0, f1}, vp, value};
    cfg_.mutable_line(lid).framing = LineFraming{F, {f0, f1}, vp};
    if (carrier_coordinate(cfg_, out) != value)
      throw std::logic_error("variable line placement produced a wrong chart value");
    tr.out_points = {f0, f1, vp};
    tr.out_lines = {lid};
    return out;
  };
  // reuse the gadget retry discipline
  for (int attempt = 0; attempt < kGadgetRetries; ++attempt) {
    auto ck = cfg_.checkpoint();
    tr.draws.clear();
    tr.out_points.clear();
    tr.out_lines.clear();
    choice_.set_sink(&tr.draws);
    try {
      FramedCarrier out = body();
      choice_.set_sink(nullptr);
      cfg_.add_free_draws(tr.draws.size());
      cfg_.traces().push_back(tr);
      return out;
    } catch (const Error& e) {
      choice_.set_sink(nullptr);
      cfg_.rollback(ck);
      if (e.kind() == Err::UnintendedIncidence || e.kind() == Err::DuplicateElement ||
          e.kind() == Err::CoincidentPoints || e.kind() == Err::CoincidentLines ||
          e.kind() == Err::DegenerateTuple)
        continue;
      throw;
    }
  }
  fail(Err::CoincidenceRetryExhausted, "variable line placement exhausted retries");
}

FramedCarrier Assembler::axis_constant(const Scalar& value) {
  std::array<Scalar, 2> F = choose_framing_type(value, refs_);
  FramedCarrier axis{ids_.l13, F, {ref_point(F[0]), ref_point(F[1])}, ref_point(value), value};
  return parallel_shift(cfg_, axis, choice_);
}

FramedCarrier Assembler::port(const FramedCarrier& c, const std::array<Scalar, 2>& target) {
  if (c.value == target[0] || c.value == target[1])
    fail(Err::IntendedIncidenceFails,
         "carried value " + c.value.str() + " lies in the required framing-type; the "
         "realization would collide with a reference point");
  if (c.label_set_is(target[0], target[1])) return parallel_shift(cfg_, c, choice_);
  // the two framing-types share exactly one label
  Scalar shared = (c.labels[0] == target[0] || c.labels[0] == target[1]) ? c.labels[0]
                                                                         : c.labels[1];
  if (!(shared == c.labels[0] || shared == c.labels[1]) ||
      !(shared == target[0] || shared == target[1]))
    fail(Err::CaseViolation, "framing-types do not overlap");
  Scalar snew = target[0] == shared ? target[1] : target[0];
  return parallel_shift_ex(
      cfg_, c, choice_, [&](Configuration& cfg, FramedCarrier& sh, GadgetTrace& tr) {
        const std::string tag = "g" + std::to_string(tr.id);
        int r0 = ref_point(sh.labels[0]), r1 = ref_point(sh.labels[1]);
        int a0 = sh.fpoints[0], a1 = sh.fpoints[1];
        int j0 = cfg.add_line(join(cfg.point(r0).pt, cfg.point(a0).pt), LineRole::Auxiliary,
                              tag + ".a0", {r0, a0});
        int j1 = cfg.add_line(join(cfg.point(r1).pt, cfg.point(a1).pt), LineRole::Auxiliary,
                              tag + ".a1", {r1, a1});
        int Xr = cfg.add_point(meet(cfg.line(j0).ln, cfg.line(j1).ln), PointRole::Auxiliary,
                               tag + ".Xr", tag, {j0, j1});
        int rn = ref_point(snew);
        int j2 = cfg.add_line(join(cfg.point(Xr).pt, cfg.point(rn).pt), LineRole::Auxiliary,
                              tag + ".a2", {Xr, rn});
        int P3 = cfg.add_point(meet(cfg.line(j2).ln, cfg.line(sh.line).ln), PointRole::Framing,
                               tag + ".ref", tag, {j2, sh.line});
        int shared_pt = sh.point_with_label(shared);
        sh.labels = {shared, snew};
        sh.fpoints = {shared_pt, P3};
        cfg.mutable_line(sh.line).framing = LineFraming{sh.labels, sh.fpoints, sh.vpoint};
        tr.out_points.push_back(Xr);
        tr.out_points.push_back(P3);
        for (int x : {j0, j1, j2}) tr.out_lines.push_back(x);
        tr.relation = "reframed to {" + sh.labels[0].str() + "," + sh.labels[1].str() + "}";
        if (carrier_coordinate(cfg, sh) != c.value)
          throw std::logic_error("reference port changed the chart value");
      });
}

FramedCarrier Assembler::ported_for(const FramedCarrier& c, const Scalar& t0, const Scalar& t1) {
  if (c.label_set_is(t0, t1)) return c;
  return port(c, {t0, t1});
}

namespace {
FramedCarrier relabel_map(const FramedCarrier& c, const std::function<Scalar(const Scalar&)>& mu) {
  return relabel(c, mu(c.labels[0]), mu(c.labels[1]));
}
}  // namespace

bool Assembler::values_ok_for_figure(const Scalar& u, const Scalar& v, const Scalar& s) const {
  auto ok = [&](const Scalar& x) { return x != zero_ && x != one_; };
  return ok(u) && ok(v) && ok(s);
}

std::string Assembler::construct_sum_case(const Scalar& u, const Scalar& v) const {
  auto ok = [&](const Scalar& x) { return x != zero_ && x != one_; };
  if (ok(u) && ok(v) && ok(u + v)) return "generic";
  auto one_plus = [&](const Scalar& x, const Scalar& y) {
    if (p_ == 2)
      return x == one_ && y != zero_ && y != one_ && y != j_ && y != j2_;
    return x == one_ && y != zero_ && y != mone_ && y != mone_ - one_;
  };
  auto zero_plus = [&](const Scalar& x, const Scalar& y) {
    if (p_ == 2)
      return x == zero_ && y != zero_ && y != one_ && y != j_ && y != j2_;
    return x == zero_ && y != mone_ && y != zero_ && y != one_ && y != two_;
  };
  const char* op = p_ == 2 ? "char2_one_plus" : "one_plus";
  const char* zp = p_ == 2 ? "char2_zero_plus" : "zero_plus";
  if (one_plus(u, v) || one_plus(v, u)) return op;
  if (zero_plus(u, v) || zero_plus(v, u)) return zp;
  return "";
}

std::string Assembler::addition_case(const Scalar& u, const Scalar& v, const Scalar& w) const {
  auto ok = [&](const Scalar& x) { return x != zero_ && x != one_; };
  if (ok(u) && ok(v) && ok(w) && ok(u + v)) return "generic";
  if (p_ != 2) {
    auto one_plus = [&](const Scalar& x, const Scalar& y) {
      return x == one_ && ok(y) && ok(w) && w != mone_ && ok(y - w);
    };
    if (one_plus(u, v) || one_plus(v, u)) return "one_plus";
    auto zero_plus = [&](const Scalar& x, const Scalar& y) {
      auto far = [&](const Scalar& z) {
        return z != mone_ && z != zero_ && z != one_ && z != two_;
      };
      return x == zero_ && far(y) && far(w);
    };
    if (zero_plus(u, v) || zero_plus(v, u)) return "zero_plus";
    return "translate";
  }
  auto c2_one = [&](const Scalar& x, const Scalar& y) {
    return x == one_ && ok(y) && y != j_ && ok(w) && w != j_ && ok((one_ + y) * j2_);
  };
  if (c2_one(u, v) || c2_one(v, u)) return "char2_one_plus";
  auto c2_zero = [&](const Scalar& x, const Scalar& y) {
    return x == zero_ && y != zero_ && y != one_ && y != j_ && y != j2_ && w != one_ && w != j_;
  };
  if (c2_zero(u, v) || c2_zero(v, u)) return "char2_zero_plus";
  return "translate";
}

std::string Assembler::multiplication_case(const Scalar& u, const Scalar& v,
                                           const Scalar& w) const {
  auto ok = [&](const Scalar& x) { return x != zero_ && x != one_; };
  if (ok(u) && ok(v) && ok(w) && ok(u * v)) return "generic";
  return "translate";
}

FramedCarrier Assembler::half_carrier(const FramedCarrier& b) {
  // midpoint of the 0-framing point and the variable point carries value/2
  int M = midpoint(cfg_, b.line, b.point_with_label(zero_), b.vpoint, choice_);
  FramedCarrier out = b;
  out.vpoint = M;
  out.value = b.value / two_;
  return out;
}

FramedCarrier Assembler::construct_prod_generic(const FramedCarrier& a, const FramedCarrier& b) {
  FramedCarrier A = ported_for(a, zero_, one_);
  FramedCarrier B = ported_for(b, zero_, one_);
  if (A.line == B.line) A = parallel_shift(cfg_, A, choice_);
  return generic_multiplication(cfg_, A, B, choice_);
}

FramedCarrier Assembler::construct_sum(const FramedCarrier& a, const FramedCarrier& b) {
  std::string cs = construct_sum_case(a.value, b.value);
  if (cs.empty())
    fail(Err::CaseViolation, "no simple addition case for (" + a.value.str() + ", " +
                                 b.value.str() + ")");
  if (cs == "generic") {
    FramedCarrier A = ported_for(a, zero_, one_);
    FramedCarrier B = ported_for(b, zero_, one_);
    if (A.line == B.line) A = parallel_shift(cfg_, A, choice_);
    return generic_addition(cfg_, A, B, choice_);
  }
  // the special slot goes first
  const bool a_special = (a.value == one_ || a.value == zero_);
  const FramedCarrier& x = a_special ? a : b;
  const FramedCarrier& y = a_special ? b : a;
  if (cs == "one_plus") {
    auto negate = [&](const Scalar& s) { return -s; };
    FramedCarrier Am = relabel_map(ported_for(x, zero_, mone_), negate);  // ({0,1}, -1)
    FramedCarrier Bm = relabel_map(ported_for(y, zero_, mone_), negate);  // ({0,1}, -y)
    if (Am.line == Bm.line) Am = parallel_shift(cfg_, Am, choice_);
    FramedCarrier out0 = generic_addition(cfg_, Am, Bm, choice_);         // -(1 + y)
    return relabel_map(out0, negate);                                     // ({0,-1}, 1 + y)
  }
  if (cs == "zero_plus") {
    auto mu = [&](const Scalar& s) { return (s + one_) / two_; };
    FramedCarrier Ar = relabel_map(ported_for(x, mone_, one_), mu);  // ({0,1}, 1/2)
    FramedCarrier Bf = ported_for(y, zero_, one_);
    if (Bf.line == y.line) Bf = parallel_shift(cfg_, Bf, choice_);   // midpoint wants a fresh line
    FramedCarrier Bh = half_carrier(Bf);
    FramedCarrier out0 = generic_addition(cfg_, Ar, Bh, choice_);    // (1 + y)/2
    auto muinv = [&](const Scalar& s) { return two_ * s - one_; };
    return relabel_map(out0, muinv);                                 // ({-1,1}, y)
  }
  if (cs == "char2_one_plus") {
    auto mu = [&](const Scalar& s) { return s / j_; };
    FramedCarrier Aj = relabel_map(ported_for(x, zero_, j_), mu);  // ({0,1}, 1/j = j^2)
    FramedCarrier Bj = construct_prod_generic(ported_for(y, zero_, one_), axis_constant(j2_));
    FramedCarrier out0 = generic_addition(cfg_, Aj, Bj, choice_);  // (1 + y)/j
    auto muinv = [&](const Scalar& s) { return s * j_; };
    return relabel_map(out0, muinv);  // ({0,j}, 1 + y)
  }
  if (cs == "char2_zero_plus") {
    auto mu = [&](const Scalar& s) { return (s - one_) * j_; };  // (s-1)/j^2
    FramedCarrier Ar = relabel_map(ported_for(x, one_, j_), mu);  // ({0,1}, j)
    FramedCarrier By = ported_for(y, zero_, one_);
    FramedCarrier Bj = construct_prod_generic(By, axis_constant(j2_));   // y/j
    FramedCarrier Bj2 = construct_prod_generic(Bj, axis_constant(j2_));  // y/j^2
    FramedCarrier out0 = generic_addition(cfg_, Ar, Bj2, choice_);       // (1 + y) j
    auto muinv = [&](const Scalar& s) { return one_ + j2_ * s; };
    return relabel_map(out0, muinv);  // ({1,j}, y)
  }
  fail(Err::CaseViolation, "unhandled construct case " + cs);
}

void Assembler::enforce_sum_simple(const FramedCarrier& a, const FramedCarrier& b,
                                   const FramedCarrier& c, const std::string& cs) {
  if (cs == "generic") {
    FramedCarrier A = ported_for(a, zero_, one_);
    FramedCarrier B = ported_for(b, zero_, one_);
    FramedCarrier C = ported_for(c, zero_, one_);
    if (A.line == B.line) A = parallel_shift(cfg_, A, choice_);
    if (C.line == A.line || C.line == B.line) C = parallel_shift(cfg_, C, choice_);
    generic_addition_enforce(cfg_, A, B, C, choice_);
    return;
  }
  const bool a_special = (a.value == one_ || a.value == zero_);
  const FramedCarrier& x = a_special ? a : b;
  const FramedCarrier& y = a_special ? b : a;
  if (cs == "one_plus") {
    // rewrite -x_c + x_b = -x_a
    auto negate = [&](const Scalar& s) { return -s; };
    FramedCarrier Cm = relabel_map(ported_for(c, zero_, mone_), negate);
    FramedCarrier Bf = ported_for(y, zero_, one_);
    FramedCarrier Am = relabel_map(ported_for(x, zero_, mone_), negate);
    if (Cm.line == Bf.line) Cm = parallel_shift(cfg_, Cm, choice_);
    generic_addition_enforce(cfg_, Cm, Bf, Am, choice_);
    return;
  }
  if (cs == "zero_plus") {
    auto mu = [&](const Scalar& s) { return (s + one_) / two_; };
    FramedCarrier Ar = relabel_map(ported_for(x, mone_, one_), mu);
    FramedCarrier Bf = ported_for(y, zero_, one_);
    if (Bf.line == y.line) Bf = parallel_shift(cfg_, Bf, choice_);
    FramedCarrier Bh = half_carrier(Bf);
    FramedCarrier Cr = relabel_map(ported_for(c, mone_, one_), mu);
    generic_addition_enforce(cfg_, Ar, Bh, Cr, choice_);
    return;
  }
  if (cs == "char2_one_plus") {
    auto mu = [&](const Scalar& s) { return s / j_; };
    FramedCarrier Aj = relabel_map(ported_for(x, zero_, j_), mu);
    FramedCarrier Bj = construct_prod_generic(ported_for(y, zero_, one_), axis_constant(j2_));
    FramedCarrier Cj = construct_prod_generic(ported_for(c, zero_, one_), axis_constant(j2_));
    generic_addition_enforce(cfg_, Aj, Bj, Cj, choice_);
    return;
  }
  if (cs == "char2_zero_plus") {
    auto mu = [&](const Scalar& s) { return (s - one_) * j_; };
    FramedCarrier Ar = relabel_map(ported_for(x, one_, j_), mu);
    FramedCarrier By = ported_for(y, zero_, one_);
    FramedCarrier Bj = construct_prod_generic(By, axis_constant(j2_));
    FramedCarrier Bj2 = construct_prod_generic(Bj, axis_constant(j2_));
    FramedCarrier Cr = relabel_map(ported_for(c, one_, j_), mu);
    generic_addition_enforce(cfg_, Ar, Bj2, Cr, choice_);
    return;
  }
  fail(Err::CaseViolation, "unhandled enforce case " + cs);
}

Scalar Assembler::draw_value(const std::vector<Scalar>& avoid, DrawRecord* rec,
                             const char* purpose) {
  Scalar v = sample_general(cfg_.field(), avoid, rng_);
  if (rec) *rec = DrawRecord{purpose, v, avoid.size()};
  return v;
}

void Assembler::enforce_sum(const FramedCarrier& a, const FramedCarrier& b, const FramedCarrier& c,
                            std::size_t eq_index) {
  std::string cs = addition_case(a.value, b.value, c.value);
  if (eq_index != static_cast<std::size_t>(-1))
    cases_.push_back({eq_index, "add", cs,
                      "(" + a.value.str() + "," + b.value.str() + "," + c.value.str() + ")"});
  if (cs != "translate") {
    enforce_sum_simple(a, b, c, cs);
    return;
  }
  // fourth case: two extra free translation variables s and t
  const std::vector<Scalar> basic = {zero_, one_};
  Scalar sv = zero_, tv = zero_;
  DrawRecord sdr, tdr;
  bool found = false;
  for (int tries = 0; tries < 64 && !found; ++tries) {
    sv = draw_value(basic, &sdr, "translation_value");
    tv = draw_value(basic, &tdr, "translation_value");
    Scalar v1 = a.value + sv, v2 = b.value + tv;
    found = !construct_sum_case(a.value, sv).empty() && !construct_sum_case(b.value, tv).empty() &&
            !construct_sum_case(v1, v2).empty() && !construct_sum_case(sv, tv).empty() &&
            addition_case(c.value, sv + tv, v1 + v2) != "translate";
  }
  if (!found) fail(Err::CoincidenceRetryExhausted, "no admissible translation values found");
  FramedCarrier ls =
      place_variable_line("t" + std::to_string(translation_count_++), sv, sdr);
  FramedCarrier lt =
      place_variable_line("t" + std::to_string(translation_count_++), tv, tdr);
  FramedCarrier A1 = construct_sum(a, ls);
  FramedCarrier A2 = construct_sum(b, lt);
  FramedCarrier A3 = construct_sum(A1, A2);
  FramedCarrier A4 = construct_sum(ls, lt);
  // impose x_c + (s + t) = (x_a + s) + (x_b + t)
  enforce_sum_simple(c, A4, A3, addition_case(c.value, A4.value, A3.value));
}

void Assembler::enforce_prod(const FramedCarrier& a, const FramedCarrier& b,
                             const FramedCarrier& c, std::size_t eq_index) {
  std::string cs = multiplication_case(a.value, b.value, c.value);
  if (eq_index != static_cast<std::size_t>(-1))
    cases_.push_back({eq_index, "mul", cs,
                      "(" + a.value.str() + "," + b.value.str() + "," + c.value.str() + ")"});
  if (cs == "generic") {
    FramedCarrier A = ported_for(a, zero_, one_);
    FramedCarrier B = ported_for(b, zero_, one_);
    FramedCarrier C = ported_for(c, zero_, one_);
    if (A.line == B.line) A = parallel_shift(cfg_, A, choice_);
    if (C.line == A.line || C.line == B.line) C = parallel_shift(cfg_, C, choice_);
    generic_multiplication_enforce(cfg_, A, B, C, choice_);
    return;
  }
  // translate by two general values u, v using
  // (a+c)(b+d) + cd = ab + (a+c)d + (b+d)c
  const std::vector<Scalar> basic = {zero_, one_};
  auto ok3 = [&](const Scalar& x, const Scalar& y) {
    return values_ok_for_figure(x, y, x * y);
  };
  Scalar uv = zero_, vv = zero_;
  DrawRecord udr, vdr;
  bool found = false;
  for (int tries = 0; tries < 64 && !found; ++tries) {
    uv = draw_value(basic, &udr, "translation_value");
    vv = draw_value(basic, &vdr, "translation_value");
    Scalar v1 = a.value + uv, v2 = b.value + vv;
    Scalar r1 = c.value + v1 * vv, r2 = r1 + v2 * uv;
    found = !construct_sum_case(a.value, uv).empty() && !construct_sum_case(b.value, vv).empty() &&
            ok3(v1, v2) && ok3(uv, vv) && ok3(v1, vv) && ok3(v2, uv) &&
            !construct_sum_case(c.value, v1 * vv).empty() &&
            !construct_sum_case(r1, v2 * uv).empty() &&
            addition_case(v1 * v2, uv * vv, r2) != "translate";
  }
  if (!found) fail(Err::CoincidenceRetryExhausted, "no admissible translation values found");
  FramedCarrier lu =
      place_variable_line("t" + std::to_string(translation_count_++), uv, udr);
  FramedCarrier lv =
      place_variable_line("t" + std::to_string(translation_count_++), vv, vdr);
  FramedCarrier B1 = construct_sum(a, lu);
  FramedCarrier B2 = construct_sum(b, lv);
  FramedCarrier B3 = construct_prod_generic(B1, B2);
  FramedCarrier B4 = construct_prod_generic(lu, lv);
  FramedCarrier B5 = construct_prod_generic(B1, lv);
  FramedCarrier B6 = construct_prod_generic(B2, lu);
  FramedCarrier R1 = construct_sum(c, B5);
  FramedCarrier R2 = construct_sum(R1, B6);
  enforce_sum_simple(B3, B4, R2, addition_case(B3.value, B4.value, R2.value));
}

void Assembler::enforce_equality(const FramedCarrier& a, const FramedCarrier& b,
                                 std::size_t eq_index) {
  bool same = a.label_set_is(b.labels[0], b.labels[1]);
  if (eq_index != static_cast<std::size_t>(-1))
    cases_.push_back({eq_index, "eq", same ? "same_framing" : "different_framing",
                      "(" + a.value.str() + "," + b.value.str() + ")"});
  if (same) {
    equality(cfg_, a, b, choice_);
    return;
  }
  // port a to b's framing-type with the reference points (possible because
  // the carried value avoids every framing-type it could need)
  FramedCarrier A = port(a, b.labels);
  equality(cfg_, A, b, choice_);
}

void Assembler::enforce_negation(const FramedCarrier& a, const FramedCarrier& b,
                                 std::size_t eq_index) {
  if (p_ == 2) {
    // x_a = -x_b is x_a + x_b = 0
    cases_.push_back({eq_index, "neg", "char2_add_to_zero",
                      "(" + a.value.str() + "," + b.value.str() + ")"});
    enforce_sum(a, b, axis_constant(zero_), static_cast<std::size_t>(-1));
    return;
  }
  cases_.push_back(
      {eq_index, "neg", "relabel_equality", "(" + a.value.str() + "," + b.value.str() + ")"});
  std::array<Scalar, 2> F = choose_framing_type(a.value, refs_);
  std::array<Scalar, 2> negF = {-F[0], -F[1]};
  FramedCarrier A = ported_for(a, F[0], F[1]);
  FramedCarrier B = ported_for(b, negF[0], negF[1]);
  auto negate = [&](const Scalar& s) { return -s; };
  FramedCarrier Brel = relabel_map(B, negate);  // carries -x_b with framing-type F
  equality(cfg_, A, Brel, choice_);
}

void Assembler::enforce_zero(const FramedCarrier& a, std::size_t eq_index) {
  cases_.push_back({eq_index, "zero", "axis_equality", "(" + a.value.str() + ")"});
  enforce_equality(a, axis_constant(zero_), static_cast<std::size_t>(-1));
}

void Assembler::run_program(const SLProgram& prog, const std::vector<Scalar>& assign) {
  if (assign.size() != prog.nvars + 1) fail(Err::SchemaError, "assignment size mismatch");
  std::vector<FramedCarrier> carriers(prog.nvars + 1);
  for (std::uint32_t i = 1; i <= prog.nvars; ++i)
    carriers[i] = place_variable_line("x" + std::to_string(i), assign[i]);
  auto oper = [&](std::uint32_t i) -> FramedCarrier {
    return i == 0 ? axis_constant(one_) : carriers[i];
  };
  for (std::size_t idx = 0; idx < prog.eqs.size(); ++idx) {
    const AtomicEq& eq = prog.eqs[idx];
    try {
      switch (eq.kind) {
        case AtomKind::Copy:
          enforce_equality(carriers[eq.a], oper(eq.b), idx);
          break;
        case AtomKind::Neg:
          enforce_negation(carriers[eq.a], oper(eq.b), idx);
          break;
        case AtomKind::Sum:
          enforce_sum(oper(eq.a), oper(eq.b), carriers[eq.c], idx);
          break;
        case AtomKind::Prod:
          enforce_prod(oper(eq.a), oper(eq.b), carriers[eq.c], idx);
          break;
        case AtomKind::Zero:
          enforce_zero(carriers[eq.a], idx);
          break;
      }
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " [at equation '" + eq.str() + "']");
    }
  }
}

// ---- compile_system ----

std::string witness_str(const Scalar& s) {
  if (s.spec()->rational())
    return s.rat().get_num().get_str() + "/" + s.rat().get_den().get_str();
  std::ostringstream os;
  for (std::uint32_t i = 0; i < s.spec()->degree; ++i) {
    if (i) os << ";";
    os << s.coeff(i);
  }
  return os.str();
}

Scalar parse_witness_value(const std::string& text, const FieldPtr& f) {
  if (f->rational()) {
    auto slash = text.find('/');
    mpq_class q;
    if (slash == std::string::npos)
      q = mpq_class(mpz_class(text));
    else
      q = mpq_class(mpz_class(text.substr(0, slash)), mpz_class(text.substr(slash + 1)));
    q.canonicalize();
    return Scalar::of_rational(q);
  }
  std::vector<std::uint64_t> coeffs;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ';')) {
    long long v = std::stoll(cur);
    long long p = static_cast<long long>(f->characteristic);
    v %= p;
    if (v < 0) v += p;
    coeffs.push_back(static_cast<std::uint64_t>(v));
  }
  return Scalar::from_coeffs(f, coeffs);
}

CompileResult compile_system(const std::vector<Poly>& polys, std::uint64_t p, std::uint32_t k,
                             const std::optional<std::vector<Scalar>>& witness,
                             const CompileOptions& opt) {
  using clock = std::chrono::steady_clock;
  std::uint32_t n = 0;
  for (const auto& poly : polys) n = std::max(n, poly.nvars);
  SLProgram prog = decompose(polys, n);
  FieldPtr wf = make_field(p, k);

  std::vector<Scalar> w;
  if (witness) {
    w = *witness;
    if (w.size() != n) fail(Err::UsageError, "witness has wrong arity");
  } else {
    auto found = find_witness(polys, wf);
    if (!found) fail(Err::WitnessDoesNotSolve, "no witness exists over " + wf->name());
    w = *found;
  }
  {
    EvalResult check = eval_program(prog, w);
    if (opt.check_witness && !check.solves)
      fail(Err::WitnessDoesNotSolve, "the witness does not solve the system");
  }

  const std::uint64_t E = estimate_elements(prog);
  std::uint32_t N = opt.force_extension ? *opt.force_extension : extension_degree(p, k, E);
  FieldPtr work = p == 0 ? wf : make_field(p, N);
  if (p != 0 && N % k != 0) fail(Err::DegreeOutOfRange, "extension not a multiple of the witness degree");

  std::vector<Scalar> inputs_work;
  for (const auto& x : w) inputs_work.push_back(embed(x, work));
  EvalResult ext = eval_program(prog, inputs_work);

  Error last(Err::ConcurrencyViolation, "no attempts made");
  for (int attempt = 0; attempt < std::max(1, opt.compile_attempts); ++attempt) {
    CompileOptions o = opt;
    o.seed = opt.seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(attempt);
    try {
      auto t0 = clock::now();
      Assembler mb(work, o);
      if (p == 0) {
        long long win = 1 << 16;
        unsigned long long want = 64ull * E * E;
        if (want > (1ull << 60)) want = 1ull << 60;
        if (static_cast<long long>(want) > win) win = static_cast<long long>(want);
        // the sampler window backs every char-0 draw
        // (the Assembler owns the sampler; reconstruct with the window set)
        mb.sampler().set_char0_window(win);
      }
      mb.initial_framing();
      mb.run_program(prog, ext.assign);
      if (o.run_bystanders) mb.cfg().complete_bystanders();
      auto t1 = clock::now();
      CompileReport rep;
      if (o.run_conditions) rep.conditions = mb.cfg().check_conditions(o.threads);
      auto t2 = clock::now();
      rep.cases = mb.cases();
      rep.n_points = mb.cfg().points().size();
      rep.n_lines = mb.cfg().lines().size();
      rep.free_count = mb.cfg().free_count();
      rep.working_field = work->name();
      rep.estimated_elements = E;
      rep.seed_used = o.seed;
      rep.construct_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      rep.check_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
      return CompileResult{std::move(mb.cfg()), std::move(rep), std::move(prog), std::move(w)};
    } catch (const Error& e) {
      if (e.kind() == Err::ConcurrencyViolation || e.kind() == Err::CoincidenceRetryExhausted) {
        last = e;
        continue;  // a failed general-position draw: recompile with a new seed
      }
      throw;
    }
  }
  throw last;
}

}  // namespace staudt
