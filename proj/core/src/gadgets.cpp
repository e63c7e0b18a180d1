#include "staudt/gadgets.hpp"

#include <sstream>

namespace staudt {

Scalar RandomChoice::draw(const FieldPtr& f, const std::vector<Scalar>& forbidden,
                          const char* purpose) {
  Scalar v = sample_general(f, forbidden, rng_);
  record(purpose, v, forbidden.size());
  return v;
}

Scalar FixedChoice::draw(const FieldPtr& f, const std::vector<Scalar>& forbidden,
                         const char* purpose) {
  (void)f;
  if (next_ >= values_.size())
    fail(Err::DegenerateChoice, "fixed choice sequence exhausted (construction retried)");
  Scalar v = values_[next_++];
  for (const auto& b : forbidden)
    if (b == v) fail(Err::DegenerateChoice, std::string("fixed choice forbidden at ") + purpose);
  record(purpose, v, forbidden.size());
  return v;
}

int FramedCarrier::point_with_label(const Scalar& s) const {
  if (labels[0] == s) return fpoints[0];
  if (labels[1] == s) return fpoints[1];
  fail(Err::CaseViolation, "carrier has no framing point labeled " + s.str());
}

Framing framing_of(const Configuration& cfg, const FramedCarrier& c) {
  return make_framing(cfg.line(c.line).ln, c.labels[0], cfg.point(c.fpoints[0]).pt, c.labels[1],
                      cfg.point(c.fpoints[1]).pt);
}

Scalar carrier_coordinate(const Configuration& cfg, const FramedCarrier& c) {
  P1Value v = framed_coordinate(framing_of(cfg, c), cfg.point(c.vpoint).pt);
  if (v.infinite) fail(Err::DegenerateTuple, "carrier variable point at p3");
  return v.v;
}

namespace {

bool retryable(Err k) {
  return k == Err::UnintendedIncidence || k == Err::DuplicateElement ||
         k == Err::CoincidentPoints || k == Err::CoincidentLines || k == Err::DegenerateTuple;
}

int p3_id(const Configuration& cfg) {
  auto id = cfg.find_point(anchor_p3(cfg.field()));
  if (!id) fail(Err::SchemaError, "configuration lacks the anchor p3");
  return *id;
}

struct ShiftImages {
  int lprime = -1, X = -1;
  std::array<int, 3> img{-1, -1, -1};
  std::array<int, 3> rays{-1, -1, -1};
};

// Draw a general horizontal line and a general center, then project the
// three marked points `pts` onto the new line. pts[1] is the value slot
// (its image gets the variable role).
ShiftImages shift_core(Configuration& cfg, const std::array<int, 3>& pts, ChoiceSource& ch,
                       const std::string& tag) {
  const FieldPtr& f = cfg.field();
  ShiftImages out;
  std::vector<Scalar> hforb = cfg.horizontal_forbidden();
  Scalar yl = ch.draw(f, hforb, "lprime_y");
  out.lprime = cfg.add_line(horizontal_line(yl), LineRole::Auxiliary, tag + ".l'", {p3_id(cfg)});

  hforb.push_back(yl);
  Scalar yX = ch.draw(f, hforb, "center_y");
  std::vector<Scalar> xforb;
  for (const auto& ml : cfg.lines()) {
    if (is_horizontal(ml.ln)) continue;
    // normalized non-horizontal lines have leading coefficient 1
    xforb.push_back(-(ml.ln.c[1] * yX + ml.ln.c[2]));
  }
  Scalar xX = ch.draw(f, xforb, "center_x");
  out.X = cfg.add_point(affine_point(xX, yX), PointRole::Auxiliary, tag + ".X", tag, {});

  const PPoint Xpt = cfg.point(out.X).pt;
  for (int i = 0; i < 3; ++i) {
    const PPoint P = cfg.point(pts[i]).pt;
    PLine ray = join(Xpt, P);
    out.rays[i] =
        cfg.add_line(ray, LineRole::Auxiliary, tag + ".r" + std::to_string(i), {out.X, pts[i]});
    PPoint img = meet(ray, cfg.line(out.lprime).ln);
    out.img[i] = cfg.add_point(img, i == 1 ? PointRole::Variable : PointRole::Framing,
                               tag + ".i" + std::to_string(i), tag, {out.rays[i], out.lprime});
  }
  return out;
}

// Run `body` with rollback-and-retry on coincidence failures; the trace is
// appended and the accepted draws are charged to the ledger on success.
template <typename Body>
auto with_retries(Configuration& cfg, ChoiceSource& ch, GadgetTrace& tr, Body&& body) {
  for (int attempt = 0; attempt < kGadgetRetries; ++attempt) {
    auto ck = cfg.checkpoint();
    tr.draws.clear();
    tr.out_points.clear();
    tr.out_lines.clear();
    ch.set_sink(&tr.draws);
    try {
      auto result = body();
      ch.set_sink(nullptr);
      cfg.add_free_draws(tr.draws.size());
      cfg.traces().push_back(tr);
      return result;
    } catch (const Error& e) {
      ch.set_sink(nullptr);
      cfg.rollback(ck);
      if (retryable(e.kind())) continue;
      throw;
    }
  }
  fail(Err::CoincidenceRetryExhausted, tr.kind + " exhausted " +
                                            std::to_string(kGadgetRetries) + " retries");
}

void note_shift_outputs(GadgetTrace& tr, const ShiftImages& s) {
  tr.out_points.push_back(s.X);
  for (int i : s.img) tr.out_points.push_back(i);
  tr.out_lines.push_back(s.lprime);
  for (int r : s.rays) tr.out_lines.push_back(r);
}

void check_carrier(const Configuration& cfg, const FramedCarrier& c) {
  if (c.labels[0] == c.labels[1]) fail(Err::CoincidentInputs, "carrier labels coincide");
  if (c.fpoints[0] == c.fpoints[1] || c.fpoints[0] == c.vpoint || c.fpoints[1] == c.vpoint)
    fail(Err::CoincidentInputs, "carrier points coincide");
  if (carrier_coordinate(cfg, c) != c.value)
    fail(Err::SchemaError, "carrier value does not match its realization");
}

}  // namespace

FramedCarrier parallel_shift_ex(
    Configuration& cfg, const FramedCarrier& src, ChoiceSource& ch,
    const std::function<void(Configuration&, FramedCarrier&, GadgetTrace&)>& follow) {
  check_carrier(cfg, src);
  GadgetTrace tr;
  tr.id = static_cast<int>(cfg.traces().size());
  tr.kind = "parallel_shift";
  tr.input_points = {src.fpoints[0], src.vpoint, src.fpoints[1]};
  tr.input_lines = {src.line};
  tr.relation = "chart value preserved";
  const std::string tag = "g" + std::to_string(tr.id);
  return with_retries(cfg, ch, tr, [&]() {
    ShiftImages s = shift_core(cfg, {src.fpoints[0], src.vpoint, src.fpoints[1]}, ch, tag);
    note_shift_outputs(tr, s);
    FramedCarrier out{s.lprime, src.labels, {s.img[0], s.img[2]}, s.img[1], src.value};
    cfg.mutable_line(s.lprime).framing =
        LineFraming{out.labels, {out.fpoints[0], out.fpoints[1]}, out.vpoint};
    if (carrier_coordinate(cfg, out) != src.value)
      throw std::logic_error("parallel shift failed to preserve the chart value");
    if (follow) follow(cfg, out, tr);
    return out;
  });
}

FramedCarrier parallel_shift(Configuration& cfg, const FramedCarrier& src, ChoiceSource& ch) {
  return parallel_shift_ex(cfg, src, ch, nullptr);
}

namespace {

// The complete quadrilateral witnessing that M is the midpoint of A and B on
// `line` (all three already marked, with exact coordinates).
void harmonic_figure(Configuration& cfg, int line, int A, int B, int M, ChoiceSource& ch,
                     GadgetTrace& tr, const std::string& tag) {
  const FieldPtr& f = cfg.field();
  std::vector<Scalar> hforb = cfg.horizontal_forbidden();
  Scalar yl = ch.draw(f, hforb, "lprime_y");
  int lp = cfg.add_line(horizontal_line(yl), LineRole::Auxiliary, tag + ".l'", {p3_id(cfg)});
  hforb.push_back(yl);
  Scalar yX = ch.draw(f, hforb, "center_y");
  std::vector<Scalar> xforb;
  for (const auto& ml : cfg.lines()) {
    if (is_horizontal(ml.ln)) continue;
    xforb.push_back(-(ml.ln.c[1] * yX + ml.ln.c[2]));
  }
  Scalar xX = ch.draw(f, xforb, "center_x");
  int X = cfg.add_point(affine_point(xX, yX), PointRole::Auxiliary, tag + ".X", tag, {});
  const PPoint Xpt = cfg.point(X).pt;

  int rayA = cfg.add_line(join(Xpt, cfg.point(A).pt), LineRole::Auxiliary, tag + ".XA", {X, A});
  int Ap = cfg.add_point(meet(cfg.line(rayA).ln, cfg.line(lp).ln), PointRole::Auxiliary,
                         tag + ".A'", tag, {rayA, lp});
  int rayB = cfg.add_line(join(Xpt, cfg.point(B).pt), LineRole::Auxiliary, tag + ".XB", {X, B});
  int Bp = cfg.add_point(meet(cfg.line(rayB).ln, cfg.line(lp).ln), PointRole::Auxiliary,
                         tag + ".B'", tag, {rayB, lp});
  int qa = cfg.add_line(join(cfg.point(A).pt, cfg.point(Bp).pt), LineRole::Auxiliary, tag + ".AB'",
                        {A, Bp});
  int qb = cfg.add_line(join(cfg.point(Ap).pt, cfg.point(B).pt), LineRole::Auxiliary, tag + ".A'B",
                        {Ap, B});
  int Y = cfg.add_point(meet(cfg.line(qa).ln, cfg.line(qb).ln), PointRole::Auxiliary, tag + ".Y",
                        tag, {qa, qb});
  // the line XY is required to pass through M: this is the enforced relation
  int rXY = cfg.add_line(join(Xpt, cfg.point(Y).pt), LineRole::Auxiliary, tag + ".XY", {X, Y, M});
  int Mp = cfg.add_point(meet(cfg.line(rXY).ln, cfg.line(lp).ln), PointRole::Auxiliary, tag + ".M'",
                         tag, {rXY, lp});
  tr.out_points = {X, Ap, Bp, Y, Mp};
  tr.out_lines = {lp, rayA, rayB, qa, qb, rXY};
}

// shared midpoint/reflect driver: adds the new collinear point first, then
// builds the figure around (A, B, M)
int harmonic_gadget(Configuration& cfg, int line, int existing1, int existing2,
                    const Scalar& new_x, bool new_is_M, PointRole role, const char* kind,
                    ChoiceSource& ch) {
  const FieldPtr& f = cfg.field();
  if (f->characteristic == 2)
    fail(Err::CharTwo, std::string(kind) + " is unavailable in characteristic 2");
  for (int pid : {existing1, existing2})
    if (!incident(cfg.point(pid).pt, cfg.line(line).ln))
      fail(Err::PointNotOnLine, std::string(kind) + ": input point off its line");
  GadgetTrace tr;
  tr.id = static_cast<int>(cfg.traces().size());
  tr.kind = kind;
  tr.input_points = {existing1, existing2};
  tr.input_lines = {line};
  tr.relation = "2 * x(M) = x(A) + x(B)";
  const std::string tag = "g" + std::to_string(tr.id);
  auto ck0 = cfg.checkpoint();
  Scalar yl = y_intercept(cfg.line(line).ln);
  int added = cfg.add_point(affine_point(new_x, yl), role, tag + (new_is_M ? ".M" : ".A"), tag,
                            {line});
  int A, B, M;
  if (new_is_M) {
    A = existing1;
    B = existing2;
    M = added;
  } else {
    M = existing1;
    B = existing2;
    A = added;
  }
  try {
    return with_retries(cfg, ch, tr, [&]() {
      harmonic_figure(cfg, line, A, B, M, ch, tr, tag);
      tr.out_points.push_back(added);
      return added;
    });
  } catch (...) {
    cfg.rollback(ck0);
    throw;
  }
}

}  // namespace

int midpoint(Configuration& cfg, int line, int A, int B, ChoiceSource& ch) {
  if (A == B || cfg.point(A).pt == cfg.point(B).pt)
    fail(Err::CoincidentInputs, "midpoint of a single point");
  if (cfg.field()->characteristic == 2) fail(Err::CharTwo, "midpoint in characteristic 2");
  Scalar a = x_position(cfg.point(A).pt), b = x_position(cfg.point(B).pt);
  Scalar m = (a + b) / Scalar::of_int(cfg.field(), 2);
  return harmonic_gadget(cfg, line, A, B, m, true, PointRole::Auxiliary, "midpoint", ch);
}

int reflect(Configuration& cfg, int line, int M, int B, ChoiceSource& ch) {
  if (M == B || cfg.point(M).pt == cfg.point(B).pt)
    fail(Err::CoincidentInputs, "reflect with coincident inputs");
  if (cfg.field()->characteristic == 2) fail(Err::CharTwo, "reflect in characteristic 2");
  Scalar m = x_position(cfg.point(M).pt), b = x_position(cfg.point(B).pt);
  Scalar a = Scalar::of_int(cfg.field(), 2) * m - b;
  return harmonic_gadget(cfg, line, M, B, a, false, PointRole::Unit, "reflect", ch);
}

FramedCarrier generic_addition(Configuration& cfg, const FramedCarrier& a, const FramedCarrier& b,
                               ChoiceSource& ch) {
  const FieldPtr& f = cfg.field();
  const Scalar zero = Scalar::zero(f), one = Scalar::one(f);
  const Scalar sum = a.value + b.value;
  for (const Scalar& v : {a.value, b.value, sum})
    if (v == zero || v == one)
      fail(Err::CaseViolation, "generic addition requires values and sum outside {0,1}");
  if (!a.label_set_is(zero, one) || !b.label_set_is(zero, one))
    fail(Err::CaseViolation, "generic addition requires {0,1} framing");
  if (a.line == b.line) fail(Err::CaseViolation, "generic addition requires distinct lines");
  check_carrier(cfg, a);
  check_carrier(cfg, b);

  GadgetTrace tr;
  tr.id = static_cast<int>(cfg.traces().size());
  tr.kind = "generic_addition";
  tr.input_points = {a.fpoints[0], a.vpoint, a.fpoints[1], b.fpoints[0], b.vpoint, b.fpoints[1]};
  tr.input_lines = {a.line, b.line};
  tr.relation = "value(l') = value(a) + value(b)";
  const std::string tag = "g" + std::to_string(tr.id);
  const int pa0 = a.point_with_label(zero), pa1 = a.point_with_label(one);
  const int pb0 = b.point_with_label(zero), pb1 = b.point_with_label(one);
  return with_retries(cfg, ch, tr, [&]() {
    ShiftImages s = shift_core(cfg, {pa0, a.vpoint, pa1}, ch, tag);
    note_shift_outputs(tr, s);
    const int P0 = s.img[0], V = s.img[1], P1 = s.img[2];
    int q0 = cfg.add_line(join(cfg.point(P0).pt, cfg.point(pb0).pt), LineRole::Auxiliary,
                          tag + ".q0", {P0, pb0});
    int q1 = cfg.add_line(join(cfg.point(P1).pt, cfg.point(pb1).pt), LineRole::Auxiliary,
                          tag + ".q1", {P1, pb1});
    int Y2 = cfg.add_point(meet(cfg.line(q0).ln, cfg.line(q1).ln), PointRole::Auxiliary,
                           tag + ".Y2", tag, {q0, q1});
    // the auxiliary transfer line through Y2 is horizontal (through p3)
    int ldd = cfg.add_line(join(cfg.point(Y2).pt, anchor_p3(f)), LineRole::Auxiliary, tag + ".l''",
                           {Y2, p3_id(cfg)});
    int q2 = cfg.add_line(join(cfg.point(V).pt, cfg.point(pb0).pt), LineRole::Auxiliary,
                          tag + ".q2", {V, pb0});
    int Y1 = cfg.add_point(meet(cfg.line(q2).ln, cfg.line(ldd).ln), PointRole::Auxiliary,
                           tag + ".Y1", tag, {q2, ldd});
    int q3 = cfg.add_line(join(cfg.point(Y1).pt, cfg.point(b.vpoint).pt), LineRole::Auxiliary,
                          tag + ".q3", {Y1, b.vpoint});
    int Vp = cfg.add_point(meet(cfg.line(q3).ln, cfg.line(s.lprime).ln), PointRole::Variable,
                           tag + ".V'", tag, {q3, s.lprime});
    for (int x : {Y2, Y1, Vp}) tr.out_points.push_back(x);
    for (int x : {q0, q1, ldd, q2, q3}) tr.out_lines.push_back(x);
    FramedCarrier out{s.lprime, {zero, one}, {P0, P1}, Vp, sum};
    cfg.mutable_line(s.lprime).framing = LineFraming{out.labels, {P0, P1}, Vp};
    if (carrier_coordinate(cfg, out) != sum)
      throw std::logic_error("generic addition produced a wrong chart value");
    return out;
  });
}

FramedCarrier generic_multiplication(Configuration& cfg, const FramedCarrier& a,
                                     const FramedCarrier& b, ChoiceSource& ch) {
  const FieldPtr& f = cfg.field();
  const Scalar zero = Scalar::zero(f), one = Scalar::one(f);
  const Scalar prod = a.value * b.value;
  for (const Scalar& v : {a.value, b.value, prod})
    if (v == zero || v == one)
      fail(Err::CaseViolation, "generic multiplication requires values and product outside {0,1}");
  if (!a.label_set_is(zero, one) || !b.label_set_is(zero, one))
    fail(Err::CaseViolation, "generic multiplication requires {0,1} framing");
  if (a.line == b.line) fail(Err::CaseViolation, "generic multiplication requires distinct lines");
  check_carrier(cfg, a);
  check_carrier(cfg, b);

  GadgetTrace tr;
  tr.id = static_cast<int>(cfg.traces().size());
  tr.kind = "generic_multiplication";
  tr.input_points = {a.fpoints[0], a.vpoint, a.fpoints[1], b.fpoints[0], b.vpoint, b.fpoints[1]};
  tr.input_lines = {a.line, b.line};
  tr.relation = "value(l') = value(a) * value(b)";
  const std::string tag = "g" + std::to_string(tr.id);
  const int pa0 = a.point_with_label(zero), pa1 = a.point_with_label(one);
  const int pb0 = b.point_with_label(zero), pb1 = b.point_with_label(one);
  return with_retries(cfg, ch, tr, [&]() {
    ShiftImages s = shift_core(cfg, {pa0, a.vpoint, pa1}, ch, tag);
    note_shift_outputs(tr, s);
    const int P0 = s.img[0], V = s.img[1], P1 = s.img[2];
    int m0 = cfg.add_line(join(cfg.point(P0).pt, cfg.point(pb0).pt), LineRole::Auxiliary,
                          tag + ".m0", {P0, pb0});
    int m1 = cfg.add_line(join(cfg.point(V).pt, cfg.point(pb1).pt), LineRole::Auxiliary,
                          tag + ".m1", {V, pb1});
    int Y = cfg.add_point(meet(cfg.line(m0).ln, cfg.line(m1).ln), PointRole::Auxiliary, tag + ".Y",
                          tag, {m0, m1});
    int m2 = cfg.add_line(join(cfg.point(Y).pt, cfg.point(b.vpoint).pt), LineRole::Auxiliary,
                          tag + ".m2", {Y, b.vpoint});
    int Vp = cfg.add_point(meet(cfg.line(m2).ln, cfg.line(s.lprime).ln), PointRole::Variable,
                           tag + ".V'", tag, {m2, s.lprime});
    for (int x : {Y, Vp}) tr.out_points.push_back(x);
    for (int x : {m0, m1, m2}) tr.out_lines.push_back(x);
    FramedCarrier out{s.lprime, {zero, one}, {P0, P1}, Vp, prod};
    cfg.mutable_line(s.lprime).framing = LineFraming{out.labels, {P0, P1}, Vp};
    if (carrier_coordinate(cfg, out) != prod)
      throw std::logic_error("generic multiplication produced a wrong chart value");
    return out;
  });
}

void attach_equal(Configuration& cfg, const FramedCarrier& on_lprime, const FramedCarrier& b,
                  GadgetTrace& tr) {
  if (!b.label_set_is(on_lprime.labels[0], on_lprime.labels[1]))
    fail(Err::CaseViolation, "attach requires matching framing-types");
  const Scalar s1 = on_lprime.labels[0], s2 = on_lprime.labels[1];
  const int a1 = on_lprime.fpoints[0], a2 = on_lprime.fpoints[1];
  const int b1 = b.point_with_label(s1), b2 = b.point_with_label(s2);
  const std::string tag = "g" + std::to_string(tr.id);
  int e0 = cfg.add_line(join(cfg.point(a1).pt, cfg.point(b1).pt), LineRole::Auxiliary, tag + ".e0",
                        {a1, b1});
  int e1 = cfg.add_line(join(cfg.point(a2).pt, cfg.point(b2).pt), LineRole::Auxiliary, tag + ".e1",
                        {a2, b2});
  int Xp = cfg.add_point(meet(cfg.line(e0).ln, cfg.line(e1).ln), PointRole::Auxiliary, tag + ".X'",
                         tag, {e0, e1});
  // codimension-1 condition: the projection of V_b from X' lands exactly on
  // the carrier's variable point
  int e2 = cfg.add_line(join(cfg.point(Xp).pt, cfg.point(b.vpoint).pt), LineRole::Auxiliary,
                        tag + ".e2", {Xp, b.vpoint, on_lprime.vpoint});
  tr.out_points.push_back(Xp);
  for (int x : {e0, e1, e2}) tr.out_lines.push_back(x);
}

void equality(Configuration& cfg, const FramedCarrier& a, const FramedCarrier& b,
              ChoiceSource& ch) {
  check_carrier(cfg, a);
  check_carrier(cfg, b);
  if (!b.label_set_is(a.labels[0], a.labels[1]))
    fail(Err::CaseViolation, "equality requires the same framing-type");
  GadgetTrace tr;
  tr.id = static_cast<int>(cfg.traces().size());
  tr.kind = "equality";
  tr.input_points = {a.fpoints[0], a.vpoint, a.fpoints[1], b.fpoints[0], b.vpoint, b.fpoints[1]};
  tr.input_lines = {a.line, b.line};
  tr.relation = "value(a) = value(b)";
  const std::string tag = "g" + std::to_string(tr.id);
  with_retries(cfg, ch, tr, [&]() {
    ShiftImages s = shift_core(cfg, {a.fpoints[0], a.vpoint, a.fpoints[1]}, ch, tag);
    note_shift_outputs(tr, s);
    FramedCarrier shifted{s.lprime, a.labels, {s.img[0], s.img[2]}, s.img[1], a.value};
    cfg.mutable_line(s.lprime).framing =
        LineFraming{shifted.labels, {shifted.fpoints[0], shifted.fpoints[1]}, shifted.vpoint};
    attach_equal(cfg, shifted, b, tr);
    return 0;
  });
}


namespace {

template <typename Figure>
void enforce_with_attach(Configuration& cfg, const FramedCarrier& c, ChoiceSource& ch,
                         GadgetTrace& tr, Figure&& fig) {
  with_retries(cfg, ch, tr, [&]() {
    FramedCarrier out = fig(tr);
    attach_equal(cfg, out, c, tr);
    return 0;
  });
}

}  // namespace

void generic_addition_enforce(Configuration& cfg, const FramedCarrier& a, const FramedCarrier& b,
                              const FramedCarrier& c, ChoiceSource& ch) {
  const FieldPtr& f = cfg.field();
  const Scalar zero = Scalar::zero(f), one = Scalar::one(f);
  const Scalar sum = a.value + b.value;
  for (const Scalar& v : {a.value, b.value, sum})
    if (v == zero || v == one)
      fail(Err::CaseViolation, "generic addition requires values and sum outside {0,1}");
  if (!a.label_set_is(zero, one) || !b.label_set_is(zero, one) || !c.label_set_is(zero, one))
    fail(Err::CaseViolation, "generic addition requires {0,1} framing");
  if (a.line == b.line || a.line == c.line || b.line == c.line)
    fail(Err::CaseViolation, "generic addition requires distinct lines");
  check_carrier(cfg, a);
  check_carrier(cfg, b);
  check_carrier(cfg, c);

  GadgetTrace tr;
  tr.id = static_cast<int>(cfg.traces().size());
  tr.kind = "generic_addition";
  tr.input_points = {a.fpoints[0], a.vpoint, a.fpoints[1], b.fpoints[0], b.vpoint, b.fpoints[1],
                     c.fpoints[0], c.vpoint, c.fpoints[1]};
  tr.input_lines = {a.line, b.line, c.line};
  tr.relation = "value(a) + value(b) = value(c)";
  const std::string tag = "g" + std::to_string(tr.id);
  const int pa0 = a.point_with_label(zero), pa1 = a.point_with_label(one);
  const int pb0 = b.point_with_label(zero), pb1 = b.point_with_label(one);
  enforce_with_attach(cfg, c, ch, tr, [&](GadgetTrace& t) {
    ShiftImages s = shift_core(cfg, {pa0, a.vpoint, pa1}, ch, tag);
    note_shift_outputs(t, s);
    const int P0 = s.img[0], V = s.img[1], P1 = s.img[2];
    int q0 = cfg.add_line(join(cfg.point(P0).pt, cfg.point(pb0).pt), LineRole::Auxiliary,
                          tag + ".q0", {P0, pb0});
    int q1 = cfg.add_line(join(cfg.point(P1).pt, cfg.point(pb1).pt), LineRole::Auxiliary,
                          tag + ".q1", {P1, pb1});
    int Y2 = cfg.add_point(meet(cfg.line(q0).ln, cfg.line(q1).ln), PointRole::Auxiliary,
                           tag + ".Y2", tag, {q0, q1});
    int ldd = cfg.add_line(join(cfg.point(Y2).pt, anchor_p3(f)), LineRole::Auxiliary, tag + ".l''",
                           {Y2, p3_id(cfg)});
    int q2 = cfg.add_line(join(cfg.point(V).pt, cfg.point(pb0).pt), LineRole::Auxiliary,
                          tag + ".q2", {V, pb0});
    int Y1 = cfg.add_point(meet(cfg.line(q2).ln, cfg.line(ldd).ln), PointRole::Auxiliary,
                           tag + ".Y1", tag, {q2, ldd});
    int q3 = cfg.add_line(join(cfg.point(Y1).pt, cfg.point(b.vpoint).pt), LineRole::Auxiliary,
                          tag + ".q3", {Y1, b.vpoint});
    int Vp = cfg.add_point(meet(cfg.line(q3).ln, cfg.line(s.lprime).ln), PointRole::Variable,
                           tag + ".V'", tag, {q3, s.lprime});
    for (int x : {Y2, Y1, Vp}) t.out_points.push_back(x);
    for (int x : {q0, q1, ldd, q2, q3}) t.out_lines.push_back(x);
    FramedCarrier out{s.lprime, {zero, one}, {P0, P1}, Vp, sum};
    cfg.mutable_line(s.lprime).framing = LineFraming{out.labels, {P0, P1}, Vp};
    if (carrier_coordinate(cfg, out) != sum)
      throw std::logic_error("generic addition produced a wrong chart value");
    return out;
  });
}

void generic_multiplication_enforce(Configuration& cfg, const FramedCarrier& a,
                                    const FramedCarrier& b, const FramedCarrier& c,
                                    ChoiceSource& ch) {
  const FieldPtr& f = cfg.field();
  const Scalar zero = Scalar::zero(f), one = Scalar::one(f);
  const Scalar prod = a.value * b.value;
  for (const Scalar& v : {a.value, b.value, prod})
    if (v == zero || v == one)
      fail(Err::CaseViolation, "generic multiplication requires values and product outside {0,1}");
  if (!a.label_set_is(zero, one) || !b.label_set_is(zero, one) || !c.label_set_is(zero, one))
    fail(Err::CaseViolation, "generic multiplication requires {0,1} framing");
  if (a.line == b.line || a.line == c.line || b.line == c.line)
    fail(Err::CaseViolation, "generic multiplication requires distinct lines");
  check_carrier(cfg, a);
  check_carrier(cfg, b);
  check_carrier(cfg, c);

  GadgetTrace tr;
  tr.id = static_cast<int>(cfg.traces().size());
  tr.kind = "generic_multiplication";
  tr.input_points = {a.fpoints[0], a.vpoint, a.fpoints[1], b.fpoints[0], b.vpoint, b.fpoints[1],
                     c.fpoints[0], c.vpoint, c.fpoints[1]};
  tr.input_lines = {a.line, b.line, c.line};
  tr.relation = "value(a) * value(b) = value(c)";
  const std::string tag = "g" + std::to_string(tr.id);
  const int pa0 = a.point_with_label(zero), pa1 = a.point_with_label(one);
  const int pb0 = b.point_with_label(zero), pb1 = b.point_with_label(one);
  enforce_with_attach(cfg, c, ch, tr, [&](GadgetTrace& t) {
    ShiftImages s = shift_core(cfg, {pa0, a.vpoint, pa1}, ch, tag);
    note_shift_outputs(t, s);
    const int P0 = s.img[0], V = s.img[1], P1 = s.img[2];
    int m0 = cfg.add_line(join(cfg.point(P0).pt, cfg.point(pb0).pt), LineRole::Auxiliary,
                          tag + ".m0", {P0, pb0});
    int m1 = cfg.add_line(join(cfg.point(V).pt, cfg.point(pb1).pt), LineRole::Auxiliary,
                          tag + ".m1", {V, pb1});
    int Y = cfg.add_point(meet(cfg.line(m0).ln, cfg.line(m1).ln), PointRole::Auxiliary, tag + ".Y",
                          tag, {m0, m1});
    int m2 = cfg.add_line(join(cfg.point(Y).pt, cfg.point(b.vpoint).pt), LineRole::Auxiliary,
                          tag + ".m2", {Y, b.vpoint});
    int Vp = cfg.add_point(meet(cfg.line(m2).ln, cfg.line(s.lprime).ln), PointRole::Variable,
                           tag + ".V'", tag, {m2, s.lprime});
    for (int x : {Y, Vp}) t.out_points.push_back(x);
    for (int x : {m0, m1, m2}) t.out_lines.push_back(x);
    FramedCarrier out{s.lprime, {zero, one}, {P0, P1}, Vp, prod};
    cfg.mutable_line(s.lprime).framing = LineFraming{out.labels, {P0, P1}, Vp};
    if (carrier_coordinate(cfg, out) != prod)
      throw std::logic_error("generic multiplication produced a wrong chart value");
    return out;
  });
}

}  // namespace staudt
