#include "doctest.h"
#include "staudt/gadgets.hpp"

using namespace staudt;

namespace {

Scalar S(const FieldPtr& f, long v) { return Scalar::of_int(f, v); }

// minimal scene for in-vitro gadget semantics: only p3 is marked
Configuration bare_scene(const FieldPtr& f) {
  Configuration cfg(f);
  cfg.add_point(anchor_p3(f), PointRole::Anchor, "p3", "initial", {});
  return cfg;
}

// a {0,1}-framed variable line at height h with framing x-positions u0, u1
// and chart value v
FramedCarrier scene_carrier(Configuration& cfg, long h, long u0, long u1, const Scalar& v,
                            const std::string& name) {
  const FieldPtr& f = cfg.field();
  int lid = cfg.add_line_observed(horizontal_line(S(f, h)), LineRole::VariableBearing, name);
  int f0 = cfg.add_point_observed(affine_point(S(f, u0), S(f, h)), PointRole::Framing, name + ".0",
                                  "scene");
  int f1 = cfg.add_point_observed(affine_point(S(f, u1), S(f, h)), PointRole::Framing, name + ".1",
                                  "scene");
  Framing fr = make_framing(cfg.line(lid).ln, S(f, 0), cfg.point(f0).pt, S(f, 1), cfg.point(f1).pt);
  int vp = cfg.add_point_observed(point_at_coordinate(fr, v), PointRole::Variable, name + ".V",
                                  "scene");
  FramedCarrier c{lid, {S(f, 0), S(f, 1)}, {f0, f1}, vp, v};
  cfg.mutable_line(lid).framing = LineFraming{c.labels, {f0, f1}, vp};
  return c;
}

}  // namespace

TEST_CASE("parallel shift preserves the chart value (worked example over Q)") {
  auto q = make_field(0, 1);
  Configuration cfg = init_anchors(q);
  // l: y=4 with 0 -> (0,4), 1 -> (1,4), V = (2,4) carrying value 2
  FramedCarrier src = scene_carrier(cfg, 4, 0, 1, S(q, 2), "l");
  // force l' : y=6 and X = (5,9)
  FixedChoice ch({S(q, 6), S(q, 9), S(q, 5)});
  FramedCarrier out = parallel_shift(cfg, src, ch);
  CHECK(out.value == S(q, 2));
  CHECK(cfg.point(out.fpoints[0]).pt == affine_point(S(q, 2), S(q, 6)));
  CHECK(cfg.point(out.vpoint).pt ==
        affine_point(Scalar::of_rational(mpq_class(16, 5)), S(q, 6)));
  CHECK(cfg.point(out.fpoints[1]).pt ==
        affine_point(Scalar::of_rational(mpq_class(13, 5)), S(q, 6)));
  CHECK(carrier_coordinate(cfg, out) == S(q, 2));
  CHECK(cfg.traces().size() == 1);
  CHECK(cfg.traces()[0].kind == "parallel_shift");
  CHECK(cfg.traces()[0].draws.size() == 3);
  CHECK(cfg.free_count() == 3);
}

TEST_CASE("parallel shift value preserved for random draws") {
  auto f = make_field(1009, 1);
  Sampler rng(77);
  RandomChoice ch(rng);
  for (int i = 0; i < 20; ++i) {
    Configuration cfg = init_anchors(f);
    Scalar v = sample_general(f, {S(f, 0), S(f, 1)}, rng);
    FramedCarrier src = scene_carrier(cfg, 7, 3, 4, v, "l");
    for (int k = 0; k < 10; ++k) {
      FramedCarrier out = parallel_shift(cfg, src, ch);
      CHECK(out.value == v);
      CHECK(carrier_coordinate(cfg, out) == v);
      src = out;
    }
  }
}

TEST_CASE("midpoint and reflect") {
  Sampler rng(3);
  RandomChoice ch(rng);
  {
    auto f = make_field(5, 1);
    // bare scene so the result at x = 0 collides with nothing
    Configuration cfg = bare_scene(f);
    int lid = cfg.add_line_observed(horizontal_line(S(f, 2)), LineRole::Auxiliary, "l");
    int A = cfg.add_point_observed(affine_point(S(f, 2), S(f, 2)), PointRole::Auxiliary, "A", "s");
    int B = cfg.add_point_observed(affine_point(S(f, 3), S(f, 2)), PointRole::Auxiliary, "B", "s");
    int M = midpoint(cfg, lid, A, B, ch);
    CHECK(x_position(cfg.point(M).pt) == S(f, 0));  // (2+3)/2 = 5 * 3 = 0 mod 5
    CHECK_THROWS_AS(midpoint(cfg, lid, A, A, ch), Error);
  }
  {
    // reflect: M at 0, B at 1 gives A at -1 (the initial framing move)
    auto fb = make_field(101, 1);
    AnchorIds ids;
    Configuration cfg = init_anchors(fb, &ids);
    Sampler rng7(5);
    RandomChoice ch7(rng7);
    int A = reflect(cfg, ids.l13, ids.p1, ids.unit, ch7);
    CHECK(cfg.point(A).pt == affine_point(S(fb, -1), S(fb, 0)));
    // F7, M at 3, B at 5 -> A at 1 = 6 - 5
    auto f7 = make_field(7, 1);
    Configuration cfg2 = bare_scene(f7);
    int l2 = cfg2.add_line_observed(horizontal_line(S(f7, 4)), LineRole::Auxiliary, "l2");
    int M2 = cfg2.add_point_observed(affine_point(S(f7, 3), S(f7, 4)), PointRole::Auxiliary, "M2",
                                     "s");
    int B2 = cfg2.add_point_observed(affine_point(S(f7, 5), S(f7, 4)), PointRole::Auxiliary, "B2",
                                     "s");
    int A2 = reflect(cfg2, l2, M2, B2, ch7);
    CHECK(x_position(cfg2.point(A2).pt) == S(f7, 1));
  }
  {
    auto f2 = make_field(2, 2);
    Configuration cfg = init_anchors(f2);
    Sampler rng2(1);
    RandomChoice ch2(rng2);
    try {
      midpoint(cfg, 1, 0, 4, ch2);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == Err::CharTwo);
    }
  }
}

TEST_CASE("generic addition and multiplication figures") {
  auto f = make_field(101, 1);
  Sampler rng(11);
  RandomChoice ch(rng);
  {
    Configuration cfg = init_anchors(f);
    FramedCarrier a = scene_carrier(cfg, 2, 3, 4, S(f, 20), "la");
    FramedCarrier b = scene_carrier(cfg, 3, 3, 4, S(f, 31), "lb");
    // sum landing on 1 is a case violation: 20 + 82 = 1 mod 101
    FramedCarrier c = scene_carrier(cfg, 5, 3, 4, S(f, 82), "lc");
    // a value-1 carrier is degenerate (V would sit on a framing point), so
    // craft the struct without adding the coincident point
    FramedCarrier one{b.line, b.labels, b.fpoints, b.fpoints[1], S(f, 1)};
    FramedCarrier out = generic_addition(cfg, a, b, ch);
    CHECK(out.value == S(f, 51));
    CHECK(carrier_coordinate(cfg, out) == S(f, 51));
    CHECK(cfg.traces().back().kind == "generic_addition");
    CHECK(cfg.traces().back().draws.size() == 3);
    try {
      generic_addition(cfg, a, c, ch);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == Err::CaseViolation);
    }
    // operand value 1 is a case violation
    try {
      generic_addition(cfg, one, b, ch);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == Err::CaseViolation);
    }
  }
  {
    Configuration cfg = init_anchors(f);
    FramedCarrier a = scene_carrier(cfg, 2, 3, 4, S(f, 20), "la");
    FramedCarrier b = scene_carrier(cfg, 3, 3, 4, S(f, 31), "lb");
    // product landing on 1: 20 * 96 = 1920 = 1 mod 101
    FramedCarrier c = scene_carrier(cfg, 5, 3, 4, S(f, 96), "lc");
    FramedCarrier z{b.line, b.labels, b.fpoints, b.fpoints[0], S(f, 0)};
    FramedCarrier out = generic_multiplication(cfg, a, b, ch);
    CHECK(out.value == S(f, (20 * 31) % 101));
    CHECK(carrier_coordinate(cfg, out) == out.value);
    try {
      generic_multiplication(cfg, a, c, ch);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == Err::CaseViolation);
    }
    try {
      generic_multiplication(cfg, a, z, ch);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == Err::CaseViolation);
    }
  }
}

TEST_CASE("equality admits a realization iff the values agree") {
  auto f = make_field(101, 1);
  Sampler rng(13);
  RandomChoice ch(rng);
  {
    Configuration cfg = init_anchors(f);
    FramedCarrier a = scene_carrier(cfg, 2, 3, 4, S(f, 40), "la");
    FramedCarrier b = scene_carrier(cfg, 3, 5, 6, S(f, 40), "lb");
    equality(cfg, a, b, ch);  // succeeds
    CHECK(cfg.traces().back().kind == "equality");
    CHECK(cfg.traces().back().draws.size() == 3);
  }
  {
    Configuration cfg = init_anchors(f);
    FramedCarrier a = scene_carrier(cfg, 2, 3, 4, S(f, 40), "la");
    FramedCarrier b = scene_carrier(cfg, 3, 5, 6, S(f, 41), "lb");
    try {
      equality(cfg, a, b, ch);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == Err::IntendedIncidenceFails);
    }
  }
}

TEST_CASE("exhaustive enumeration: every admissible free choice gives the same value") {
  auto f = make_field(5, 1);
  const long P = 5;
  int n_ok = 0, n_other = 0;
  for (long ly = 0; ly < P; ++ly) {
    for (long xy = 0; xy < P; ++xy) {
      for (long xx = 0; xx < P; ++xx) {
        Configuration cfg = bare_scene(f);
        FramedCarrier src = scene_carrier(cfg, 2, 3, 4, S(f, 3), "l");
        FixedChoice ch({S(f, ly), S(f, xy), S(f, xx)});
        try {
          FramedCarrier out = parallel_shift(cfg, src, ch);
          CHECK(out.value == S(f, 3));
          CHECK(carrier_coordinate(cfg, out) == S(f, 3));
          ++n_ok;
        } catch (const Error&) {
          ++n_other;
        }
      }
    }
  }
  CHECK(n_ok > 0);
  CHECK(n_ok + n_other == P * P * P);
}
