#include "staudt/proj.hpp"

#include <sstream>

namespace staudt {

namespace {

std::array<Scalar, 3> normalize3(std::array<Scalar, 3> c) {
  int first = -1;
  for (int i = 0; i < 3; ++i) {
    if (!c[i].is_zero()) {
      first = i;
      break;
    }
  }
  if (first < 0) fail(Err::DegenerateTuple, "zero homogeneous triple");
  Scalar s = c[first].inv();
  for (int i = 0; i < 3; ++i) c[i] = c[i] * s;
  return c;
}

std::array<Scalar, 3> cross(const std::array<Scalar, 3>& a, const std::array<Scalar, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

int cmp3(const std::array<Scalar, 3>& a, const std::array<Scalar, 3>& b) {
  for (int i = 0; i < 3; ++i) {
    int c = Scalar::cmp(a[i], b[i]);
    if (c) return c;
  }
  return 0;
}

std::string str3(const std::array<Scalar, 3>& a) {
  std::ostringstream os;
  os << "(" << a[0].str() << ":" << a[1].str() << ":" << a[2].str() << ")";
  return os.str();
}

}  // namespace

std::string PPoint::str() const { return str3(c); }
std::string PLine::str() const { return str3(c); }

bool operator==(const PPoint& a, const PPoint& b) { return cmp3(a.c, b.c) == 0; }
bool operator!=(const PPoint& a, const PPoint& b) { return !(a == b); }
bool operator==(const PLine& a, const PLine& b) { return cmp3(a.c, b.c) == 0; }
bool operator!=(const PLine& a, const PLine& b) { return !(a == b); }
int cmp(const PPoint& a, const PPoint& b) { return cmp3(a.c, b.c); }
int cmp(const PLine& a, const PLine& b) { return cmp3(a.c, b.c); }

PPoint make_point(const Scalar& x, const Scalar& y, const Scalar& z) {
  return PPoint{normalize3({x, y, z})};
}

PPoint affine_point(const Scalar& x, const Scalar& y) {
  return make_point(x, y, Scalar::one(x.spec()));
}

PLine make_line(const Scalar& a, const Scalar& b, const Scalar& c) {
  return PLine{normalize3({a, b, c})};
}

PLine horizontal_line(const Scalar& y0) {
  auto f = y0.spec();
  return make_line(Scalar::zero(f), Scalar::one(f), -y0);
}

PLine line_at_infinity(const FieldPtr& f) {
  return make_line(Scalar::zero(f), Scalar::zero(f), Scalar::one(f));
}

PPoint anchor_p1(const FieldPtr& f) {
  return make_point(Scalar::zero(f), Scalar::zero(f), Scalar::one(f));
}
PPoint anchor_p2(const FieldPtr& f) {
  return make_point(Scalar::zero(f), Scalar::one(f), Scalar::zero(f));
}
PPoint anchor_p3(const FieldPtr& f) {
  return make_point(Scalar::one(f), Scalar::zero(f), Scalar::zero(f));
}
PPoint anchor_p4(const FieldPtr& f) {
  return make_point(Scalar::one(f), Scalar::one(f), Scalar::one(f));
}

PLine join(const PPoint& P, const PPoint& Q) {
  if (P == Q) fail(Err::CoincidentPoints, "join of equal points " + P.str());
  return PLine{normalize3(cross(P.c, Q.c))};
}

PPoint meet(const PLine& l, const PLine& m) {
  if (l == m) fail(Err::CoincidentLines, "meet of equal lines " + l.str());
  return PPoint{normalize3(cross(l.c, m.c))};
}

bool incident(const PPoint& P, const PLine& l) {
  return (l.c[0] * P.c[0] + l.c[1] * P.c[1] + l.c[2] * P.c[2]).is_zero();
}

bool is_horizontal(const PLine& l) { return l.c[0].is_zero(); }

Scalar y_intercept(const PLine& l) {
  if (!is_horizontal(l) || l.c[1].is_zero())
    fail(Err::DegenerateTuple, "y_intercept of non-horizontal or infinite line");
  return -(l.c[2] / l.c[1]);
}

Scalar x_position(const PPoint& P) {
  if (P.c[2].is_zero()) fail(Err::DegenerateTuple, "x_position of a point at infinity");
  return P.c[0] / P.c[2];
}

bool operator==(const P1Value& a, const P1Value& b) {
  if (a.infinite || b.infinite) return a.infinite == b.infinite;
  return a.v == b.v;
}

P1Value cross_ratio(const P1Value& z1, const P1Value& z2, const P1Value& z3, const P1Value& z4) {
  const FieldPtr f = z1.v.spec();
  // homogeneous representation [u : w], infinity = [1 : 0]
  auto rep = [&](const P1Value& z) -> std::array<Scalar, 2> {
    if (z.infinite) return {Scalar::one(f), Scalar::zero(f)};
    return {z.v, Scalar::one(f)};
  };
  auto d = [&](const P1Value& a, const P1Value& b) {
    auto ra = rep(a), rb = rep(b);
    return ra[0] * rb[1] - rb[0] * ra[1];
  };
  int distinct = 0;
  const P1Value zs[4] = {z1, z2, z3, z4};
  for (int i = 0; i < 4; ++i) {
    bool dup = false;
    for (int j = 0; j < i; ++j)
      if (zs[i] == zs[j]) dup = true;
    if (!dup) ++distinct;
  }
  if (distinct < 3) fail(Err::DegenerateTuple, "cross-ratio needs three distinct values");
  Scalar num = d(z1, z3) * d(z2, z4);
  Scalar den = d(z1, z4) * d(z2, z3);
  if (den.is_zero()) return P1Value::inf(f);
  return P1Value::of(num / den);
}

Framing make_framing(const PLine& l, const Scalar& s1, const PPoint& P1, const Scalar& s2,
                     const PPoint& P2) {
  const FieldPtr f = s1.spec();
  if (!is_horizontal(l) || l.c[1].is_zero())
    fail(Err::DegenerateTuple, "framing line must be horizontal and affine");
  if (s1 == s2) fail(Err::DegenerateTuple, "framing labels must be distinct");
  if (P1 == P2) fail(Err::CoincidentPoints, "framing points must be distinct");
  if (P1 == anchor_p3(f) || P2 == anchor_p3(f))
    fail(Err::DegenerateTuple, "framing point equals p3");
  if (!incident(P1, l) || !incident(P2, l)) fail(Err::PointNotOnLine, "framing point off line");
  return Framing{l, {s1, s2}, {P1, P2}};
}

P1Value framed_coordinate(const Framing& f, const PPoint& V) {
  if (!incident(V, f.line)) fail(Err::PointNotOnLine, "framed_coordinate: " + V.str());
  const FieldPtr fp = f.label[0].spec();
  if (V == anchor_p3(fp)) return P1Value::inf(fp);
  Scalar u = x_position(V);
  Scalar u1 = x_position(f.point[0]), u2 = x_position(f.point[1]);
  // s1 + (s2 - s1)(u - u1)/(u2 - u1)
  return P1Value::of(f.label[0] + (f.label[1] - f.label[0]) * (u - u1) / (u2 - u1));
}

PPoint point_at_coordinate(const Framing& f, const Scalar& value) {
  Scalar u1 = x_position(f.point[0]), u2 = x_position(f.point[1]);
  Scalar u = u1 + (u2 - u1) * (value - f.label[0]) / (f.label[1] - f.label[0]);
  Scalar y0 = y_intercept(f.line);
  return affine_point(u, y0);
}

}  // namespace staudt
