#pragma once

#include <array>

#include "staudt/fields.hpp"

namespace staudt {

/// Point of P^2 in homogeneous coordinates, normalized so the first nonzero
/// coordinate is 1. Equality of points is equality of normalized triples.
struct PPoint {
  std::array<Scalar, 3> c;
  bool at_infinity() const { return c[2].is_zero(); }
  std::string str() const;
};

/// Line a x + b y + c z = 0, normalized like a point. A line is horizontal
/// (contains p3 = [1,0,0]) iff a == 0.
struct PLine {
  std::array<Scalar, 3> c;
  std::string str() const;
};

bool operator==(const PPoint& a, const PPoint& b);
bool operator!=(const PPoint& a, const PPoint& b);
bool operator==(const PLine& a, const PLine& b);
bool operator!=(const PLine& a, const PLine& b);
int cmp(const PPoint& a, const PPoint& b);  // deterministic total order
int cmp(const PLine& a, const PLine& b);

PPoint make_point(const Scalar& x, const Scalar& y, const Scalar& z);
PPoint affine_point(const Scalar& x, const Scalar& y);
PLine make_line(const Scalar& a, const Scalar& b, const Scalar& c);
/// y = y0, as a line; contains p3.
PLine horizontal_line(const Scalar& y0);
PLine line_at_infinity(const FieldPtr& f);

PPoint anchor_p1(const FieldPtr& f);  // [0,0,1]
PPoint anchor_p2(const FieldPtr& f);  // [0,1,0]
PPoint anchor_p3(const FieldPtr& f);  // [1,0,0]
PPoint anchor_p4(const FieldPtr& f);  // [1,1,1]

PLine join(const PPoint& P, const PPoint& Q);   // Err::CoincidentPoints
PPoint meet(const PLine& l, const PLine& m);    // Err::CoincidentLines
bool incident(const PPoint& P, const PLine& l);

bool is_horizontal(const PLine& l);
/// -c/b for a horizontal affine line (b != 0).
Scalar y_intercept(const PLine& l);
/// x/z of a point with z != 0.
Scalar x_position(const PPoint& P);

/// Value on P^1: a Scalar or the point at infinity.
struct P1Value {
  bool infinite = false;
  Scalar v;
  static P1Value inf(const FieldPtr& f) { return {true, Scalar::zero(f)}; }
  static P1Value of(const Scalar& s) { return {false, s}; }
};
bool operator==(const P1Value& a, const P1Value& b);

/// Cross-ratio ((z1-z3)(z2-z4)) / ((z1-z4)(z2-z3)) with infinity handled by
/// cancellation; at least three of the four values must be distinct.
P1Value cross_ratio(const P1Value& z1, const P1Value& z2, const P1Value& z3, const P1Value& z4);

/// Affine chart on a horizontal line: p3 -> infinity and two labeled points
/// to their labels. Fixes the isomorphism line -> P^1.
struct Framing {
  PLine line;                     // horizontal, not the line at infinity
  std::array<Scalar, 2> label;    // distinct labels
  std::array<PPoint, 2> point;    // distinct points on line, neither p3
};
Framing make_framing(const PLine& l, const Scalar& s1, const PPoint& P1, const Scalar& s2,
                     const PPoint& P2);

/// Chart coordinate of V on the framed line; infinity iff V == p3.
P1Value framed_coordinate(const Framing& f, const PPoint& V);
/// Inverse chart: the point with the given finite coordinate.
PPoint point_at_coordinate(const Framing& f, const Scalar& value);

}  // namespace staudt
