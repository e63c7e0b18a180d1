#include "doctest.h"
#include "staudt/slp.hpp"

using namespace staudt;

TEST_CASE("parse_system") {
  auto sys = parse_system("x1*x2 + x3^2 - 2\n");
  REQUIRE(sys.size() == 1);
  CHECK(sys[0].nvars == 3);
  CHECK(sys[0].terms.size() == 3);
  CHECK(sys[0].str() == "x1*x2 + x3^2 - 2");
  // parse-print-parse fixed point
  CHECK(parse_poly(sys[0].str()) == sys[0]);

  CHECK(parse_poly("x1 - x1").is_zero());
  CHECK_THROWS_AS(parse_poly("x0 + 1"), Error);
  CHECK_THROWS_AS(parse_poly("x1 + + * 2"), Error);
  CHECK_THROWS_AS(parse_poly("x1 )"), Error);

  auto multi = parse_system("# a comment\nx1 + x2\n\nx1*x1 - 1  # inline\n");
  REQUIRE(multi.size() == 2);
  CHECK(multi[0].nvars == 2);
  CHECK(multi[1].str() == "x1^2 - 1");
  CHECK(parse_poly("(x1 + 1)^2").str() == "x1^2 + 2*x1 + 1");
  CHECK(parse_poly("-3*x2").str() == "-3*x2");
}

TEST_CASE("decompose forced shapes") {
  // x1^2 -> copy, product, zero
  auto p = decompose({parse_poly("x1^2")}, 1);
  REQUIRE(p.eqs.size() == 3);
  CHECK(p.eqs[0].kind == AtomKind::Copy);
  CHECK(p.eqs[0].a == 2);
  CHECK(p.eqs[0].b == 1);
  CHECK(p.eqs[1].kind == AtomKind::Prod);
  CHECK(p.eqs[1].a == 1);
  CHECK(p.eqs[1].b == 2);
  CHECK(p.eqs[1].c == 3);
  CHECK(p.eqs[2].kind == AtomKind::Zero);
  CHECK(p.eqs[2].a == 3);

  // x1 + x1: doubling through a fresh copy
  auto q = decompose({parse_poly("x1 + x1")}, 1);
  REQUIRE(q.eqs.size() == 3);
  CHECK(q.eqs[0].kind == AtomKind::Copy);
  CHECK(q.eqs[1].kind == AtomKind::Sum);
  CHECK(q.eqs[1].a == 1);
  CHECK(q.eqs[1].b == 2);
  CHECK(q.eqs[2].kind == AtomKind::Zero);

  // structural guarantees on a larger program
  auto sys = parse_system("x1*x2 + x3^2 - 2");
  auto prog = decompose(sys, 3);
  prog.validate();
  for (const auto& e : prog.eqs)
    if (e.kind == AtomKind::Sum || e.kind == AtomKind::Prod) CHECK(e.a != e.b);
  CHECK(equivalence_check(sys, prog));
}

TEST_CASE("eval_program") {
  auto sys = parse_system("x1^2 - 2");
  auto prog = decompose(sys, 1);
  auto f7 = make_field(7, 1);
  auto r3 = eval_program(prog, {Scalar::of_int(f7, 3)});
  CHECK(r3.solves);  // 3^2 = 2 mod 7
  auto r1 = eval_program(prog, {Scalar::of_int(f7, 1)});
  CHECK(!r1.solves);
  CHECK(r1.residuals.size() == 1);
  CHECK(r1.residuals[0] == Scalar::of_int(f7, -1));

  SLProgram empty;
  empty.ninputs = 0;
  empty.nvars = 0;
  CHECK(eval_program(empty, {}).solves);  // vacuous
}

TEST_CASE("the displayed example program is equivalent to its system") {
  // (x4 - x1 x2, x5 - x3, x6 - x3 x5, x7 - x4 - x6, x8 - 1, x9 - 1,
  //  x10 - x8 - x9, x7 - x10) vs x1 x2 + x3^2 - 2
  SLProgram prog;
  prog.ninputs = 3;
  prog.nvars = 10;
  prog.eqs = {
      {AtomKind::Prod, 1, 2, 4, ""},  // x4 = x1 x2
      {AtomKind::Copy, 5, 3, 0, ""},  // x5 = x3
      {AtomKind::Prod, 3, 5, 6, ""},  // x6 = x3 x5
      {AtomKind::Sum, 4, 6, 7, ""},   // x7 = x4 + x6
      {AtomKind::Copy, 8, 0, 0, ""},  // x8 = 1
      {AtomKind::Copy, 9, 0, 0, ""},  // x9 = 1
      {AtomKind::Sum, 8, 9, 10, ""},  // x10 = x8 + x9
      {AtomKind::Copy, 7, 10, 0, ""}, // x7 - x10 = 0 (constraint form)
  };
  prog.validate();
  auto sys = parse_system("x1*x2 + x3^2 - 2");
  CHECK(equivalence_check(sys, prog));

  // dropping the final constraint breaks equivalence
  SLProgram broken = prog;
  broken.eqs.pop_back();
  CHECK(!equivalence_check(sys, broken));

  // evaluation treats the trailing copy as a residual
  auto f7 = make_field(7, 1);
  auto r = eval_program(prog, {Scalar::of_int(f7, 1), Scalar::of_int(f7, 2), Scalar::of_int(f7, 0)});
  CHECK(r.solves);  // 1*2 + 0 - 2 = 0
}

TEST_CASE("find_witness") {
  auto f7 = make_field(7, 1);
  auto w = find_witness({parse_poly("x1^2 - 2")}, f7);
  REQUIRE(w.has_value());
  CHECK((*w)[0] == Scalar::of_int(f7, 3));  // solutions {3,4}, 3 first

  CHECK(!find_witness({parse_poly("x1^2 - 3")}, f7).has_value());

  auto f4 = make_field(2, 2);
  auto wj = find_witness({parse_poly("x1^2 + x1 + 1")}, f4);
  REQUIRE(wj.has_value());
  CHECK((*wj)[0] == Scalar::from_coeffs(f4, {0, 1}));  // j

  CHECK_THROWS_AS(find_witness({parse_poly("x1 - 2")}, make_field(0, 1)), Error);
  CHECK_THROWS_AS(find_witness({parse_poly("x1 + x2 + x3")}, make_field(7, 3), 100), Error);

  // returned witnesses are verified solutions
  auto f49 = make_field(7, 2);
  auto sys = parse_system("x1^2 - 3");
  auto w49 = find_witness(sys, f49);
  REQUIRE(w49.has_value());
  auto prog = decompose(sys, 1);
  CHECK(eval_program(prog, *w49).solves);
}

TEST_CASE("program solves iff source vanishes, randomized") {
  std::vector<FieldPtr> fields = {make_field(5, 1), make_field(7, 1), make_field(3, 2),
                                  make_field(0, 1)};
  Sampler s(17);
  auto sys = parse_system("x1*x2 + x3^2 - 2\nx1 - x2");
  auto prog = decompose(sys, 3);
  for (const auto& f : fields) {
    for (int i = 0; i < 250; ++i) {
      std::vector<Scalar> xs = {sample_general(f, {}, s), sample_general(f, {}, s),
                                sample_general(f, {}, s)};
      bool direct = true;
      for (const auto& p : sys)
        if (!p.eval(xs).is_zero()) direct = false;
      CHECK(eval_program(prog, xs).solves == direct);
    }
  }
}

TEST_CASE("decompose equivalence on random systems") {
  // 100 random systems, <= 3 variables, degree <= 3, coefficients in [-9, 9]
  std::mt19937_64 gen(20240915);
  for (int iter = 0; iter < 100; ++iter) {
    std::uint32_t n = 1 + gen() % 3;
    std::uint32_t npolys = 1 + gen() % 2;
    std::vector<Poly> sys;
    for (std::uint32_t pi = 0; pi < npolys; ++pi) {
      Poly p = Poly::zero(n);
      int nterms = 1 + gen() % 4;
      for (int t = 0; t < nterms; ++t) {
        std::vector<std::uint32_t> e(n, 0);
        std::uint32_t deg = gen() % 4;
        for (std::uint32_t d = 0; d < deg; ++d) e[gen() % n]++;
        long c = static_cast<long>(gen() % 19) - 9;
        if (c == 0) c = 1;
        p = p + Poly{n, {{e, mpz_class(c)}}};
      }
      sys.push_back(p);
    }
    auto prog = decompose(sys, n);
    prog.validate();
    CHECK(equivalence_check(sys, prog));
  }
}

TEST_CASE("program text form") {
  auto prog = decompose(parse_system("x1^2"), 1);
  CHECK(prog.text() == "x2 = x1\nx3 = x1 * x2\nzero x3\n");
}
