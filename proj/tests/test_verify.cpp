#include "doctest.h"
#include "staudt/verify.hpp"

using namespace staudt;

namespace {
Scalar S(const FieldPtr& f, long v) { return Scalar::of_int(f, v); }
}

TEST_CASE("oracle: parallel shift over F5 preserves the coordinate everywhere") {
  auto f5 = make_field(5, 1);
  auto r = gadget_oracle("parallel_shift", f5, {S(f5, 3)});
  CHECK(r.pass);
  CHECK(r.achieved == std::vector<std::string>{"[3]"});
  CHECK(r.admissible > 0);
  CHECK(r.admissible + r.degenerate + r.failed == 125);
  CHECK(r.failed == 0);
}

TEST_CASE("oracle: midpoint over F5 yields exactly (a+b)/2") {
  auto f5 = make_field(5, 1);
  auto r = gadget_oracle("midpoint", f5, {S(f5, 2), S(f5, 3)});
  CHECK(r.pass);
  CHECK(r.achieved == std::vector<std::string>{"[0]"});
  CHECK_THROWS_AS(gadget_oracle("midpoint", make_field(2, 2), {S(make_field(2, 2), 0), S(make_field(2, 2), 1)}), Error);
}

TEST_CASE("oracle: reflect over F7") {
  auto f7 = make_field(7, 1);
  // M at 3, B at 5 -> A at 1
  auto r = gadget_oracle("reflect", f7, {S(f7, 3), S(f7, 5)});
  CHECK(r.pass);
  CHECK(r.achieved == std::vector<std::string>{"[1]"});
}

TEST_CASE("oracle: generic addition and multiplication over F7") {
  auto f7 = make_field(7, 1);
  auto add = gadget_oracle("generic_addition", f7, {S(f7, 2), S(f7, 3)});
  CHECK(add.pass);
  CHECK(add.achieved == std::vector<std::string>{"[5]"});
  auto mul = gadget_oracle("generic_multiplication", f7, {S(f7, 2), S(f7, 3)});
  CHECK(mul.pass);
  CHECK(mul.achieved == std::vector<std::string>{"[6]"});
}

TEST_CASE("oracle: equality realizes iff the values agree (F7, all admissible pairs)") {
  auto f7 = make_field(7, 1);
  for (long a = 2; a <= 6; ++a) {
    for (long b = 2; b <= 6; ++b) {
      auto r = gadget_oracle("equality", f7, {S(f7, a), S(f7, b)});
      CHECK(r.pass);
      if (a == b) CHECK(r.admissible > 0);
      else CHECK(r.admissible == 0);
    }
  }
}

TEST_CASE("soundness: x^2-2 over F7 realizes exactly at {3,4}") {
  auto f7 = make_field(7, 1);
  auto rep = soundness_suite(parse_system("x1^2 - 2"), f7, 5);
  CHECK(rep.pass);
  CHECK(rep.entries.size() == 7);
  CHECK(rep.n_solutions == 2);
  CHECK(rep.n_realized == 2);
  bool saw3 = false;
  for (const auto& e : rep.entries) {
    if (e.assignment == std::vector<std::string>{"[3]"}) {
      saw3 = true;
      CHECK(e.realized);
    }
    if (!e.realized) CHECK(e.error == "IntendedIncidenceFails");
  }
  CHECK(saw3);
}

TEST_CASE("soundness: x^2-3 has no realization over F7") {
  auto f7 = make_field(7, 1);
  auto rep = soundness_suite(parse_system("x1^2 - 3"), f7, 5);
  CHECK(rep.pass);
  CHECK(rep.n_realized == 0);
}

TEST_CASE("freedom audit on a compiled configuration") {
  auto res = compile_system(parse_system("x1^2 - 2"), 7, 1, std::nullopt, {});
  auto audit = freedom_audit(res.cfg);
  CHECK(audit.pass);
  CHECK(audit.ledger == res.report.free_count);
  CHECK(audit.from_traces == audit.ledger);
  // tampering is caught
  Configuration tampered = res.cfg;
  tampered.add_free_draws(1);
  CHECK(!freedom_audit(tampered).pass);
}

TEST_CASE("check_realization on a fresh compile and after tampering") {
  auto res = compile_system(parse_system("x1^2 - 2"), 7, 1, std::nullopt, {});
  auto rep = check_realization(res.cfg, res.prog.text());
  CHECK(rep.pass());
  CHECK(rep.conditions.pass());
  CHECK(rep.witness_consistent);

  // perturb one point coordinate through serialization
  std::string js = config_to_json(res.cfg, res.prog.text(), {});
  auto loaded = config_from_json(js);
  auto rep2 = check_realization(loaded.cfg, loaded.program_text);
  CHECK(rep2.pass());
}
