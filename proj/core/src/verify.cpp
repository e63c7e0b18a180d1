#include "staudt/verify.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>

namespace staudt {

std::string OracleResult::str() const {
  std::ostringstream os;
  os << kind << " over " << field << " on (";
  for (std::size_t i = 0; i < inputs.size(); ++i) os << (i ? "," : "") << inputs[i];
  os << "): achieved {";
  for (std::size_t i = 0; i < achieved.size(); ++i) os << (i ? "," : "") << achieved[i];
  os << "} expected " << expected << "; " << admissible << " admissible, " << degenerate
     << " degenerate, " << failed << " failed -> " << (pass ? "pass" : "FAIL");
  if (!detail.empty()) os << " (" << detail << ")";
  return os.str();
}

namespace {

// The oracle is an independent reading of the figures: determined elements
// are computed directly with join/meet, never through the gadget builders,
// and the output coordinate is re-read from the realized chart. Free choices
// (the boxed elements) are the horizontal line l' and the center X.
struct FigureScene {
  FieldPtr f;
  Scalar ha, hb;                 // input line heights
  std::array<Scalar, 2> apos;    // framing x-positions on l_a (labels 0, 1)
  std::array<Scalar, 2> bpos;
};

struct P1Chart {
  Scalar u0, u1;  // x-positions of the 0- and 1-labeled points
  std::optional<Scalar> read(const PPoint& P) const {
    if (P.c[2].is_zero()) return std::nullopt;
    Scalar u = x_position(P);
    return (u - u0) / (u1 - u0);
  }
};

// projection of the point at x-position u on y = h from X onto y = hp
std::optional<PPoint> project(const Scalar& u, const Scalar& h, const PPoint& X,
                              const Scalar& hp) {
  PPoint P = affine_point(u, h);
  if (P == X) return std::nullopt;
  PPoint img = meet(join(X, P), horizontal_line(hp));
  if (img.c[2].is_zero()) return std::nullopt;  // only if the ray is horizontal
  return img;
}

}  // namespace

OracleResult gadget_oracle(const std::string& kind, const FieldPtr& spec,
                           const std::vector<Scalar>& inputs, std::uint64_t budget) {
  if (!is_gadget_kind(kind)) fail(Err::UsageError, "unknown gadget kind " + kind);
  const std::uint64_t q = spec->order_clamped();
  if (q > 64 || q * q * q > budget)
    fail(Err::BudgetExceeded, "oracle enumeration over " + spec->name() + " exceeds the budget");
  OracleResult out;
  out.kind = kind;
  out.field = spec->name();
  for (const auto& x : inputs) out.inputs.push_back(x.str());

  std::vector<Scalar> elems;
  enumerate_field(spec, budget, [&](const Scalar& s) {
    elems.push_back(s);
    return true;
  });
  const Scalar zero = Scalar::zero(spec), one = Scalar::one(spec);
  const Scalar ha = zero, hb = one;  // scene: l_a is y=0, l_b is y=1

  std::optional<Scalar> expected;
  bool expect_realizes = true;  // equality only
  if (kind == "parallel_shift") {
    expected = inputs.at(0);
  } else if (kind == "midpoint") {
    if (spec->characteristic == 2) fail(Err::CharTwo, "midpoint oracle in characteristic 2");
    expected = (inputs.at(0) + inputs.at(1)) / Scalar::of_int(spec, 2);
  } else if (kind == "reflect") {
    if (spec->characteristic == 2) fail(Err::CharTwo, "reflect oracle in characteristic 2");
    expected = Scalar::of_int(spec, 2) * inputs.at(0) - inputs.at(1);
  } else if (kind == "generic_addition") {
    expected = inputs.at(0) + inputs.at(1);
  } else if (kind == "generic_multiplication") {
    expected = inputs.at(0) * inputs.at(1);
  } else {  // equality
    expected = inputs.at(1);
    expect_realizes = inputs.at(0) == inputs.at(1);
  }
  out.expected = expected->str();

  std::set<std::string> achieved;
  for (const Scalar& ly : elems) {
    // l' must be a fresh horizontal line
    bool uses_b = kind == "generic_addition" || kind == "generic_multiplication" ||
                  kind == "equality";
    if (ly == ha || (uses_b && ly == hb)) {
      out.degenerate += q * q;
      continue;
    }
    for (const Scalar& xy : elems) {
      // the center must avoid every line of the figure's pencil
      if (xy == ha || xy == ly || (uses_b && xy == hb)) {
        out.degenerate += q;
        continue;
      }
      for (const Scalar& xx : elems) {
        PPoint X = affine_point(xx, xy);
        try {
          if (kind == "parallel_shift") {
            const Scalar& v = inputs[0];
            auto i0 = project(zero, ha, X, ly);
            auto iv = project(v, ha, X, ly);
            auto i1 = project(one, ha, X, ly);
            if (!i0 || !iv || !i1) { ++out.degenerate; continue; }
            P1Chart chart{x_position(*i0), x_position(*i1)};
            auto got = chart.read(*iv);
            if (!got) { ++out.degenerate; continue; }
            ++out.admissible;
            achieved.insert(got->str());
          } else if (kind == "midpoint") {
            const Scalar &a = inputs[0], &b = inputs[1];
            if (a == b) fail(Err::CoincidentInputs, "midpoint of one point");
            PPoint A = affine_point(a, ha), B = affine_point(b, ha);
            auto Ap = project(a, ha, X, ly);
            auto Bp = project(b, ha, X, ly);
            if (!Ap || !Bp) { ++out.degenerate; continue; }
            PLine qa = join(A, *Bp), qb = join(*Ap, B);
            if (qa == qb) { ++out.degenerate; continue; }
            PPoint Y = meet(qa, qb);
            if (Y == X) { ++out.degenerate; continue; }
            PPoint M = meet(join(X, Y), horizontal_line(ha));
            if (M.c[2].is_zero()) { ++out.degenerate; continue; }
            ++out.admissible;
            achieved.insert(x_position(M).str());
          } else if (kind == "reflect") {
            // figure closure: with A placed at 2m-b, the line XY must pass
            // through M for every admissible choice
            const Scalar &m = inputs[0], &b = inputs[1];
            Scalar a = Scalar::of_int(spec, 2) * m - b;
            if (m == b) fail(Err::CoincidentInputs, "reflect of one point");
            PPoint A = affine_point(a, ha), B = affine_point(b, ha), M = affine_point(m, ha);
            auto Ap = project(a, ha, X, ly);
            auto Bp = project(b, ha, X, ly);
            if (!Ap || !Bp) { ++out.degenerate; continue; }
            PLine qa = join(A, *Bp), qb = join(*Ap, B);
            if (qa == qb) { ++out.degenerate; continue; }
            PPoint Y = meet(qa, qb);
            if (Y == X) { ++out.degenerate; continue; }
            if (!incident(M, join(X, Y))) {
              ++out.failed;  // the quadrangle failed to close
              continue;
            }
            ++out.admissible;
            achieved.insert(a.str());
          } else if (kind == "generic_addition") {
            const Scalar &va = inputs[0], &vb = inputs[1];
            auto P0 = project(zero, ha, X, ly);
            auto V = project(va, ha, X, ly);
            auto P1 = project(one, ha, X, ly);
            if (!P0 || !V || !P1) { ++out.degenerate; continue; }
            PPoint Pb0 = affine_point(zero, hb), Pb1 = affine_point(one, hb);
            PPoint Vb = affine_point(vb, hb);
            PLine q0 = join(*P0, Pb0), q1 = join(*P1, Pb1);
            if (is_horizontal(q0) || is_horizontal(q1) || q0 == q1) { ++out.degenerate; continue; }
            PPoint Y2 = meet(q0, q1);
            PLine ldd = join(Y2, anchor_p3(spec));  // the transfer line is horizontal
            PLine q2 = join(*V, Pb0);
            if (q2 == ldd) { ++out.degenerate; continue; }
            PPoint Y1 = meet(q2, ldd);
            if (Y1 == Vb) { ++out.degenerate; continue; }
            PLine q3 = join(Y1, Vb);
            PLine lp = horizontal_line(ly);
            if (q3 == lp) { ++out.degenerate; continue; }
            PPoint Vp = meet(q3, lp);
            P1Chart chart{x_position(*P0), x_position(*P1)};
            auto got = chart.read(Vp);
            if (!got) { ++out.degenerate; continue; }
            ++out.admissible;
            achieved.insert(got->str());
          } else if (kind == "generic_multiplication") {
            const Scalar &va = inputs[0], &vb = inputs[1];
            auto P0 = project(zero, ha, X, ly);
            auto V = project(va, ha, X, ly);
            auto P1 = project(one, ha, X, ly);
            if (!P0 || !V || !P1) { ++out.degenerate; continue; }
            PPoint Pb0 = affine_point(zero, hb), Pb1 = affine_point(one, hb);
            PPoint Vb = affine_point(vb, hb);
            PLine m0 = join(*P0, Pb0), m1 = join(*V, Pb1);
            if (m0 == m1) { ++out.degenerate; continue; }
            PPoint Y = meet(m0, m1);
            if (Y == Vb) { ++out.degenerate; continue; }
            PLine m2 = join(Y, Vb);
            PLine lp = horizontal_line(ly);
            if (m2 == lp) { ++out.degenerate; continue; }
            PPoint Vp = meet(m2, lp);
            P1Chart chart{x_position(*P0), x_position(*P1)};
            auto got = chart.read(Vp);
            if (!got) { ++out.degenerate; continue; }
            ++out.admissible;
            achieved.insert(got->str());
          } else {  // equality
            const Scalar &va = inputs[0], &vb = inputs[1];
            auto P1p = project(zero, ha, X, ly);
            auto Vp = project(va, ha, X, ly);
            auto P2p = project(one, ha, X, ly);
            if (!P1p || !Vp || !P2p) { ++out.degenerate; continue; }
            PPoint Pb0 = affine_point(zero, hb), Pb1 = affine_point(one, hb);
            PPoint Vb = affine_point(vb, hb);
            PLine e0 = join(*P1p, Pb0), e1 = join(*P2p, Pb1);
            if (e0 == e1) { ++out.degenerate; continue; }
            PPoint Xp = meet(e0, e1);
            if (Xp == Vb || Xp == *Vp) { ++out.degenerate; continue; }
            PLine e2 = join(Xp, Vb);
            if (incident(*Vp, e2)) {
              ++out.admissible;
              achieved.insert(va.str());
            } else {
              ++out.failed;
            }
          }
        } catch (const Error&) {
          ++out.degenerate;
        }
      }
    }
  }
  out.achieved.assign(achieved.begin(), achieved.end());
  if (kind == "equality") {
    out.pass = expect_realizes ? (out.failed == 0 && out.admissible > 0)
                               : (out.admissible == 0 && out.failed > 0);
    if (!expect_realizes) out.detail = "realization must fail everywhere";
  } else {
    out.pass = out.admissible > 0 && out.failed == 0 && achieved.size() == 1 &&
               *achieved.begin() == out.expected;
  }
  return out;
}

std::string SoundnessReport::str() const {
  std::ostringstream os;
  os << "soundness over " << field << ": " << entries.size() << " assignments, " << n_solutions
     << " solutions, " << n_realized << " realized -> " << (pass ? "pass" : "FAIL") << "\n";
  for (const auto& e : entries) {
    if (e.solves == e.realized) continue;
    os << "  (";
    for (std::size_t i = 0; i < e.assignment.size(); ++i) os << (i ? "," : "") << e.assignment[i];
    os << "): solves=" << e.solves << " realized=" << e.realized << " " << e.error << "\n";
  }
  return os.str();
}

SoundnessReport soundness_suite(const std::vector<Poly>& polys, const FieldPtr& spec,
                                std::uint64_t seed, std::uint64_t budget, int threads) {
  std::uint32_t n = 0;
  for (const auto& p : polys) n = std::max(n, p.nvars);
  long double total = 1;
  for (std::uint32_t i = 0; i < n; ++i) total *= static_cast<long double>(spec->order_clamped());
  if (total > static_cast<long double>(budget))
    fail(Err::BudgetExceeded, "soundness enumeration exceeds the budget");

  std::vector<Scalar> elems;
  enumerate_field(spec, budget, [&](const Scalar& s) {
    elems.push_back(s);
    return true;
  });
  // all assignments in lexicographic order
  std::vector<std::vector<Scalar>> all;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    std::vector<Scalar> xs(n, Scalar::zero(spec));
    for (std::uint32_t i = 0; i < n; ++i) xs[i] = elems[idx[i]];
    all.push_back(xs);
    int i = static_cast<int>(n) - 1;
    while (i >= 0 && idx[i] + 1 == elems.size()) idx[i--] = 0;
    if (i < 0) break;
    ++idx[i];
  }

  SoundnessReport rep;
  rep.field = spec->name();
  rep.entries.resize(all.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    std::size_t i;
    while ((i = next.fetch_add(1)) < all.size()) {
      const auto& xs = all[i];
      SoundnessEntry e;
      for (const auto& x : xs) e.assignment.push_back(x.str());
      e.solves = true;
      for (const auto& p : polys)
        if (!p.eval(xs, spec).is_zero()) e.solves = false;
      CompileOptions opt;
      opt.seed = seed;
      opt.check_witness = false;
      opt.run_bystanders = false;
      opt.run_conditions = false;
      opt.threads = 1;
      try {
        compile_system(polys, spec->characteristic, spec->degree, xs, opt);
        e.realized = true;
      } catch (const Error& err) {
        e.realized = false;
        e.error = err_name(err.kind());
      }
      rep.entries[i] = std::move(e);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, threads); ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  for (const auto& e : rep.entries) {
    rep.n_solutions += e.solves;
    rep.n_realized += e.realized;
    if (e.solves != e.realized) rep.pass = false;
  }
  return rep;
}

std::string AuditReport::str() const {
  std::ostringstream os;
  os << "free draws: ledger " << ledger << ", traces " << from_traces;
  for (const auto& [k, v] : per_kind) os << ", " << k << " x " << v;
  os << " -> " << (pass ? "pass" : "FAIL");
  return os.str();
}

AuditReport freedom_audit(const Configuration& cfg) {
  AuditReport rep;
  rep.ledger = cfg.free_count();
  for (const auto& t : cfg.traces()) {
    rep.per_kind[t.kind]++;
    if (is_gadget_kind(t.kind)) {
      if (static_cast<int>(t.draws.size()) != gadget_free_count(t.kind))
        rep.gadget_counts_ok = false;
      rep.from_traces += gadget_free_count(t.kind);
    } else {
      rep.from_traces += t.draws.size();
    }
  }
  rep.pass = rep.gadget_counts_ok && rep.from_traces == rep.ledger;
  return rep;
}

std::string RealizationReport::str() const {
  std::ostringstream os;
  os << "realization: conditions " << (conditions.pass() ? "pass" : "FAIL") << ", witness "
     << (witness_consistent ? "consistent" : "INCONSISTENT") << "\n";
  if (!conditions.pass()) os << conditions.str();
  for (const auto& n : notes) os << "  " << n << "\n";
  return os.str();
}

RealizationReport check_realization(const Configuration& cfg, const std::string& program_text,
                                    int threads) {
  RealizationReport rep;
  rep.conditions = cfg.check_conditions(threads);
  if (program_text.empty()) {
    rep.notes.push_back("no embedded program; witness re-evaluation skipped");
    return rep;
  }
  SLProgram prog = program_from_text(program_text);
  // extract each variable's chart coordinate from its variable-bearing line
  std::vector<std::optional<Scalar>> q(prog.nvars + 1);
  for (const auto& ml : cfg.lines()) {
    if (ml.role != LineRole::VariableBearing || !ml.framing) continue;
    if (ml.label.size() < 2 || ml.label[0] != 'x') continue;
    std::uint32_t i = 0;
    try {
      i = static_cast<std::uint32_t>(std::stoul(ml.label.substr(1)));
    } catch (...) {
      continue;
    }
    if (i == 0 || i > prog.nvars) continue;
    const LineFraming& fr = *ml.framing;
    Framing f = make_framing(ml.ln, fr.labels[0], cfg.point(fr.point_ids[0]).pt, fr.labels[1],
                             cfg.point(fr.point_ids[1]).pt);
    P1Value v = framed_coordinate(f, cfg.point(fr.variable_point_id).pt);
    if (v.infinite) {
      rep.witness_consistent = false;
      rep.notes.push_back("variable point of " + ml.label + " at p3");
      continue;
    }
    q[i] = v.v;
  }
  std::vector<Scalar> inputs;
  for (std::uint32_t i = 1; i <= prog.ninputs; ++i) {
    if (!q[i]) {
      rep.witness_consistent = false;
      rep.notes.push_back("missing variable line x" + std::to_string(i));
      return rep;
    }
    inputs.push_back(*q[i]);
  }
  EvalResult ev = eval_program(prog, inputs);
  if (!ev.solves) {
    rep.witness_consistent = false;
    rep.notes.push_back("extracted coordinates do not solve the program");
  }
  for (std::uint32_t i = 1; i <= prog.nvars; ++i) {
    if (!q[i]) {
      rep.witness_consistent = false;
      rep.notes.push_back("missing variable line x" + std::to_string(i));
      continue;
    }
    if (ev.assign[i] != *q[i]) {
      rep.witness_consistent = false;
      rep.notes.push_back("x" + std::to_string(i) +
                          " chart coordinate differs from the program value");
    }
  }
  return rep;
}

}  // namespace staudt
