#include "staudt/config.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>

#include "fp_kernels.hpp"

namespace staudt {

const char* role_name(PointRole r) {
  switch (r) {
    case PointRole::Anchor: return "anchor";
    case PointRole::Unit: return "unit";
    case PointRole::Framing: return "framing";
    case PointRole::Variable: return "variable";
    case PointRole::Auxiliary: return "auxiliary";
    case PointRole::Bystander: return "bystander";
  }
  return "?";
}
const char* role_name(LineRole r) {
  switch (r) {
    case LineRole::Anchor: return "anchor";
    case LineRole::VariableBearing: return "variable-bearing";
    case LineRole::Auxiliary: return "auxiliary";
  }
  return "?";
}
PointRole point_role_of(const std::string& s) {
  for (PointRole r : {PointRole::Anchor, PointRole::Unit, PointRole::Framing, PointRole::Variable,
                      PointRole::Auxiliary, PointRole::Bystander})
    if (s == role_name(r)) return r;
  fail(Err::SchemaError, "unknown point role " + s);
}
LineRole line_role_of(const std::string& s) {
  for (LineRole r : {LineRole::Anchor, LineRole::VariableBearing, LineRole::Auxiliary})
    if (s == role_name(r)) return r;
  fail(Err::SchemaError, "unknown line role " + s);
}

int gadget_free_count(const std::string& kind) {
  if (is_gadget_kind(kind)) return 3;
  return -1;
}
bool is_gadget_kind(const std::string& kind) {
  return kind == "parallel_shift" || kind == "midpoint" || kind == "reflect" ||
         kind == "generic_addition" || kind == "generic_multiplication" || kind == "equality";
}

std::string ConditionReport::str() const {
  if (violations.empty()) return "all conditions pass";
  std::ostringstream os;
  for (const auto& v : violations) os << "(" << v.condition << ") " << v.detail << "\n";
  return os.str();
}

Configuration::Configuration(FieldPtr field, std::uint64_t seed)
    : field_(std::move(field)), seed_(seed) {}

bool Configuration::required_on(int pid, int lid) const {
  const auto& ls = point_lines_.at(pid);
  return std::binary_search(ls.begin(), ls.end(), lid);
}

std::optional<int> Configuration::find_point(const PPoint& p) const {
  auto it = point_index_.find(PointKey{p});
  if (it == point_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Configuration::find_line(const PLine& l) const {
  auto it = line_index_.find(LineKey{l});
  if (it == line_index_.end()) return std::nullopt;
  return it->second;
}

void Configuration::check_new_point(const PPoint& p, const std::vector<int>& on_lines) const {
  if (find_point(p)) fail(Err::DuplicateElement, "point already marked: " + p.str());
  std::vector<int> sorted = on_lines;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& ml : lines_) {
    bool inc = incident(p, ml.ln);
    bool intended = std::binary_search(sorted.begin(), sorted.end(), ml.id);
    if (inc && !intended)
      fail(Err::UnintendedIncidence, "point " + p.str() + " lies on line '" + ml.label + "'");
    if (!inc && intended)
      fail(Err::IntendedIncidenceFails,
           "point " + p.str() + " fails to lie on line '" + ml.label + "'");
  }
}

void Configuration::check_new_line(const PLine& l, const std::vector<int>& through_points) const {
  if (find_line(l)) fail(Err::DuplicateElement, "line already marked: " + l.str());
  std::vector<int> sorted = through_points;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& mp : points_) {
    bool inc = incident(mp.pt, l);
    bool intended = std::binary_search(sorted.begin(), sorted.end(), mp.id);
    if (inc && !intended)
      fail(Err::UnintendedIncidence, "line " + l.str() + " passes through point '" + mp.label + "'");
    if (!inc && intended)
      fail(Err::IntendedIncidenceFails,
           "line " + l.str() + " misses intended point '" + mp.label + "'");
  }
}

int Configuration::add_point(const PPoint& p, PointRole role, const std::string& label,
                             const std::string& provenance, const std::vector<int>& on_lines) {
  if (role != PointRole::Bystander) {
    check_new_point(p, on_lines);
  } else if (find_point(p)) {
    fail(Err::DuplicateElement, "bystander collides with marked point: " + p.str());
  }
  int id = static_cast<int>(points_.size());
  points_.push_back(MarkedPoint{id, label, role, p, provenance});
  point_index_.emplace(PointKey{p}, id);
  std::vector<int> ls = on_lines;
  std::sort(ls.begin(), ls.end());
  point_lines_.push_back(ls);
  for (int lid : ls) {
    auto& ps = line_points_[lid];
    ps.insert(std::lower_bound(ps.begin(), ps.end(), id), id);
  }
  if (role == PointRole::Bystander) ++bystanders_;
  return id;
}

int Configuration::add_line(const PLine& l, LineRole role, const std::string& label,
                            const std::vector<int>& through_points) {
  check_new_line(l, through_points);
  int id = static_cast<int>(lines_.size());
  MarkedLine ml{id, label, role, l, std::nullopt, std::nullopt};
  if (is_horizontal(l) && !l.c[1].is_zero()) ml.intercept = y_intercept(l);
  lines_.push_back(std::move(ml));
  line_index_.emplace(LineKey{l}, id);
  std::vector<int> ps = through_points;
  std::sort(ps.begin(), ps.end());
  line_points_.push_back(ps);
  for (int pid : ps) {
    auto& ls = point_lines_[pid];
    ls.insert(std::lower_bound(ls.begin(), ls.end(), id), id);
  }
  return id;
}

void Configuration::require_incidence(int pid, int lid) {
  if (!incident(points_.at(pid).pt, lines_.at(lid).ln))
    fail(Err::IntendedIncidenceFails, "required incidence does not hold: point '" +
                                          points_[pid].label + "' on line '" + lines_[lid].label +
                                          "'");
  if (required_on(pid, lid)) return;
  auto& ls = point_lines_[pid];
  ls.insert(std::lower_bound(ls.begin(), ls.end(), lid), lid);
  auto& ps = line_points_[lid];
  ps.insert(std::lower_bound(ps.begin(), ps.end(), pid), pid);
}

int Configuration::add_point_observed(const PPoint& p, PointRole role, const std::string& label,
                                      const std::string& provenance) {
  std::vector<int> on;
  for (const auto& ml : lines_)
    if (incident(p, ml.ln)) on.push_back(ml.id);
  return add_point(p, role, label, provenance, on);
}

int Configuration::add_line_observed(const PLine& l, LineRole role, const std::string& label) {
  std::vector<int> through;
  for (const auto& mp : points_)
    if (incident(mp.pt, l)) through.push_back(mp.id);
  return add_line(l, role, label, through);
}

std::vector<Scalar> Configuration::horizontal_forbidden() const {
  std::vector<Scalar> out;
  for (const auto& ml : lines_)
    if (ml.intercept) out.push_back(*ml.intercept);
  for (const auto& mp : points_)
    if (!mp.pt.at_infinity()) out.push_back(mp.pt.c[1] / mp.pt.c[2]);
  return out;
}

Configuration::Checkpoint Configuration::checkpoint() const {
  return Checkpoint{points_.size(), lines_.size(), traces_.size(), free_count_};
}

void Configuration::rollback(const Checkpoint& c) {
  for (std::size_t i = c.npoints; i < points_.size(); ++i) {
    point_index_.erase(PointKey{points_[i].pt});
    if (points_[i].role == PointRole::Bystander) --bystanders_;
  }
  for (std::size_t i = c.nlines; i < lines_.size(); ++i) line_index_.erase(LineKey{lines_[i].ln});
  points_.resize(c.npoints);
  lines_.resize(c.nlines);
  point_lines_.resize(c.npoints);
  line_points_.resize(c.nlines);
  for (auto& ls : point_lines_)
    ls.erase(std::remove_if(ls.begin(), ls.end(),
                            [&](int lid) { return lid >= static_cast<int>(c.nlines); }),
             ls.end());
  for (auto& ps : line_points_)
    ps.erase(std::remove_if(ps.begin(), ps.end(),
                            [&](int pid) { return pid >= static_cast<int>(c.npoints); }),
             ps.end());
  traces_.resize(c.ntraces);
  free_count_ = c.free_count;
}

void Configuration::complete_bystanders() {
  const int L = static_cast<int>(lines_.size());
  // pre-bystander incidence lists decide which pairs already share a point
  std::vector<std::vector<int>> pre = line_points_;
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      const auto& a = pre[i];
      const auto& b = pre[j];
      bool shared = false;
      std::size_t ia = 0, ib = 0;
      while (ia < a.size() && ib < b.size()) {
        if (a[ia] == b[ib]) {
          shared = true;
          break;
        }
        if (a[ia] < b[ib]) ++ia;
        else ++ib;
      }
      if (shared) continue;
      PPoint m = meet(lines_[i].ln, lines_[j].ln);
      if (auto existing = find_point(m)) {
        // a third line through an existing marked point, or a marked point
        // this pair should have recorded: a failed general-position draw
        fail(Err::ConcurrencyViolation,
             "lines '" + lines_[i].label + "' and '" + lines_[j].label +
                 "' meet at marked point '" + points_[*existing].label + "'");
      }
      add_point(m, PointRole::Bystander, "b" + std::to_string(points_.size()), "bystanders",
                {i, j});
    }
  }
}

namespace {

struct PtOrder {
  bool operator()(const PPoint& a, const PPoint& b) const { return cmp(a, b) < 0; }
};
struct LnOrder {
  bool operator()(const PLine& a, const PLine& b) const { return cmp(a, b) < 0; }
};

}  // namespace

ConditionReport Configuration::check_conditions(int threads) const {
  ConditionReport rep;
  auto viol = [&](const std::string& c, const std::string& d) {
    rep.violations.push_back({c, d});
  };

  // (i) anchors at their required coordinates
  const FieldPtr& f = field_;
  const PPoint req[4] = {anchor_p1(f), anchor_p2(f), anchor_p3(f), anchor_p4(f)};
  for (int i = 0; i < 4; ++i) {
    if (points_.size() <= static_cast<std::size_t>(i) || points_[i].pt != req[i])
      viol("i", "anchor p" + std::to_string(i + 1) + " missing or misplaced");
  }

  // (iii) distinctness
  {
    std::set<PPoint, PtOrder> ps;
    for (const auto& mp : points_)
      if (!ps.insert(mp.pt).second) viol("iii", "duplicate point " + mp.pt.str());
    std::set<PLine, LnOrder> ls;
    for (const auto& ml : lines_)
      if (!ls.insert(ml.ln).second) viol("iii", "duplicate line " + ml.ln.str());
  }

  // (ii) realized incidences match the ledger exactly, both ways. The sweep
  // is exact; finite fields go through a flat allocation-free kernel.
  {
    const int P = static_cast<int>(points_.size());
    const int L = static_cast<int>(lines_.size());
    threads = std::max(1, threads);
    const std::uint64_t p = f->characteristic;
    const bool flat = p != 0;
    const bool bin = p == 2;
    // characteristic 0: clear denominators once; incidence is scale-invariant
    std::vector<mpz_class> ptz, lnz;
    if (!flat) {
      ptz.resize(3 * points_.size());
      lnz.resize(3 * lines_.size());
      auto clear3 = [&](std::vector<mpz_class>& dst, std::size_t slot,
                        const std::array<Scalar, 3>& c) {
        mpz_class l = 1;
        for (int i = 0; i < 3; ++i) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c[i].rat().get_den().get_mpz_t());
        for (int i = 0; i < 3; ++i)
          dst[slot * 3 + i] = c[i].rat().get_num() * (l / c[i].rat().get_den());
      };
      for (const auto& mp : points_) clear3(ptz, mp.id, mp.pt.c);
      for (const auto& ml : lines_) clear3(lnz, ml.id, ml.ln.c);
    }
    const std::size_t W = flat ? (bin ? 1 : f->degree) : 0;
    std::vector<std::uint64_t> ptw, lnw;
    std::uint64_t modbits = 0;
    if (flat) {
      ptw.assign(3 * W * points_.size(), 0);
      lnw.assign(3 * W * lines_.size(), 0);
      auto put = [&](std::vector<std::uint64_t>& dst, std::size_t slot, const Scalar& s) {
        const auto& r = s.raw();
        for (std::size_t i = 0; i < r.size() && i < W; ++i) dst[slot * W + i] = r[i];
      };
      for (const auto& mp : points_)
        for (int c = 0; c < 3; ++c) put(ptw, 3 * mp.id + c, mp.pt.c[c]);
      for (const auto& ml : lines_)
        for (int c = 0; c < 3; ++c) put(lnw, 3 * ml.id + c, ml.ln.c[c]);
      if (bin) {
        if (f->degree == 1) {
          modbits = 2;  // F_2 itself: reduce degree-1 products with t
        } else {
          for (std::uint32_t i = 0; i <= f->degree; ++i)
            if (f->modulus[i]) modbits |= 1ull << i;
        }
      }
    }
    const std::uint32_t k = f->degree;
    // dot(line, point) == 0, allocation-free; coefficients as word blocks
    auto flat_zero = [&](const std::uint64_t* l, const std::uint64_t* q) -> bool {
      if (bin) {
        std::uint64_t t = 0;
        for (int c = 0; c < 3; ++c) t ^= fpk::bit_mulmod(l[c], q[c], modbits);
        return t == 0;
      }
      std::uint64_t acc[96] = {0};
      for (int c = 0; c < 3; ++c) {
        const std::uint64_t* A = l + c * W;
        const std::uint64_t* B = q + c * W;
        for (std::uint32_t i = 0; i < k; ++i) {
          if (!A[i]) continue;
          const std::uint64_t ai = A[i];
          for (std::uint32_t d = 0; d < k; ++d) acc[i + d] += ai * B[d];
        }
      }
      if (k >= 2) {
        const auto& md = f->modulus;
        for (std::uint32_t d = 2 * k - 2; d >= k; --d) {
          std::uint64_t cc = acc[d] % p;
          if (cc) {
            for (std::uint32_t i = 0; i < k; ++i)
              if (md[i]) acc[d - k + i] += cc * (p - md[i]);
          }
          if (d == k) break;
        }
      }
      for (std::uint32_t i = 0; i < k; ++i)
        if (acc[i] % p) return false;
      return true;
    };
    std::vector<std::vector<std::string>> bad(threads);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto work = [&](int t) {
      int pid;
      mpz_class acc0;
      while ((pid = next.fetch_add(256)) < P) {
        int hi = std::min(P, pid + 256);
        for (int pp = pid; pp < hi; ++pp) {
          const auto& mp = points_[pp];
          const auto& ls = point_lines_[pp];
          std::size_t cursor = 0;
          for (int lid = 0; lid < L; ++lid) {
            bool intended = cursor < ls.size() && ls[cursor] == lid;
            if (intended) ++cursor;
            bool inc;
            if (flat) {
              inc = flat_zero(&lnw[3 * W * lid], &ptw[3 * W * pp]);
            } else {
              acc0 = lnz[3 * lid] * ptz[3 * pp];
              acc0 += lnz[3 * lid + 1] * ptz[3 * pp + 1];
              acc0 += lnz[3 * lid + 2] * ptz[3 * pp + 2];
              inc = acc0 == 0;
            }
            if (inc != intended) {
              bad[t].push_back("point '" + mp.label + "' vs line '" + lines_[lid].label +
                               "': realized " + (inc ? "on" : "off") + ", ledger " +
                               (intended ? "on" : "off"));
              if (bad[t].size() > 16) return;  // cap the report
            }
          }
        }
      }
    };
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
    for (const auto& list : bad)
      for (const auto& d : list) viol("ii", d);
  }

  // (iv) every pair of marked lines shares a marked point
  {
    const int L = static_cast<int>(lines_.size());
    for (int i = 0; i < L; ++i) {
      for (int j = i + 1; j < L; ++j) {
        const auto& a = line_points_[i];
        const auto& b = line_points_[j];
        bool shared = false;
        std::size_t ia = 0, ib = 0;
        while (ia < a.size() && ib < b.size()) {
          if (a[ia] == b[ib]) {
            shared = true;
            break;
          }
          if (a[ia] < b[ib]) ++ia;
          else ++ib;
        }
        if (!shared)
          viol("iv", "lines '" + lines_[i].label + "' and '" + lines_[j].label +
                          "' share no marked point");
      }
    }
  }

  // (v) each line carries at least three marked points
  for (const auto& ml : lines_)
    if (line_points_[ml.id].size() < 3)
      viol("v", "line '" + ml.label + "' has " + std::to_string(line_points_[ml.id].size()) +
                    " marked points");

  // extras: variable-bearing lines are horizontal, avoid p1/p2/p4, and their
  // y-intercepts are pairwise distinct and outside {0,1}
  {
    std::vector<Scalar> seen;
    Scalar zero = Scalar::zero(f), one = Scalar::one(f);
    for (const auto& ml : lines_) {
      if (ml.role != LineRole::VariableBearing) continue;
      if (!is_horizontal(ml.ln) || !ml.intercept) {
        viol("extra", "variable line '" + ml.label + "' is not an affine horizontal");
        continue;
      }
      for (const PPoint& banned : {anchor_p1(f), anchor_p2(f), anchor_p4(f)})
        if (incident(banned, ml.ln))
          viol("extra", "variable line '" + ml.label + "' passes through an anchor");
      const Scalar& y = *ml.intercept;
      if (y == zero || y == one)
        viol("extra", "variable line '" + ml.label + "' has y-intercept in {0,1}");
      for (const auto& other : seen)
        if (other == y) viol("extra", "variable line '" + ml.label + "' repeats a y-intercept");
      seen.push_back(y);
    }
  }

  // extras: bystanders lie on exactly two marked lines
  for (const auto& mp : points_) {
    if (mp.role != PointRole::Bystander) continue;
    if (point_lines_[mp.id].size() != 2)
      viol("extra", "bystander '" + mp.label + "' lies on " +
                        std::to_string(point_lines_[mp.id].size()) + " lines");
  }

  return rep;
}

AnchorIds anchor_ids() { return AnchorIds{0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 5}; }

Configuration init_anchors(const FieldPtr& field, AnchorIds* ids) {
  Configuration cfg(field);
  const PPoint p1 = anchor_p1(field), p2 = anchor_p2(field), p3 = anchor_p3(field),
               p4 = anchor_p4(field);
  int i1 = cfg.add_point(p1, PointRole::Anchor, "p1", "initial", {});
  int i2 = cfg.add_point(p2, PointRole::Anchor, "p2", "initial", {});
  int i3 = cfg.add_point(p3, PointRole::Anchor, "p3", "initial", {});
  int i4 = cfg.add_point(p4, PointRole::Anchor, "p4", "initial", {});
  int l12 = cfg.add_line(join(p1, p2), LineRole::Anchor, "p1p2", {i1, i2});
  int l13 = cfg.add_line(join(p1, p3), LineRole::Anchor, "p1p3", {i1, i3});
  int l14 = cfg.add_line(join(p1, p4), LineRole::Anchor, "p1p4", {i1, i4});
  int l23 = cfg.add_line(join(p2, p3), LineRole::Anchor, "p2p3", {i2, i3});
  int l24 = cfg.add_line(join(p2, p4), LineRole::Anchor, "p2p4", {i2, i4});
  int l34 = cfg.add_line(join(p3, p4), LineRole::Anchor, "p3p4", {i3, i4});
  // the unit point 1 = [1,0,1] on p2p4 and p1p3
  PPoint unit = meet(cfg.line(l24).ln, cfg.line(l13).ln);
  int iu = cfg.add_point(unit, PointRole::Unit, "1", "initial", {l13, l24});
  if (ids) *ids = AnchorIds{i1, i2, i3, i4, iu, l12, l13, l14, l23, l24, l34};
  return cfg;
}

}  // namespace staudt
