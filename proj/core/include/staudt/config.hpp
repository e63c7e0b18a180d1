#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "staudt/proj.hpp"

namespace staudt {

enum class PointRole { Anchor, Unit, Framing, Variable, Auxiliary, Bystander };
enum class LineRole { Anchor, VariableBearing, Auxiliary };
const char* role_name(PointRole r);
const char* role_name(LineRole r);
PointRole point_role_of(const std::string& s);
LineRole line_role_of(const std::string& s);

struct MarkedPoint {
  int id = -1;
  std::string label;
  PointRole role = PointRole::Auxiliary;
  PPoint pt;
  std::string provenance;  // trace id or "initial"
};

struct LineFraming {
  std::array<Scalar, 2> labels;
  std::array<int, 2> point_ids;
  int variable_point_id = -1;
};

struct MarkedLine {
  int id = -1;
  std::string label;
  LineRole role = LineRole::Auxiliary;
  PLine ln;
  std::optional<LineFraming> framing;
  std::optional<Scalar> intercept;  // y-intercept for horizontal affine lines
};

struct DrawRecord {
  std::string purpose;
  Scalar value;
  std::uint64_t forbidden_size = 0;
};

/// Record of one gadget application (or element placement): free choices made,
/// elements produced, and the relation the incidences enforce.
struct GadgetTrace {
  int id = -1;
  std::string kind;
  std::vector<int> input_points, input_lines;
  std::vector<DrawRecord> draws;
  std::vector<int> out_points, out_lines;
  std::string relation;
};

/// Per-kind free-draw counts for the five building blocks plus equality.
/// Each draws exactly three scalars: two for the center, one for the line.
int gadget_free_count(const std::string& kind);
bool is_gadget_kind(const std::string& kind);

struct Violation {
  std::string condition;  // "i".."v", "extra", "ledger"
  std::string detail;
};

struct ConditionReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
  std::string str() const;
};

struct LoadedConfig;

/// Labeled marked points and lines with an exact incidence ledger. Pairs in
/// the ledger are required incident; every other pair is required
/// non-incident, and additions are validated against that classification.
class Configuration {
 public:
  explicit Configuration(FieldPtr field, std::uint64_t seed = 0);

  const FieldPtr& field() const { return field_; }
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t s) { seed_ = s; }

  const std::vector<MarkedPoint>& points() const { return points_; }
  const std::vector<MarkedLine>& lines() const { return lines_; }
  const MarkedPoint& point(int id) const { return points_.at(id); }
  const MarkedLine& line(int id) const { return lines_.at(id); }
  MarkedLine& mutable_line(int id) { return lines_.at(id); }

  const std::vector<int>& lines_of_point(int pid) const { return point_lines_.at(pid); }
  const std::vector<int>& points_of_line(int lid) const { return line_points_.at(lid); }
  bool required_on(int pid, int lid) const;

  std::optional<int> find_point(const PPoint& p) const;
  std::optional<int> find_line(const PLine& l) const;

  /// Add a point; `on_lines` is the exact set of existing lines it lies on.
  /// Errors: DuplicateElement, UnintendedIncidence (lies on a line not
  /// listed), IntendedIncidenceFails (fails to lie on a listed line).
  int add_point(const PPoint& p, PointRole role, const std::string& label,
                const std::string& provenance, const std::vector<int>& on_lines);
  /// Add a line; `through_points` is the exact set of existing points on it.
  int add_line(const PLine& l, LineRole role, const std::string& label,
               const std::vector<int>& through_points);

  /// Register an additional required incidence between existing elements.
  /// The realization must already satisfy it exactly.
  void require_incidence(int pid, int lid);

  /// Scene-setup variants: classify the new element against everything
  /// already marked and record exactly the incidences that hold. Used when
  /// building test scenes and the verification oracles' fixtures, never by
  /// gadget construction (which must state its intentions).
  int add_point_observed(const PPoint& p, PointRole role, const std::string& label,
                         const std::string& provenance);
  int add_line_observed(const PLine& l, LineRole role, const std::string& label);

  std::vector<GadgetTrace>& traces() { return traces_; }
  const std::vector<GadgetTrace>& traces() const { return traces_; }
  std::uint64_t free_count() const { return free_count_; }
  void add_free_draws(std::uint64_t n) { free_count_ += n; }

  /// All y-intercepts of horizontal affine marked lines plus y-coordinates of
  /// affine marked points: the forbidden set for a fresh horizontal line.
  std::vector<Scalar> horizontal_forbidden() const;

  /// Rollback support for gadget retry loops.
  struct Checkpoint {
    std::size_t npoints, nlines, ntraces;
    std::uint64_t free_count;
  };
  Checkpoint checkpoint() const;
  void rollback(const Checkpoint& c);

  /// Add a bystander at the meet of every line pair lacking a shared marked
  /// point. Err::ConcurrencyViolation if three lines meet at such a point.
  void complete_bystanders();

  /// Definition conditions (i)-(v) plus the extras (variable-line intercepts
  /// distinct and outside {0,1}, bystander degree exactly 2) verified against
  /// the realization; incidence re-checking is partitioned across threads.
  ConditionReport check_conditions(int threads = 2) const;

  int bystander_count() const { return bystanders_; }

 private:
  friend LoadedConfig config_from_json(const std::string&);
  struct PointKey {
    PPoint p;
    bool operator<(const PointKey& o) const { return cmp(p, o.p) < 0; }
  };
  struct LineKey {
    PLine l;
    bool operator<(const LineKey& o) const { return cmp(l, o.l) < 0; }
  };

  void check_new_point(const PPoint& p, const std::vector<int>& on_lines) const;
  void check_new_line(const PLine& l, const std::vector<int>& through_points) const;

  FieldPtr field_;
  std::uint64_t seed_ = 0;
  std::vector<MarkedPoint> points_;
  std::vector<MarkedLine> lines_;
  std::vector<std::vector<int>> point_lines_;  // sorted
  std::vector<std::vector<int>> line_points_;  // sorted
  std::map<PointKey, int> point_index_;
  std::map<LineKey, int> line_index_;
  std::vector<GadgetTrace> traces_;
  std::uint64_t free_count_ = 0;
  int bystanders_ = 0;
};

struct AnchorIds {
  int p1, p2, p3, p4, unit;
  int l12, l13, l14, l23, l24, l34;  // anchor lines p_i p_j
};

/// Anchor points p1..p4, the six anchor lines, and the unit point [1,0,1].
Configuration init_anchors(const FieldPtr& field, AnchorIds* ids = nullptr);
AnchorIds anchor_ids();  // the fixed ids produced by init_anchors

// JSON serialization (config module external interface; implemented in jsonio.cpp)
std::string config_to_json(const Configuration& cfg, const std::string& program_text,
                           const std::vector<std::string>& witness);
struct LoadedConfig {
  Configuration cfg;
  std::string program_text;
  std::vector<std::string> witness;
};
LoadedConfig config_from_json(const std::string& bytes);

}  // namespace staudt
