#pragma once

#include "staudt/config.hpp"

namespace staudt {

/// Source of the general (free) choices a gadget makes. The random
/// implementation backs compilation; the fixed one lets verification
/// enumerate every choice exhaustively.
class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;
  virtual Scalar draw(const FieldPtr& f, const std::vector<Scalar>& forbidden,
                      const char* purpose) = 0;
  void set_sink(std::vector<DrawRecord>* sink) { sink_ = sink; }

 protected:
  void record(const char* purpose, const Scalar& v, std::size_t forbidden_size) {
    if (sink_) sink_->push_back({purpose, v, forbidden_size});
  }
  std::vector<DrawRecord>* sink_ = nullptr;
};

class RandomChoice : public ChoiceSource {
 public:
  explicit RandomChoice(Sampler& rng) : rng_(rng) {}
  Scalar draw(const FieldPtr& f, const std::vector<Scalar>& forbidden,
              const char* purpose) override;

 private:
  Sampler& rng_;
};

/// Feeds a preset sequence of values; a value that is forbidden (or running
/// out of values, as happens when a construction retries) raises
/// Err::DegenerateChoice so enumeration can classify the choice.
class FixedChoice : public ChoiceSource {
 public:
  explicit FixedChoice(std::vector<Scalar> values) : values_(std::move(values)) {}
  Scalar draw(const FieldPtr& f, const std::vector<Scalar>& forbidden,
              const char* purpose) override;

 private:
  std::vector<Scalar> values_;
  std::size_t next_ = 0;
};

/// A framed variable carrier: a horizontal marked line, two framing points
/// with their chart labels, and the point whose chart coordinate is `value`.
struct FramedCarrier {
  int line = -1;
  std::array<Scalar, 2> labels;
  std::array<int, 2> fpoints;
  int vpoint = -1;
  Scalar value;

  bool label_set_is(const Scalar& a, const Scalar& b) const {
    return (labels[0] == a && labels[1] == b) || (labels[0] == b && labels[1] == a);
  }
  /// id of the framing point carrying label s
  int point_with_label(const Scalar& s) const;
};

Framing framing_of(const Configuration& cfg, const FramedCarrier& c);
/// Chart coordinate of the carrier's variable point, recomputed from the
/// realization (must equal c.value).
Scalar carrier_coordinate(const Configuration& cfg, const FramedCarrier& c);

constexpr int kGadgetRetries = 16;

/// Project the carrier's triple onto a generally chosen horizontal line from
/// a generally chosen center; the image chart value equals the source value.
FramedCarrier parallel_shift(Configuration& cfg, const FramedCarrier& src, ChoiceSource& ch);

/// Midpoint figure: adds M on `line` with chart x-position (a+b)/2.
/// Err::CharTwo in characteristic 2; Err::CoincidentInputs when A == B.
int midpoint(Configuration& cfg, int line, int A, int B, ChoiceSource& ch);

/// Same figure solved for A: adds A with x-position 2m - b (M becomes the
/// midpoint of A and B).
int reflect(Configuration& cfg, int line, int M, int B, ChoiceSource& ch);

/// Generic addition figure; both carriers must be {0,1}-framed with values
/// and their sum outside {0,1}. Returns a fresh {0,1}-framed carrier whose
/// value is a.value + b.value.
FramedCarrier generic_addition(Configuration& cfg, const FramedCarrier& a, const FramedCarrier& b,
                               ChoiceSource& ch);

/// Generic multiplication figure; same framing requirements, values and the
/// product outside {0,1}. Result value is a.value * b.value.
FramedCarrier generic_multiplication(Configuration& cfg, const FramedCarrier& a,
                                     const FramedCarrier& b, ChoiceSource& ch);

/// Second half of the equality configuration: the determined center X' built
/// from b's framing points, and the codimension-1 requirement that the line
/// X' V_b passes through the carrier's variable point.
/// Err::IntendedIncidenceFails iff the two values differ.
void attach_equal(Configuration& cfg, const FramedCarrier& on_lprime, const FramedCarrier& b,
                  GadgetTrace& trace);

/// Equality configuration (same framing-type): shift a onto a fresh line,
/// then attach b with the determined center.
void equality(Configuration& cfg, const FramedCarrier& a, const FramedCarrier& b, ChoiceSource& ch);

/// Parallel shift whose retry block also runs `follow` (determined
/// construction recorded in the same trace); used for reference porting.
FramedCarrier parallel_shift_ex(
    Configuration& cfg, const FramedCarrier& src, ChoiceSource& ch,
    const std::function<void(Configuration&, FramedCarrier&, GadgetTrace&)>& follow);

/// Enforcing forms: the figure plus the determined-center attachment of the
/// c carrier, as one gadget application. The attachment is the codimension-1
/// condition; it fails (IntendedIncidenceFails) iff c.value differs from the
/// figure's output value.
void generic_addition_enforce(Configuration& cfg, const FramedCarrier& a, const FramedCarrier& b,
                              const FramedCarrier& c, ChoiceSource& ch);
void generic_multiplication_enforce(Configuration& cfg, const FramedCarrier& a,
                                    const FramedCarrier& b, const FramedCarrier& c,
                                    ChoiceSource& ch);

}  // namespace staudt
