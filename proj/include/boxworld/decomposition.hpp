#pragma once

// Decompositions of effects into fiducial effects, and the classification of
// multiform, sub-unit and covering structure.
//
// Internally effects are compared through their profiles: the vector of
// evaluations on all pure product states. Pure product states span the joint
// space, so two effects are equal exactly when their profiles are.

#include <boxworld/budget.hpp>
#include <boxworld/report.hpp>
#include <boxworld/representation.hpp>

#include <compare>
#include <map>
#include <optional>
#include <vector>

namespace boxworld {

using Profile = std::vector<int>;

/// Multiset of fiducial labels, as sorted alphabet indices of a FiducialFrame.
struct Decomposition {
  std::vector<std::size_t> terms;

  std::size_t size() const { return terms.size(); }
  friend auto operator<=>(const Decomposition&, const Decomposition&) = default;
};

Decomposition make_decomposition(std::vector<std::size_t> terms);
std::vector<JointEffectLabel> labels_of(const FiducialFrame& frame, const Decomposition& d);

struct SubUnitDescriptor {
  int unit_system = 0;
  /// The full label; component `unit_system` is the unit, the rest are fiducial.
  JointEffectLabel label;

  friend bool operator==(const SubUnitDescriptor&, const SubUnitDescriptor&) = default;
};

/// All labels with exactly one unit component, ordered by unit position and
/// then lexicographically.
std::vector<JointEffectLabel> subunit_labels(const MultiSpec& multi);

/// Lookup table from profiles to sub-unit effects for one frame.
class SubunitCatalog {
 public:
  explicit SubunitCatalog(const FiducialFrame& frame);

  std::size_t size() const { return labels_.size(); }
  const JointEffectLabel& label(std::size_t k) const { return labels_[k]; }
  const Profile& profile(std::size_t k) const { return profiles_[k]; }
  /// Fiducial labels of the decomposition of sub-unit k along local measurement x.
  Decomposition measurement_decomposition(std::size_t k, int measurement) const;

  std::optional<std::size_t> find(const Profile& p) const;
  std::optional<SubUnitDescriptor> classify(const EffectVector& e) const;

 private:
  const FiducialFrame* frame_;
  std::vector<JointEffectLabel> labels_;
  std::vector<Profile> profiles_;
  std::map<Profile, std::size_t> index_;
};

/// Integer profile of an effect; nullopt when some evaluation is not an integer.
std::optional<Profile> integer_profile(const FiducialFrame& frame, const EffectVector& e);
Profile profile_of(const FiducialFrame& frame, const Decomposition& d);

/// floor(<E, m> * prod_i max_x K^(i)_x), with m the maximally mixed state.
/// No decomposition of E has more terms.
std::size_t decomposition_size_bound(const FiducialFrame& frame, const EffectVector& e);

/// Every multiset of fiducial labels summing to `e`, sorted. Depth-first over
/// labels in alphabet order; a branch is cut as soon as the remainder would
/// be negative on some pure product state or the size bound is reached.
/// Throws NotInCone when `e` has no decomposition.
std::vector<Decomposition> enumerate_decompositions(const FiducialFrame& frame, const EffectVector& e,
                                                    BudgetMeter& meter);
std::vector<Decomposition> enumerate_decompositions(const FiducialFrame& frame, const EffectVector& e);

bool is_multiform(const FiducialFrame& frame, const EffectVector& e, BudgetMeter& meter);
bool is_multiform(const FiducialFrame& frame, const EffectVector& e);

std::optional<SubUnitDescriptor> classify_subunit(const FiducialFrame& frame, const EffectVector& e);

/// Whether some sub-multiset of `terms` (a proper one when `strict`) sums to
/// `f`. The empty sub-multiset sums to the zero effect, so every set covers
/// zero, strictly too unless the set itself is empty.
bool covers(const FiducialFrame& frame, const Decomposition& terms, const EffectVector& f, bool strict);

/// Sub-unit effects (catalog indices) covered by some sub-multiset of `terms`.
std::vector<std::size_t> covered_subunits(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                          const Decomposition& terms, bool strict = false);

/// For every sub-unit effect and every one of its decompositions: the terms
/// agree with the effect off the unit system and their unit-system components
/// are one full measurement; there is one decomposition per measurement; and
/// no strict sub-multiset of a decomposition sums to a multiform effect.
Report verify_subunit_decompositions(const FiducialFrame& frame, BudgetMeter& meter);

/// Groups every multiset of exactly K^(1)_1 fiducial labels by its sum and
/// checks that the multiform sums are exactly the sub-unit effects at the
/// systems whose smallest outcome count is K^(1)_1. Requires a canonical,
/// non-classical spec.
Report verify_small_sums(const FiducialFrame& frame, BudgetMeter& meter);

}  // namespace boxworld
