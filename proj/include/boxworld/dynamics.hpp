#pragma once

// Reversible transformations as permutations of the joint fiducial alphabet.
//
// A transformation acts on effects through its adjoint T^dagger, which must
// send every fiducial vector to a fiducial vector. States transform by the
// transpose. Allowedness is decided on the polytope vertices.

#include <boxworld/budget.hpp>
#include <boxworld/decomposition.hpp>
#include <boxworld/polytope.hpp>
#include <boxworld/report.hpp>
#include <boxworld/representation.hpp>

#include <compare>
#include <map>
#include <optional>
#include <vector>

namespace boxworld {

/// image[l] is the alphabet index that label l is sent to.
struct EffectPermutation {
  std::vector<std::size_t> image;

  std::size_t size() const { return image.size(); }
  std::size_t operator()(std::size_t l) const { return image[l]; }
  static EffectPermutation identity(std::size_t n);
  friend auto operator<=>(const EffectPermutation&, const EffectPermutation&) = default;
};

bool is_bijection(const EffectPermutation& p);
/// (outer * inner)(l) = outer(inner(l)).
EffectPermutation compose(const EffectPermutation& outer, const EffectPermutation& inner);
EffectPermutation inverse(const EffectPermutation& p);

struct LinearExtension {
  /// Acts on effect coordinates: adjoint * v_l = v_{perm(l)}.
  MatrixQ adjoint;

  MatrixQ state_map() const { return adjoint.transpose(); }
};

/// Relabelling from system i onto system P[i]: measurement x goes to
/// measurement_map[x], and outcome a of x to outcome_map[x][a].
struct LocalRelabelling {
  std::vector<int> measurement_map;
  std::vector<std::vector<int>> outcome_map;

  friend auto operator<=>(const LocalRelabelling&, const LocalRelabelling&) = default;
};

struct TrivialForm {
  /// System i goes to system_permutation[i].
  std::vector<int> system_permutation;
  std::vector<LocalRelabelling> local;

  bool swaps_systems() const;
  friend auto operator<=>(const TrivialForm&, const TrivialForm&) = default;
};

/// Systems are 0-based indices.
struct SystemSubset {
  std::vector<int> systems;

  bool contains(int i) const;
  static SystemSubset all(int n);
};

/// Number of differing components. Throws DimensionError if the labels
/// have different lengths.
int hamming_distance(const JointEffectLabel& a, const JointEffectLabel& b);

/// Exact data shared by the transformation routines for one joint system:
/// the fiducial frame, a spanning set of labels and its inverse, and the
/// state polytope with its vertices.
class TransformFrame {
 public:
  TransformFrame(const FiducialFrame& frame, BudgetMeter& meter);
  explicit TransformFrame(const FiducialFrame& frame);

  const FiducialFrame& fiducial() const { return *frame_; }
  const MultiSpec& multi() const { return frame_->multi(); }
  std::size_t label_count() const { return frame_->label_count(); }
  /// First joint_dimension linearly independent labels in alphabet order.
  const std::vector<std::size_t>& spanning_labels() const { return spanning_; }
  const StatePolytope& polytope() const { return polytope_; }
  const std::vector<StateVector>& vertices() const { return polytope_.cached_vertices(); }

  /// Label whose vector is `v`, if any.
  std::optional<std::size_t> find_label(const EffectVector& v) const;

 private:
  friend std::optional<LinearExtension> linear_extension(const TransformFrame&, const EffectPermutation&);

  const FiducialFrame* frame_;
  std::vector<std::size_t> spanning_;
  MatrixQ spanning_inverse_;
  StatePolytope polytope_;
  std::map<std::vector<long>, std::size_t> by_vector_;
};

/// The unique linear map agreeing with `perm` on a spanning set, if it also
/// agrees on every remaining label.
std::optional<LinearExtension> linear_extension(const TransformFrame& tf, const EffectPermutation& perm);

/// A linear extension exists, and it and the inverse's extension send every
/// polytope vertex into the polytope.
bool is_allowed_reversible(const TransformFrame& tf, const EffectPermutation& perm);

/// Effect permutation induced by a trivial form.
EffectPermutation apply(const FiducialFrame& frame, const TrivialForm& form);

struct TrivialElement {
  EffectPermutation permutation;
  TrivialForm form;
};

/// Same-type system permutations composed with measurement-choice
/// permutations within equal outcome counts and per-measurement outcome
/// permutations. Sorted by permutation; throws ConstructionBug if the count
/// differs from trivial_group_order or an element repeats.
std::vector<TrivialElement> generate_trivial_group(const FiducialFrame& frame);
/// |same-type system permutations| * prod_i prod_classes (m_c! prod_j K_j!).
std::size_t trivial_group_order(const MultiSpec& multi);

/// Every allowed reversible effect permutation, sorted. Backtracking over
/// label images with the unit pinned to itself: a label whose vector depends
/// on earlier ones has its image forced by the same relation, and an
/// independent label needs an image independent of the earlier images.
/// Complete candidates must pass is_allowed_reversible. Forced labels are
/// visited first; otherwise the next label is the one that brings the most
/// remaining labels into the span.
std::vector<EffectPermutation> enumerate_reversible(const TransformFrame& tf, BudgetMeter& meter);

/// Recovers (P, Q) from a permutation that preserves Hamming distance 1.
/// Empty if it does not, if the recovered form does not reproduce `perm`, or
/// if a local map breaks the measurement structure.
std::optional<TrivialForm> decompose_trivial(const FiducialFrame& frame, const EffectPermutation& perm);

/// Every sub-unit effect maps to a sub-unit effect whose unit system has the
/// same smallest outcome count, and the systems with K_1 below each level
/// are permuted among themselves.
Report verify_subunit_images(const FiducialFrame& frame, const SubunitCatalog& catalog, const EffectPermutation& perm);

/// Requires `perm` to permute the sub-unit effects at systems in `omega`
/// (PreconditionNotMet otherwise). Checks that agreement outside omega is
/// preserved in both directions for every label pair, and that whenever the
/// image of a sub-unit decomposition covers a sub-unit effect F, the image of
/// the whole sum is F.
Report verify_structural_properties(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                const EffectPermutation& perm, const SystemSubset& omega);

/// The subsets {j : K_1^(j) <= r} for every level r, smallest first. The
/// last one is every system.
std::vector<SystemSubset> outcome_levels(const MultiSpec& multi);

/// Aggregates, over every permutation: Hamming distance 1 preserved,
/// verify_subunit_images, and verify_structural_properties on each outcome level. One
/// record per property; the witness names the first failing permutation.
Report verify_transformation_suite(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                   const std::vector<EffectPermutation>& perms);

/// Set equality of enumerate_reversible and generate_trivial_group, a trivial
/// decomposition of every element, same-type-only system permutations, and
/// the transformation suite on every enumerated element.
Report verify_classification(const TransformFrame& tf, BudgetMeter& meter);

}  // namespace boxworld
