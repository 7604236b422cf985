#pragma once

// System descriptions and symbolic effect labels. All indices are 0-based
// internally; the textual forms (label_text.hpp) are 1-based.

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace boxworld {

/// A single system: K_x outcomes for each fiducial measurement x.
class SystemSpec {
 public:
  /// Throws InvalidSystemSpec unless there is at least one measurement and
  /// every outcome count is at least 2.
  explicit SystemSpec(std::vector<int> outcome_counts);

  const std::vector<int>& outcome_counts() const { return outcome_counts_; }
  int measurements() const { return static_cast<int>(outcome_counts_.size()); }
  int outcomes(int measurement) const { return outcome_counts_.at(measurement); }
  /// d = 1 + sum_x (K_x - 1)
  int dimension() const { return dimension_; }
  /// Number of local fiducial effects, sum_x K_x (dependent outcomes included).
  int alphabet_size() const { return alphabet_size_; }
  bool is_classical() const { return measurements() == 1; }

  /// Offset of measurement x in the local fiducial alphabet.
  int alphabet_offset(int measurement) const { return alphabet_offsets_.at(measurement); }
  /// Offset of measurement x's independent outcomes in the representation basis (after the unit).
  int basis_offset(int measurement) const { return basis_offsets_.at(measurement); }

  friend bool operator==(const SystemSpec& a, const SystemSpec& b) {
    return a.outcome_counts_ == b.outcome_counts_;
  }

 private:
  std::vector<int> outcome_counts_;
  std::vector<int> alphabet_offsets_;
  std::vector<int> basis_offsets_;
  int dimension_ = 0;
  int alphabet_size_ = 0;
};

/// An ordered list of systems forming a joint (tensor product) system.
class MultiSpec {
 public:
  explicit MultiSpec(std::vector<SystemSpec> systems);
  /// Convenience: each inner list is one system's outcome counts.
  static MultiSpec from_counts(const std::vector<std::vector<int>>& counts);

  const std::vector<SystemSpec>& systems() const { return systems_; }
  const SystemSpec& system(int i) const { return systems_.at(i); }
  int size() const { return static_cast<int>(systems_.size()); }
  /// Product of the per-system dimensions.
  long joint_dimension() const { return joint_dimension_; }
  /// Number of joint fiducial effects, product of the local alphabet sizes.
  long alphabet_size() const { return alphabet_size_; }
  bool has_classical_system() const;
  /// K^(1)_1 after canonical sorting: the smallest outcome count anywhere.
  int min_first_outcomes() const;
  std::vector<std::vector<int>> counts() const;

  /// Throws ClassicalSystemUnsupported when any system has a single measurement.
  void require_nonclassical(const std::string& operation) const;

  friend bool operator==(const MultiSpec& a, const MultiSpec& b) {
    return a.systems_ == b.systems_;
  }

 private:
  std::vector<SystemSpec> systems_;
  long joint_dimension_ = 1;
  long alphabet_size_ = 1;
};

/// X_{a|x} on one system, or the unit effect.
struct LocalEffectLabel {
  static constexpr int kUnit = -1;

  int measurement = kUnit;
  int outcome = kUnit;

  static LocalEffectLabel unit() { return {}; }
  static LocalEffectLabel fiducial(int measurement, int outcome) { return {measurement, outcome}; }

  bool is_unit() const { return measurement == kUnit; }

  friend auto operator<=>(const LocalEffectLabel&, const LocalEffectLabel&) = default;
};

/// Throws InvalidLabel if the label does not exist on `spec`.
void validate(const SystemSpec& spec, const LocalEffectLabel& label);

/// One local label per system; fiducial when none of them is the unit.
struct JointEffectLabel {
  std::vector<LocalEffectLabel> components;

  bool is_fiducial() const;
  /// The unit position when exactly one component is the unit.
  std::optional<int> subunit_position() const;

  friend auto operator<=>(const JointEffectLabel&, const JointEffectLabel&) = default;
};

void validate(const MultiSpec& multi, const JointEffectLabel& label);

/// A deterministic outcome for every (system, measurement) pair.
struct Assignment {
  std::vector<std::vector<int>> outcomes;

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

void validate(const MultiSpec& multi, const Assignment& assignment);

/// Result of canonical_sort: the sorted spec plus the index maps that
/// translate labels between the original and the sorted systems.
struct CanonicalRelabelling {
  /// system_order[new_i] = original index of sorted system new_i.
  std::vector<int> system_order;
  /// measurement_order[new_i][new_x] = original measurement index.
  std::vector<std::vector<int>> measurement_order;

  bool is_identity() const;
  JointEffectLabel to_canonical(const JointEffectLabel& original) const;
  JointEffectLabel to_original(const JointEffectLabel& canonical) const;
  Assignment to_original(const Assignment& canonical) const;
};

struct CanonicalForm {
  MultiSpec multi;
  CanonicalRelabelling relabelling;
};

/// Sorts measurements within each system by outcome count, then systems by
/// their first (smallest) outcome count; ties keep the original order after
/// comparing the full sorted outcome list. Idempotent.
CanonicalForm canonical_sort(const MultiSpec& multi);
bool is_canonical(const MultiSpec& multi);

/// Two systems are of the same type when their outcome counts agree as multisets.
bool same_type(const SystemSpec& a, const SystemSpec& b);

}  // namespace boxworld
