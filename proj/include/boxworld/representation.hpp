#pragma once

// Exact vector representation of effects and states.
//
// Local basis: coordinate 0 is the unit effect, followed by the independent
// fiducial effects X_{a|x} (a < K_x - 1 in 0-based terms) in (x, a)
// lexicographic order. The dependent outcome is unit minus the others.
// Joint vectors are Kronecker products with system 0 varying slowest.

#include <boxworld/scalar.hpp>
#include <boxworld/system.hpp>

#include <cstddef>
#include <vector>

namespace boxworld {

struct EffectVector {
  VectorQ coords;

  friend bool operator==(const EffectVector& a, const EffectVector& b) {
    return a.coords.size() == b.coords.size() && a.coords == b.coords;
  }
};

struct StateVector {
  VectorQ coords;

  friend bool operator==(const StateVector& a, const StateVector& b) {
    return a.coords.size() == b.coords.size() && a.coords == b.coords;
  }
};

inline EffectVector operator+(const EffectVector& a, const EffectVector& b) {
  return {a.coords + b.coords};
}
inline EffectVector operator-(const EffectVector& a, const EffectVector& b) {
  return {a.coords - b.coords};
}

EffectVector local_effect_vector(const SystemSpec& spec, const LocalEffectLabel& label);
EffectVector joint_effect_vector(const MultiSpec& multi, const JointEffectLabel& label);
EffectVector unit_effect(const MultiSpec& multi);
EffectVector zero_effect(const MultiSpec& multi);

/// Solves the dual system <unit, s> = 1, <X_{a|x}, s> = [a == outcome_x] over the local basis.
StateVector local_pure_state(const SystemSpec& spec, const std::vector<int>& outcomes);
StateVector pure_product_state(const MultiSpec& multi, const Assignment& assignment);

/// Exact pairing <e, s>. Throws DimensionError on size mismatch.
Rational evaluate(const EffectVector& e, const StateVector& s);
inline bool hits(const EffectVector& e, const StateVector& s) { return evaluate(e, s) == 1; }

/// All pure product states, lexicographic in (system, measurement) with the
/// last measurement of the last system varying fastest.
std::vector<Assignment> enumerate_pure_product_states(const MultiSpec& multi);

/// The uniform mixture: every outcome of measurement x has probability 1/K_x.
StateVector maximally_mixed_state(const MultiSpec& multi);

/// Indexing of the joint fiducial alphabet (all outcomes, dependent ones
/// included). Index order is lexicographic in the components with system 0
/// slowest; within a system, labels are ordered by (measurement, outcome).
class FiducialAlphabet {
 public:
  explicit FiducialAlphabet(const MultiSpec& multi);

  std::size_t size() const { return size_; }
  JointEffectLabel label(std::size_t index) const;
  std::size_t index(const JointEffectLabel& label) const;
  /// Local alphabet position of system i's component of the label at `index`.
  int component(std::size_t index, int system) const {
    return static_cast<int>((index / strides_[system]) % radices_[system]);
  }
  std::size_t with_component(std::size_t index, int system, int local) const {
    return index - component(index, system) * strides_[system] + local * strides_[system];
  }
  LocalEffectLabel local_label(int system, int local) const { return locals_[system][local]; }
  int local_index(int system, const LocalEffectLabel& label) const;
  int radix(int system) const { return static_cast<int>(radices_[system]); }

 private:
  std::vector<std::size_t> radices_;
  std::vector<std::size_t> strides_;
  std::vector<std::vector<LocalEffectLabel>> locals_;
  std::size_t size_ = 1;
};

/// Precomputed exact data for one joint system: every fiducial vector, every
/// pure product state, and the 0/1 table of which state hits which label.
/// Immutable after construction.
class FiducialFrame {
 public:
  explicit FiducialFrame(MultiSpec multi);

  const MultiSpec& multi() const { return multi_; }
  const FiducialAlphabet& alphabet() const { return alphabet_; }
  std::size_t label_count() const { return alphabet_.size(); }
  std::size_t state_count() const { return assignments_.size(); }

  const EffectVector& vector(std::size_t label) const { return vectors_[label]; }
  const EffectVector& unit() const { return unit_; }
  const std::vector<Assignment>& assignments() const { return assignments_; }
  const StateVector& state(std::size_t s) const { return states_[s]; }
  /// hit(label, s) == evaluate(vector(label), state(s)), which is 0 or 1.
  int hit(std::size_t label, std::size_t s) const { return hits_[label * state_count() + s]; }
  /// Evaluations of `label` on every pure product state.
  std::vector<int> hit_profile(std::size_t label) const;

  /// Evaluations of an effect on every pure product state. Pure product
  /// states span the joint space, so this profile determines the vector.
  std::vector<Rational> profile(const EffectVector& e) const;

  EffectVector sum(const std::vector<std::size_t>& labels) const;
  /// Index of the pure product state with this assignment.
  std::size_t state_index(const Assignment& a) const;

 private:
  MultiSpec multi_;
  FiducialAlphabet alphabet_;
  std::vector<EffectVector> vectors_;
  EffectVector unit_;
  std::vector<Assignment> assignments_;
  std::vector<StateVector> states_;
  std::vector<unsigned char> hits_;
};

}  // namespace boxworld
