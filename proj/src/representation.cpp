#include <boxworld/errors.hpp>
#include <boxworld/linalg.hpp>
#include <boxworld/representation.hpp>

#include <algorithm>

namespace boxworld {

EffectVector local_effect_vector(const SystemSpec& spec, const LocalEffectLabel& label) {
  validate(spec, label);
  VectorQ v = VectorQ::Zero(spec.dimension());
  if (label.is_unit()) {
    v(0) = 1;
    return {v};
  }
  const int last = spec.outcomes(label.measurement) - 1;
  const int base = spec.basis_offset(label.measurement);
  if (label.outcome < last) {
    v(base + label.outcome) = 1;
  } else {
    v(0) = 1;
    for (int a = 0; a < last; ++a) v(base + a) = -1;
  }
  return {v};
}

EffectVector joint_effect_vector(const MultiSpec& multi, const JointEffectLabel& label) {
  validate(multi, label);
  VectorQ v = local_effect_vector(multi.system(0), label.components[0]).coords;
  for (int i = 1; i < multi.size(); ++i)
    v = linalg::kron_vec(v, local_effect_vector(multi.system(i), label.components[i]).coords);
  return {v};
}

EffectVector unit_effect(const MultiSpec& multi) {
  return joint_effect_vector(multi, JointEffectLabel{std::vector<LocalEffectLabel>(multi.size())});
}

EffectVector zero_effect(const MultiSpec& multi) {
  return {VectorQ::Zero(multi.joint_dimension())};
}

StateVector local_pure_state(const SystemSpec& spec, const std::vector<int>& outcomes) {
  const int d = spec.dimension();
  MatrixQ pairing(d, d);
  VectorQ rhs(d);
  pairing.row(0) = local_effect_vector(spec, LocalEffectLabel::unit()).coords.transpose();
  rhs(0) = 1;
  for (int x = 0; x < spec.measurements(); ++x) {
    for (int a = 0; a + 1 < spec.outcomes(x); ++a) {
      const int row = spec.basis_offset(x) + a;
      pairing.row(row) = local_effect_vector(spec, LocalEffectLabel::fiducial(x, a)).coords.transpose();
      rhs(row) = outcomes[x] == a ? 1 : 0;
    }
  }
  auto s = linalg::solve(pairing, rhs);
  if (!s) throw ConstructionBug("local effect basis is singular");
  return {*s};
}

StateVector pure_product_state(const MultiSpec& multi, const Assignment& assignment) {
  validate(multi, assignment);
  VectorQ v = local_pure_state(multi.system(0), assignment.outcomes[0]).coords;
  for (int i = 1; i < multi.size(); ++i)
    v = linalg::kron_vec(v, local_pure_state(multi.system(i), assignment.outcomes[i]).coords);
  return {v};
}

Rational evaluate(const EffectVector& e, const StateVector& s) {
  if (e.coords.size() != s.coords.size())
    throw DimensionError("effect has dimension " + std::to_string(e.coords.size()) +
                         ", state has " + std::to_string(s.coords.size()));
  return e.coords.dot(s.coords);
}

std::vector<Assignment> enumerate_pure_product_states(const MultiSpec& multi) {
  std::vector<std::pair<int, int>> slots;  // (system, measurement)
  for (int i = 0; i < multi.size(); ++i)
    for (int x = 0; x < multi.system(i).measurements(); ++x) slots.emplace_back(i, x);

  Assignment current;
  for (const auto& s : multi.systems()) current.outcomes.emplace_back(s.measurements(), 0);
  std::vector<Assignment> out;
  while (true) {
    out.push_back(current);
    int k = static_cast<int>(slots.size()) - 1;
    for (; k >= 0; --k) {
      auto [i, x] = slots[k];
      if (++current.outcomes[i][x] < multi.system(i).outcomes(x)) break;
      current.outcomes[i][x] = 0;
    }
    if (k < 0) break;
  }
  return out;
}

StateVector maximally_mixed_state(const MultiSpec& multi) {
  auto local = [](const SystemSpec& spec) {
    VectorQ v = VectorQ::Zero(spec.dimension());
    v(0) = 1;
    for (int x = 0; x < spec.measurements(); ++x)
      for (int a = 0; a + 1 < spec.outcomes(x); ++a) v(spec.basis_offset(x) + a) = Rational(1, spec.outcomes(x));
    return v;
  };
  VectorQ v = local(multi.system(0));
  for (int i = 1; i < multi.size(); ++i) v = linalg::kron_vec(v, local(multi.system(i)));
  return {v};
}

FiducialAlphabet::FiducialAlphabet(const MultiSpec& multi) {
  const int n = multi.size();
  radices_.resize(n);
  strides_.resize(n);
  locals_.resize(n);
  for (int i = n - 1; i >= 0; --i) {
    const auto& spec = multi.system(i);
    radices_[i] = spec.alphabet_size();
    strides_[i] = size_;
    size_ *= radices_[i];
    for (int x = 0; x < spec.measurements(); ++x)
      for (int a = 0; a < spec.outcomes(x); ++a) locals_[i].push_back(LocalEffectLabel::fiducial(x, a));
  }
}

JointEffectLabel FiducialAlphabet::label(std::size_t index) const {
  JointEffectLabel out;
  out.components.reserve(radices_.size());
  for (std::size_t i = 0; i < radices_.size(); ++i)
    out.components.push_back(locals_[i][component(index, static_cast<int>(i))]);
  return out;
}

int FiducialAlphabet::local_index(int system, const LocalEffectLabel& label) const {
  const auto& locals = locals_.at(system);
  auto it = std::find(locals.begin(), locals.end(), label);
  if (it == locals.end()) throw InvalidLabel("not a fiducial label of system " + std::to_string(system + 1));
  return static_cast<int>(it - locals.begin());
}

std::size_t FiducialAlphabet::index(const JointEffectLabel& label) const {
  if (label.components.size() != radices_.size()) throw InvalidLabel("component count mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < radices_.size(); ++i)
    idx += local_index(static_cast<int>(i), label.components[i]) * strides_[i];
  return idx;
}

FiducialFrame::FiducialFrame(MultiSpec multi)
    : multi_(std::move(multi)), alphabet_(multi_), unit_(unit_effect(multi_)) {
  vectors_.reserve(alphabet_.size());
  for (std::size_t l = 0; l < alphabet_.size(); ++l)
    vectors_.push_back(joint_effect_vector(multi_, alphabet_.label(l)));
  assignments_ = enumerate_pure_product_states(multi_);
  states_.reserve(assignments_.size());
  for (const auto& a : assignments_) states_.push_back(pure_product_state(multi_, a));
  hits_.resize(vectors_.size() * states_.size());
  for (std::size_t l = 0; l < vectors_.size(); ++l) {
    for (std::size_t s = 0; s < states_.size(); ++s) {
      const Rational p = evaluate(vectors_[l], states_[s]);
      if (p != 0 && p != 1) throw ConstructionBug("fiducial effect evaluates outside {0,1} on a pure state");
      hits_[l * states_.size() + s] = p == 1 ? 1 : 0;
    }
  }
}

std::vector<int> FiducialFrame::hit_profile(std::size_t label) const {
  std::vector<int> out(state_count());
  for (std::size_t s = 0; s < state_count(); ++s) out[s] = hit(label, s);
  return out;
}

std::vector<Rational> FiducialFrame::profile(const EffectVector& e) const {
  std::vector<Rational> out;
  out.reserve(states_.size());
  for (const auto& s : states_) out.push_back(evaluate(e, s));
  return out;
}

EffectVector FiducialFrame::sum(const std::vector<std::size_t>& labels) const {
  EffectVector out = zero_effect(multi_);
  for (auto l : labels) out.coords += vectors_.at(l).coords;
  return out;
}

std::size_t FiducialFrame::state_index(const Assignment& a) const {
  validate(multi_, a);
  auto it = std::lower_bound(assignments_.begin(), assignments_.end(), a);
  return static_cast<std::size_t>(it - assignments_.begin());
}

}  // namespace boxworld
