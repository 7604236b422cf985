#include <boxworld/errors.hpp>
#include <boxworld/system.hpp>

#include <algorithm>
#include <numeric>

namespace boxworld {

SystemSpec::SystemSpec(std::vector<int> outcome_counts) : outcome_counts_(std::move(outcome_counts)) {
  if (outcome_counts_.empty()) throw InvalidSystemSpec("a system needs at least one measurement");
  dimension_ = 1;
  for (int k : outcome_counts_) {
    if (k < 2)
      throw InvalidSystemSpec("outcome count " + std::to_string(k) +
                              " is not allowed; every measurement needs at least 2 outcomes");
    alphabet_offsets_.push_back(alphabet_size_);
    basis_offsets_.push_back(dimension_);
    alphabet_size_ += k;
    dimension_ += k - 1;
  }
}

MultiSpec::MultiSpec(std::vector<SystemSpec> systems) : systems_(std::move(systems)) {
  if (systems_.empty()) throw InvalidSystemSpec("a joint system needs at least one system");
  for (const auto& s : systems_) {
    joint_dimension_ *= s.dimension();
    alphabet_size_ *= s.alphabet_size();
  }
}

MultiSpec MultiSpec::from_counts(const std::vector<std::vector<int>>& counts) {
  std::vector<SystemSpec> systems;
  systems.reserve(counts.size());
  for (const auto& c : counts) systems.emplace_back(c);
  return MultiSpec(std::move(systems));
}

bool MultiSpec::has_classical_system() const {
  return std::any_of(systems_.begin(), systems_.end(),
                     [](const SystemSpec& s) { return s.is_classical(); });
}

int MultiSpec::min_first_outcomes() const {
  int best = systems_.front().outcomes(0);
  for (const auto& s : systems_)
    for (int k : s.outcome_counts()) best = std::min(best, k);
  return best;
}

std::vector<std::vector<int>> MultiSpec::counts() const {
  std::vector<std::vector<int>> out;
  for (const auto& s : systems_) out.push_back(s.outcome_counts());
  return out;
}

void MultiSpec::require_nonclassical(const std::string& operation) const {
  for (int i = 0; i < size(); ++i)
    if (systems_[i].is_classical())
      throw ClassicalSystemUnsupported(operation + ": system " + std::to_string(i + 1) +
                                       " is classical (single measurement)");
}

void validate(const SystemSpec& spec, const LocalEffectLabel& label) {
  if (label.is_unit()) {
    if (label.outcome != LocalEffectLabel::kUnit) throw InvalidLabel("unit label carries an outcome");
    return;
  }
  if (label.measurement < 0 || label.measurement >= spec.measurements())
    throw InvalidLabel("measurement index " + std::to_string(label.measurement + 1) + " out of range");
  if (label.outcome < 0 || label.outcome >= spec.outcomes(label.measurement))
    throw InvalidLabel("outcome index " + std::to_string(label.outcome + 1) + " out of range");
}

bool JointEffectLabel::is_fiducial() const {
  return std::none_of(components.begin(), components.end(),
                      [](const LocalEffectLabel& l) { return l.is_unit(); });
}

std::optional<int> JointEffectLabel::subunit_position() const {
  std::optional<int> pos;
  for (int i = 0; i < static_cast<int>(components.size()); ++i) {
    if (!components[i].is_unit()) continue;
    if (pos) return std::nullopt;
    pos = i;
  }
  return pos;
}

void validate(const MultiSpec& multi, const JointEffectLabel& label) {
  if (static_cast<int>(label.components.size()) != multi.size())
    throw InvalidLabel("label has " + std::to_string(label.components.size()) +
                       " components for " + std::to_string(multi.size()) + " systems");
  for (int i = 0; i < multi.size(); ++i) validate(multi.system(i), label.components[i]);
}

void validate(const MultiSpec& multi, const Assignment& assignment) {
  if (static_cast<int>(assignment.outcomes.size()) != multi.size())
    throw InvalidAssignment("assignment covers " + std::to_string(assignment.outcomes.size()) +
                            " systems, expected " + std::to_string(multi.size()));
  for (int i = 0; i < multi.size(); ++i) {
    const auto& spec = multi.system(i);
    const auto& outs = assignment.outcomes[i];
    if (static_cast<int>(outs.size()) != spec.measurements())
      throw InvalidAssignment("system " + std::to_string(i + 1) + " assignment is incomplete");
    for (int x = 0; x < spec.measurements(); ++x)
      if (outs[x] < 0 || outs[x] >= spec.outcomes(x))
        throw InvalidAssignment("system " + std::to_string(i + 1) + " measurement " +
                                std::to_string(x + 1) + " outcome out of range");
  }
}

bool CanonicalRelabelling::is_identity() const {
  for (std::size_t i = 0; i < system_order.size(); ++i) {
    if (system_order[i] != static_cast<int>(i)) return false;
    for (std::size_t x = 0; x < measurement_order[i].size(); ++x)
      if (measurement_order[i][x] != static_cast<int>(x)) return false;
  }
  return true;
}

JointEffectLabel CanonicalRelabelling::to_canonical(const JointEffectLabel& original) const {
  JointEffectLabel out;
  out.components.resize(system_order.size());
  for (std::size_t ni = 0; ni < system_order.size(); ++ni) {
    LocalEffectLabel l = original.components.at(system_order[ni]);
    if (!l.is_unit()) {
      const auto& order = measurement_order[ni];
      l.measurement = static_cast<int>(std::find(order.begin(), order.end(), l.measurement) - order.begin());
    }
    out.components[ni] = l;
  }
  return out;
}

JointEffectLabel CanonicalRelabelling::to_original(const JointEffectLabel& canonical) const {
  JointEffectLabel out;
  out.components.resize(system_order.size());
  for (std::size_t ni = 0; ni < system_order.size(); ++ni) {
    LocalEffectLabel l = canonical.components.at(ni);
    if (!l.is_unit()) l.measurement = measurement_order[ni].at(l.measurement);
    out.components[system_order[ni]] = l;
  }
  return out;
}

Assignment CanonicalRelabelling::to_original(const Assignment& canonical) const {
  Assignment out;
  out.outcomes.resize(system_order.size());
  for (std::size_t ni = 0; ni < system_order.size(); ++ni) {
    const auto& order = measurement_order[ni];
    std::vector<int> outs(order.size());
    for (std::size_t nx = 0; nx < order.size(); ++nx) outs[order[nx]] = canonical.outcomes.at(ni).at(nx);
    out.outcomes[system_order[ni]] = std::move(outs);
  }
  return out;
}

CanonicalForm canonical_sort(const MultiSpec& multi) {
  CanonicalRelabelling rec;
  std::vector<std::vector<int>> sorted_counts;
  for (const auto& s : multi.systems()) {
    std::vector<int> order(s.measurements());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return s.outcomes(a) < s.outcomes(b); });
    std::vector<int> counts;
    for (int x : order) counts.push_back(s.outcomes(x));
    rec.measurement_order.push_back(order);
    sorted_counts.push_back(counts);
  }
  std::vector<int> sys(multi.size());
  std::iota(sys.begin(), sys.end(), 0);
  std::stable_sort(sys.begin(), sys.end(), [&](int a, int b) {
    // Front element first, then the full list.
    if (sorted_counts[a].front() != sorted_counts[b].front())
      return sorted_counts[a].front() < sorted_counts[b].front();
    return sorted_counts[a] < sorted_counts[b];
  });
  std::vector<SystemSpec> systems;
  std::vector<std::vector<int>> morder;
  for (int i : sys) {
    systems.emplace_back(sorted_counts[i]);
    morder.push_back(rec.measurement_order[i]);
  }
  rec.system_order = sys;
  rec.measurement_order = std::move(morder);
  return {MultiSpec(std::move(systems)), std::move(rec)};
}

bool is_canonical(const MultiSpec& multi) { return canonical_sort(multi).relabelling.is_identity(); }

bool same_type(const SystemSpec& a, const SystemSpec& b) {
  auto ka = a.outcome_counts();
  auto kb = b.outcome_counts();
  std::sort(ka.begin(), ka.end());
  std::sort(kb.begin(), kb.end());
  return ka == kb;
}

}  // namespace boxworld
