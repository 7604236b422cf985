#include <boxworld/errors.hpp>
#include <boxworld/label_text.hpp>
#include <boxworld/witness.hpp>

#include <algorithm>
#include <span>

namespace boxworld {

std::string to_string(WitnessMode mode) {
  return mode == WitnessMode::kSmallSet ? "small-set" : "filled-measurement";
}

WitnessMode witness_mode_from_string(const std::string& text) {
  if (text == "small-set") return WitnessMode::kSmallSet;
  if (text == "filled-measurement") return WitnessMode::kFilledMeasurement;
  throw InvalidWitnessProblem("unknown witness mode '" + text + "' (expected small-set or filled-measurement)");
}

namespace {

using Term = std::vector<LocalEffectLabel>;

// First system (in order) whose avoid components are one full measurement,
// each outcome exactly once. Checked on local vectors.
std::optional<int> filled_system(const FiducialFrame& frame, const Decomposition& avoid) {
  const auto& multi = frame.multi();
  for (int i = 0; i < multi.size(); ++i) {
    VectorQ sum = VectorQ::Zero(multi.system(i).dimension());
    for (auto t : avoid.terms)
      sum += local_effect_vector(multi.system(i), frame.alphabet().label(t).components[i]).coords;
    if (sum == local_effect_vector(multi.system(i), LocalEffectLabel::unit()).coords) return i;
  }
  return std::nullopt;
}

std::optional<std::string> problem_error(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                         const WitnessProblem& p) {
  const auto& multi = frame.multi();
  if (p.target >= frame.label_count()) return "target index out of range";
  for (auto t : p.avoid.terms)
    if (t >= frame.label_count()) return "avoid index out of range";
  if (std::binary_search(p.avoid.terms.begin(), p.avoid.terms.end(), p.target))
    return "target belongs to the avoid set";
  if (p.avoid.terms.size() > 24) return "avoid set too large for the cover check";
  if (p.mode == WitnessMode::kSmallSet &&
      p.avoid.size() > static_cast<std::size_t>(multi.system(0).outcomes(0)))
    return "avoid set has " + std::to_string(p.avoid.size()) + " terms, more than K^(1)_1 = " +
           std::to_string(multi.system(0).outcomes(0));
  if (auto covered = covered_subunits(frame, catalog, p.avoid); !covered.empty())
    return "avoid set covers the sub-unit effect " + format_label(catalog.label(covered.front()));
  if (p.mode == WitnessMode::kFilledMeasurement && !filled_system(frame, p.avoid))
    return "no system on which the avoid components sum to the unit";
  return std::nullopt;
}

void require_frame(const FiducialFrame& frame, const char* op) {
  frame.multi().require_nonclassical(op);
  if (!is_canonical(frame.multi())) throw InvalidWitnessProblem(std::string(op) + ": spec is not canonically sorted");
}

int first_unused(const std::vector<LocalEffectLabel>& used, int measurement, int outcomes) {
  for (int a = 0; a < outcomes; ++a)
    if (std::find(used.begin(), used.end(), LocalEffectLabel::fiducial(measurement, a)) == used.end()) return a;
  return -1;
}

bool filled_by(const std::vector<LocalEffectLabel>& used, int measurement, int outcomes) {
  return first_unused(used, measurement, outcomes) < 0;
}

// Recursion over `systems` (a suffix of the ordered systems). Terms and the
// target hold one component per entry of `systems`.
void small_set_rec(const MultiSpec& multi, std::span<const int> systems, const std::vector<Term>& avoid,
                   std::span<const LocalEffectLabel> f, Assignment& out) {
  const int sys = systems.front();
  const auto& spec = multi.system(sys);
  auto& local = out.outcomes[sys];
  local.assign(spec.measurements(), -1);
  local[f[0].measurement] = f[0].outcome;

  std::vector<LocalEffectLabel> used;
  for (const auto& t : avoid) used.push_back(t[0]);

  std::optional<int> filled;
  for (int x = 0; x < spec.measurements() && !filled; ++x)
    if (x != f[0].measurement && filled_by(used, x, spec.outcomes(x))) filled = x;

  if (systems.size() == 1) {
    if (filled) throw ConstructionBug("witness: last system has a measurement filled by the avoid set");
    for (int x = 0; x < spec.measurements(); ++x)
      if (x != f[0].measurement) local[x] = first_unused(used, x, spec.outcomes(x));
    return;
  }

  std::vector<Term> next;
  if (!filled) {
    for (int x = 0; x < spec.measurements(); ++x)
      if (x != f[0].measurement) local[x] = first_unused(used, x, spec.outcomes(x));
    for (const auto& t : avoid)
      if (t[0] == f[0]) next.emplace_back(t.begin() + 1, t.end());
  } else {
    const int xp = *filled;
    // A filled measurement takes all K_{x'} >= |avoid| terms, one per outcome.
    if (avoid.size() != static_cast<std::size_t>(spec.outcomes(xp)))
      throw ConstructionBug("witness: filled measurement with repeated or extra terms");
    std::optional<std::size_t> chosen;
    for (int a = 0; a < spec.outcomes(xp) && !chosen; ++a)
      for (std::size_t k = 0; k < avoid.size(); ++k)
        if (avoid[k][0] == LocalEffectLabel::fiducial(xp, a) &&
            !std::equal(avoid[k].begin() + 1, avoid[k].end(), f.begin() + 1)) {
          chosen = k;
          break;
        }
    if (!chosen) throw ConstructionBug("witness: filled measurement but avoid covers a sub-unit effect");
    for (int x = 0; x < spec.measurements(); ++x)
      if (x != f[0].measurement) local[x] = 0;
    local[xp] = avoid[*chosen][0].outcome;
    next.emplace_back(avoid[*chosen].begin() + 1, avoid[*chosen].end());
  }
  small_set_rec(multi, systems.subspan(1), next, f.subspan(1), out);
}

std::vector<Term> restrict_terms(const FiducialFrame& frame, const std::vector<std::size_t>& terms,
                                 const std::vector<int>& systems) {
  std::vector<Term> out;
  for (auto t : terms) {
    const auto label = frame.alphabet().label(t);
    Term term;
    for (int i : systems) term.push_back(label.components[i]);
    out.push_back(std::move(term));
  }
  return out;
}

Assignment finish(const FiducialFrame& frame, const WitnessProblem& p, Assignment out) {
  if (!witness_holds(frame, p.avoid, p.target, out))
    throw ConstructionBug("witness " + format_assignment(out) + " fails evaluation");
  return out;
}

}  // namespace

std::optional<std::string> witness_problem_error(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                                 const WitnessProblem& problem) {
  return problem_error(frame, catalog, problem);
}

std::optional<std::string> witness_problem_error(const FiducialFrame& frame, const WitnessProblem& problem) {
  return problem_error(frame, SubunitCatalog(frame), problem);
}

void validate(const FiducialFrame& frame, const SubunitCatalog& catalog, const WitnessProblem& problem) {
  if (auto err = problem_error(frame, catalog, problem)) throw InvalidWitnessProblem(*err);
}

void validate(const FiducialFrame& frame, const WitnessProblem& problem) { validate(frame, SubunitCatalog(frame), problem); }

Assignment small_set_witness(const FiducialFrame& frame, const WitnessProblem& problem) {
  return small_set_witness(frame, SubunitCatalog(frame), problem);
}

Assignment small_set_witness(const FiducialFrame& frame, const SubunitCatalog& catalog, const WitnessProblem& problem) {
  require_frame(frame, "small-set witness");
  validate(frame, catalog, problem);
  const auto& multi = frame.multi();
  std::vector<int> systems(multi.size());
  for (int i = 0; i < multi.size(); ++i) systems[i] = i;
  const auto f = frame.alphabet().label(problem.target);
  Assignment out;
  out.outcomes.resize(multi.size());
  small_set_rec(multi, systems, restrict_terms(frame, problem.avoid.terms, systems), f.components, out);
  return finish(frame, problem, std::move(out));
}

Assignment filled_measurement_witness(const FiducialFrame& frame, const WitnessProblem& problem) {
  return filled_measurement_witness(frame, SubunitCatalog(frame), problem);
}

Assignment filled_measurement_witness(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                      const WitnessProblem& problem) {
  require_frame(frame, "filled-measurement witness");
  validate(frame, catalog, problem);
  const auto& multi = frame.multi();
  const int i = *filled_system(frame, problem.avoid);
  const auto& spec = multi.system(i);
  const auto f = frame.alphabet().label(problem.target);
  const auto avoid = labels_of(frame, problem.avoid);

  // The unit is reached only by one full measurement, each outcome once.
  const int xp = avoid.front().components[i].measurement;
  std::vector<int> seen(spec.outcomes(xp), 0);
  for (const auto& t : avoid) {
    const auto c = t.components[i];
    if (c.measurement != xp || seen[c.outcome]++)
      throw ConstructionBug("witness: local unit reached without a single full measurement");
  }
  if (avoid.size() != seen.size()) throw ConstructionBug("witness: filled measurement has extra terms");

  std::vector<int> others;
  for (int j = 0; j < multi.size(); ++j)
    if (j != i) others.push_back(j);
  auto restrict = [&](const JointEffectLabel& l) {
    Term t;
    for (int j : others) t.push_back(l.components[j]);
    return t;
  };

  const auto fi = f.components[i];
  Assignment out;
  out.outcomes.resize(multi.size());
  auto& local = out.outcomes[i];
  local.assign(spec.measurements(), 0);
  local[fi.measurement] = fi.outcome;

  std::optional<std::size_t> chosen;
  if (xp == fi.measurement) {
    // Only the term with f's outcome survives on system i.
    for (std::size_t k = 0; k < avoid.size(); ++k)
      if (avoid[k].components[i] == fi) chosen = k;
  } else {
    for (int a = 0; a < spec.outcomes(xp) && !chosen; ++a)
      for (std::size_t k = 0; k < avoid.size(); ++k)
        if (avoid[k].components[i].outcome == a && restrict(avoid[k]) != restrict(f)) {
          chosen = k;
          break;
        }
    if (!chosen) throw ConstructionBug("witness: every avoid term matches the target off the filled system");
    local[xp] = avoid[*chosen].components[i].outcome;
  }
  const Term ft = restrict(f);
  small_set_rec(multi, others, {restrict(avoid[*chosen])}, ft, out);
  return finish(frame, problem, std::move(out));
}

Assignment construct_witness(const FiducialFrame& frame, const SubunitCatalog& catalog, const WitnessProblem& problem) {
  return problem.mode == WitnessMode::kSmallSet ? small_set_witness(frame, catalog, problem)
                                                 : filled_measurement_witness(frame, catalog, problem);
}

Assignment construct_witness(const FiducialFrame& frame, const WitnessProblem& problem) {
  return construct_witness(frame, SubunitCatalog(frame), problem);
}

std::optional<Assignment> brute_force_witness(const FiducialFrame& frame, const Decomposition& avoid,
                                              std::size_t target) {
  // The hit table holds the exact evaluations, which are 0 or 1 on pure states.
  for (std::size_t s = 0; s < frame.state_count(); ++s) {
    if (!frame.hit(target, s)) continue;
    if (std::none_of(avoid.terms.begin(), avoid.terms.end(), [&](std::size_t t) { return frame.hit(t, s); }))
      return frame.assignments()[s];
  }
  return std::nullopt;
}

bool witness_holds(const FiducialFrame& frame, const Decomposition& avoid, std::size_t target,
                   const Assignment& assignment) {
  validate(frame.multi(), assignment);
  const auto& state = frame.state(frame.state_index(assignment));
  if (!hits(frame.vector(target), state)) return false;
  for (auto t : avoid.terms)
    if (evaluate(frame.vector(t), state) != 0) return false;
  return true;
}

}  // namespace boxworld
