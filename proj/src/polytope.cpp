#include <boxworld/double_description.hpp>
#include <boxworld/errors.hpp>
#include <boxworld/polytope.hpp>

#include <algorithm>

namespace boxworld {

namespace {

// Calls f(label) for every joint label whose components are each the unit
// or a fiducial label.
template <typename F>
void for_each_mixed_label(const MultiSpec& multi, F&& f) {
  const int n = multi.size();
  JointEffectLabel label{std::vector<LocalEffectLabel>(n)};
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      f(label);
      return;
    }
    label.components[i] = LocalEffectLabel::unit();
    self(self, i + 1);
    const auto& spec = multi.system(i);
    for (int x = 0; x < spec.measurements(); ++x)
      for (int a = 0; a < spec.outcomes(x); ++a) {
        label.components[i] = LocalEffectLabel::fiducial(x, a);
        self(self, i + 1);
      }
  };
  rec(rec, 0);
}

// Odometer step, last digit fastest. Returns false after wrapping around.
bool advance(std::vector<int>& digits, const std::vector<int>& radix) {
  for (std::size_t k = digits.size(); k-- > 0;) {
    if (++digits[k] < radix[k]) return true;
    digits[k] = 0;
  }
  return false;
}

}  // namespace

std::size_t verify_marginal_identities(const MultiSpec& multi) {
  const int n = multi.size();
  std::size_t checked = 0;
  for_each_mixed_label(multi, [&](const JointEffectLabel& marginal) {
    const EffectVector expected = joint_effect_vector(multi, marginal);
    std::vector<int> open;
    for (int i = 0; i < n; ++i)
      if (marginal.components[i].is_unit()) open.push_back(i);

    // Every measurement choice on the summed-over systems must give the same marginal.
    std::vector<int> choice(open.size(), 0), choice_radix;
    for (int i : open) choice_radix.push_back(multi.system(i).measurements());
    do {
      std::vector<int> outcome(open.size(), 0), outcome_radix;
      for (std::size_t k = 0; k < open.size(); ++k) outcome_radix.push_back(multi.system(open[k]).outcomes(choice[k]));
      EffectVector sum = zero_effect(multi);
      do {
        JointEffectLabel full = marginal;
        for (std::size_t k = 0; k < open.size(); ++k)
          full.components[open[k]] = LocalEffectLabel::fiducial(choice[k], outcome[k]);
        sum.coords += joint_effect_vector(multi, full).coords;
      } while (advance(outcome, outcome_radix));
      if (!(sum == expected))
        throw ConstructionBug("marginal identity fails for " + std::to_string(open.size()) +
                              " summed systems");
      ++checked;
    } while (advance(choice, choice_radix));
  });
  return checked;
}

StatePolytope build_polytope(const MultiSpec& multi) {
  verify_marginal_identities(multi);
  StatePolytope p(multi);
  FiducialAlphabet alphabet(multi);
  p.inequalities_.resize(static_cast<Eigen::Index>(alphabet.size()), multi.joint_dimension());
  for (std::size_t l = 0; l < alphabet.size(); ++l)
    p.inequalities_.row(static_cast<Eigen::Index>(l)) = joint_effect_vector(multi, alphabet.label(l)).coords.transpose();
  p.unit_ = unit_effect(multi);
  return p;
}

const std::vector<StateVector>& StatePolytope::cached_vertices() const {
  static const std::vector<StateVector> empty;
  return vertices_ ? *vertices_ : empty;
}

bool membership(const StatePolytope& p, const StateVector& s) {
  if (s.coords.size() != p.ambient_dimension())
    throw DimensionError("state has dimension " + std::to_string(s.coords.size()) + ", polytope has " +
                         std::to_string(p.ambient_dimension()));
  if (p.equality().coords.dot(s.coords) != 1) return false;
  const VectorQ values = p.inequalities() * s.coords;
  return std::all_of(values.begin(), values.end(), [](const Rational& v) { return v >= 0; });
}

const std::vector<StateVector>& enumerate_vertices(StatePolytope& p, BudgetMeter& meter) {
  if (p.vertices_) return *p.vertices_;
  // Alphabet order is the lexicographic label order, which fixes the insertion order.
  const auto rays = extreme_rays<Rational>(p.inequalities(), meter);
  std::vector<StateVector> vertices;
  vertices.reserve(rays.size());
  for (const auto& r : rays) {
    const Rational scale = p.equality().coords.dot(r.direction);
    if (scale <= 0) throw ConstructionBug("extreme ray of the state cone has nonpositive unit pairing");
    vertices.push_back({r.direction / scale});
  }
  std::sort(vertices.begin(), vertices.end(), [](const StateVector& a, const StateVector& b) {
    return std::lexicographical_compare(a.coords.begin(), a.coords.end(), b.coords.begin(), b.coords.end());
  });
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  p.vertices_ = std::make_shared<const std::vector<StateVector>>(std::move(vertices));
  return *p.vertices_;
}

const std::vector<StateVector>& enumerate_vertices(StatePolytope& p) {
  BudgetMeter meter;
  return enumerate_vertices(p, meter);
}

bool is_allowed_effect(StatePolytope& p, const EffectVector& e, BudgetMeter& meter) {
  if (e.coords.size() != p.ambient_dimension()) throw DimensionError("effect dimension mismatch");
  for (const auto& v : enumerate_vertices(p, meter)) {
    const Rational q = evaluate(e, v);
    if (q < 0 || q > 1) return false;
  }
  return true;
}

bool is_allowed_effect(StatePolytope& p, const EffectVector& e) {
  BudgetMeter meter;
  return is_allowed_effect(p, e, meter);
}

}  // namespace boxworld
