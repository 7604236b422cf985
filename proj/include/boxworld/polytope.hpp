#pragma once

#include <boxworld/budget.hpp>
#include <boxworld/representation.hpp>

#include <memory>
#include <optional>
#include <vector>

namespace boxworld {

/// The allowed joint states: <unit, s> = 1 and <f_t, s> >= 0 for every joint
/// fiducial effect f_t, in the tensor coordinates of representation.hpp.
class StatePolytope {
 public:
  const MultiSpec& multi() const { return multi_; }
  Eigen::Index ambient_dimension() const { return inequalities_.cols(); }
  /// One row per joint fiducial label, in alphabet order.
  const MatrixQ& inequalities() const { return inequalities_; }
  const EffectVector& equality() const { return unit_; }
  std::size_t inequality_count() const { return static_cast<std::size_t>(inequalities_.rows()); }

  bool has_vertices() const { return vertices_ != nullptr; }
  /// Cached vertex list; empty until enumerate_vertices has run.
  const std::vector<StateVector>& cached_vertices() const;

 private:
  friend StatePolytope build_polytope(const MultiSpec& multi);
  friend const std::vector<StateVector>& enumerate_vertices(StatePolytope& p, BudgetMeter& meter);

  explicit StatePolytope(MultiSpec multi) : multi_(std::move(multi)) {}

  MultiSpec multi_;
  MatrixQ inequalities_;
  EffectVector unit_;
  std::shared_ptr<const std::vector<StateVector>> vertices_;
};

/// Builds the H-representation and runs the marginal self-test
/// (verify_marginal_identities), throwing ConstructionBug if it fails.
StatePolytope build_polytope(const MultiSpec& multi);

/// Checks, on the symbolic effect vectors, that every joint measurement's
/// outcome effects sum to the unit and that every marginal functional is
/// independent of the measurement choices it sums over. Returns the number
/// of identities checked.
std::size_t verify_marginal_identities(const MultiSpec& multi);

/// Throws DimensionError on size mismatch.
bool membership(const StatePolytope& p, const StateVector& s);

/// Exact vertex list via double description, sorted lexicographically by
/// coordinates and cached in `p`. Throws ResourceBudgetExceeded.
const std::vector<StateVector>& enumerate_vertices(StatePolytope& p, BudgetMeter& meter);
const std::vector<StateVector>& enumerate_vertices(StatePolytope& p);

/// 0 <= <e, v> <= 1 on every vertex.
bool is_allowed_effect(StatePolytope& p, const EffectVector& e, BudgetMeter& meter);
bool is_allowed_effect(StatePolytope& p, const EffectVector& e);

}  // namespace boxworld
