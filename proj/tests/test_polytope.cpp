#include <boxworld/double_description.hpp>
#include <boxworld/errors.hpp>
#include <boxworld/linalg.hpp>
#include <boxworld/polytope.hpp>

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace boxworld;

namespace {

LocalEffectLabel X(int a, int x) { return LocalEffectLabel::fiducial(x - 1, a - 1); }
const LocalEffectLabel U = LocalEffectLabel::unit();

bool lex_less(const StateVector& a, const StateVector& b) {
  return std::lexicographical_compare(a.coords.begin(), a.coords.end(), b.coords.begin(), b.coords.end());
}

// Oracle: a vertex is the unique solution of the unit equality plus dim-1
// tight inequalities. Tries every subset of inequalities.
std::vector<StateVector> brute_force_vertices(const StatePolytope& p) {
  const auto& ineq = p.inequalities();
  const Eigen::Index dim = p.ambient_dimension();
  const Eigen::Index m = ineq.rows();
  std::vector<StateVector> out;
  std::vector<bool> pick(m, false);
  std::fill(pick.begin(), pick.begin() + (dim - 1), true);
  do {
    MatrixQ a(dim, dim);
    VectorQ b = VectorQ::Zero(dim);
    a.row(0) = p.equality().coords.transpose();
    b(0) = 1;
    Eigen::Index row = 1;
    for (Eigen::Index r = 0; r < m; ++r)
      if (pick[r]) a.row(row++) = ineq.row(r);
    auto s = linalg::solve(a, b);
    if (s && membership(p, StateVector{*s})) out.push_back({*s});
  } while (std::prev_permutation(pick.begin(), pick.end()));
  std::sort(out.begin(), out.end(), lex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TEST_CASE("polytope H-representation sizes") {
  auto single = build_polytope(MultiSpec::from_counts({{2, 2}}));
  CHECK(single.inequality_count() == 4);
  CHECK(single.ambient_dimension() == 3);
  auto bi = build_polytope(MultiSpec::from_counts({{2, 2}, {2, 2}}));
  CHECK(bi.inequality_count() == 16);
  CHECK(bi.ambient_dimension() == 9);
  auto s23 = build_polytope(MultiSpec::from_counts({{2, 3}}));
  CHECK(s23.inequality_count() == 5);
  CHECK(s23.ambient_dimension() == 4);
}

TEST_CASE("marginal self-test covers normalization and no-signaling identities") {
  // single (2,2): 4 fiducial marginals + 2 normalization identities (one per measurement)
  CHECK(verify_marginal_identities(MultiSpec::from_counts({{2, 2}})) == 6);
  // bipartite (2,2)^2: (4 + 2) per system, squared
  CHECK(verify_marginal_identities(MultiSpec::from_counts({{2, 2}, {2, 2}})) == 36);
}

TEST_CASE("membership") {
  auto multi = MultiSpec::from_counts({{2, 2}, {2, 2}});
  auto p = build_polytope(multi);
  VectorQ mix = VectorQ::Zero(9);
  const auto states = enumerate_pure_product_states(multi);
  for (const auto& a : states) {
    const auto s = pure_product_state(multi, a);
    CHECK(membership(p, s));
    mix += s.coords;
  }
  mix /= Rational(static_cast<long>(states.size()));
  CHECK(membership(p, StateVector{mix}));
  CHECK(mix == maximally_mixed_state(multi).coords);
  CHECK_FALSE(membership(p, StateVector{VectorQ::Zero(9)}));
  CHECK_THROWS_AS(membership(p, StateVector{VectorQ::Zero(3)}), DimensionError);
}

TEST_CASE("vertex enumeration matches the brute-force oracle") {
  for (const auto& counts : std::vector<std::vector<std::vector<int>>>{{{2, 2}}, {{2, 3}}, {{3, 3}}, {{2, 2, 2}}}) {
    auto multi = MultiSpec::from_counts(counts);
    auto p = build_polytope(multi);
    const auto& v = enumerate_vertices(p);
    CHECK(v == brute_force_vertices(p));
    // On single systems the vertices are exactly the pure states.
    std::vector<StateVector> pure;
    for (const auto& a : enumerate_pure_product_states(multi)) pure.push_back(pure_product_state(multi, a));
    std::sort(pure.begin(), pure.end(), lex_less);
    CHECK(v == pure);
  }
  auto p23 = build_polytope(MultiSpec::from_counts({{2, 3}}));
  CHECK(enumerate_vertices(p23).size() == 6);
  auto p22 = build_polytope(MultiSpec::from_counts({{2, 2}}));
  CHECK(enumerate_vertices(p22).size() == 4);
}

TEST_CASE("bipartite (2,2)^2 vertices") {
  auto multi = MultiSpec::from_counts({{2, 2}, {2, 2}});
  auto p = build_polytope(multi);
  BudgetMeter meter;
  const auto& v = enumerate_vertices(p, meter);
  CHECK(v.size() == 24);
  CHECK(v == brute_force_vertices(p));
  CHECK(p.has_vertices());
  CHECK(&enumerate_vertices(p) == &v);

  FiducialFrame frame(multi);
  std::set<std::size_t> pure_found;
  int nonproduct = 0;
  for (const auto& vertex : v) {
    bool is_pure = false;
    for (std::size_t s = 0; s < frame.state_count(); ++s)
      if (frame.state(s) == vertex) is_pure = true, pure_found.insert(s);
    if (is_pure) continue;
    ++nonproduct;
    for (std::size_t l = 0; l < frame.label_count(); ++l) {
      const Rational q = evaluate(frame.vector(l), vertex);
      CHECK((q == 0 || q == Rational(1, 2)));
    }
  }
  CHECK(pure_found.size() == 16);
  CHECK(nonproduct == 8);
}

TEST_CASE("allowed effects") {
  auto multi = MultiSpec::from_counts({{2, 2}, {2, 2}});
  auto p = build_polytope(multi);
  FiducialFrame frame(multi);
  for (std::size_t l = 0; l < frame.label_count(); ++l) CHECK(is_allowed_effect(p, frame.vector(l)));
  CHECK(is_allowed_effect(p, unit_effect(multi)));
  const auto e = joint_effect_vector(multi, {{X(1, 1), U}});
  CHECK_FALSE(is_allowed_effect(p, EffectVector{Rational(2) * e.coords}));
  CHECK_FALSE(is_allowed_effect(p, EffectVector{-e.coords}));
}

TEST_CASE("ray budget is enforced") {
  auto p = build_polytope(MultiSpec::from_counts({{2, 2}, {2, 2}}));
  Budget tight;
  tight.max_rays = 10;
  BudgetMeter meter(tight);
  CHECK_THROWS_AS(enumerate_vertices(p, meter), ResourceBudgetExceeded);
  CHECK_FALSE(p.has_vertices());
}

TEST_CASE("vertex hull reproduces membership on random points") {
  // Facets of conv(vertices) come from the dual cone {a : <a, v> >= 0 for all v}.
  auto multi = MultiSpec::from_counts({{2, 2}, {2, 2}});
  auto p = build_polytope(multi);
  const auto& verts = enumerate_vertices(p);
  MatrixQ vmat(static_cast<Eigen::Index>(verts.size()), p.ambient_dimension());
  for (std::size_t k = 0; k < verts.size(); ++k) vmat.row(static_cast<Eigen::Index>(k)) = verts[k].coords.transpose();
  BudgetMeter meter;
  const auto facets = extreme_rays<Rational>(vmat, meter);
  CHECK(facets.size() == 16);

  auto in_hull = [&](const VectorQ& x) {
    if (p.equality().coords.dot(x) != 1) return false;
    return std::all_of(facets.begin(), facets.end(), [&](const auto& f) { return f.direction.dot(x) >= 0; });
  };

  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(verts.size()) - 1);
  std::uniform_int_distribution<int> weight(0, 6);
  std::uniform_int_distribution<int> noise(-3, 3);
  int inside = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    VectorQ x = VectorQ::Zero(p.ambient_dimension());
    Rational total = 0;
    for (int k = 0; k < 3; ++k) {
      const int w = weight(rng) + 1;
      x += Rational(w) * verts[pick(rng)].coords;
      total += w;
    }
    x /= total;
    if (trial % 2 == 1) {
      // Perturb, then re-normalize along the unit direction.
      for (Eigen::Index c = 1; c < x.size(); ++c) x(c) += Rational(noise(rng), 8);
      x(0) = 1;
    }
    const bool h = membership(p, StateVector{x});
    CHECK(h == in_hull(x));
    inside += h;
  }
  CHECK(inside > 5000);
  CHECK(inside < 10000);
}
