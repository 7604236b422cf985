#include <boxworld/dynamics.hpp>
#include <boxworld/errors.hpp>

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace boxworld;

namespace {

LocalEffectLabel X(int a, int x) { return LocalEffectLabel::fiducial(x - 1, a - 1); }

std::size_t idx(const FiducialFrame& frame, const JointEffectLabel& l) { return frame.alphabet().index(l); }

// All bijections of the alphabet that pass is_allowed_reversible; no pruning.
std::vector<EffectPermutation> brute_force_reversible(const TransformFrame& tf) {
  auto p = EffectPermutation::identity(tf.label_count());
  std::vector<EffectPermutation> out;
  do {
    if (is_allowed_reversible(tf, p)) out.push_back(p);
  } while (std::next_permutation(p.image.begin(), p.image.end()));
  return out;
}

std::vector<EffectPermutation> trivial_permutations(const FiducialFrame& frame) {
  std::vector<EffectPermutation> out;
  for (const auto& e : generate_trivial_group(frame)) out.push_back(e.permutation);
  return out;
}

EffectPermutation system_swap(const FiducialFrame& frame) {
  TrivialForm form{{1, 0}, {}};
  for (int i = 0; i < 2; ++i) {
    const auto& spec = frame.multi().system(i);
    LocalRelabelling q;
    for (int x = 0; x < spec.measurements(); ++x) {
      q.measurement_map.push_back(x);
      q.outcome_map.emplace_back(spec.outcomes(x));
      std::iota(q.outcome_map.back().begin(), q.outcome_map.back().end(), 0);
    }
    form.local.push_back(q);
  }
  return apply(frame, form);
}

void check_hamming_one(const FiducialFrame& frame, const EffectPermutation& p) {
  const auto& a = frame.alphabet();
  for (std::size_t l = 0; l < p.size(); ++l)
    for (std::size_t m = l + 1; m < p.size(); ++m)
      if (hamming_distance(a.label(l), a.label(m)) == 1) REQUIRE(hamming_distance(a.label(p(l)), a.label(p(m))) == 1);
}

}  // namespace

TEST_CASE("hamming distance") {
  const JointEffectLabel a{{X(1, 1), X(1, 1)}};
  CHECK(hamming_distance(a, a) == 0);
  CHECK(hamming_distance(a, JointEffectLabel{{X(1, 1), X(2, 2)}}) == 1);
  CHECK(hamming_distance(a, JointEffectLabel{{X(2, 1), X(1, 2)}}) == 2);
  CHECK_THROWS_AS(hamming_distance(a, JointEffectLabel{{X(1, 1)}}), DimensionError);
}

TEST_CASE("linear extensions") {
  FiducialFrame frame(MultiSpec::from_counts({{2, 2}}));
  TransformFrame tf(frame);
  const auto id = linear_extension(tf, EffectPermutation::identity(4));
  REQUIRE(id);
  CHECK(id->adjoint == MatrixQ::Identity(3, 3));

  EffectPermutation swap{{idx(frame, {{X(2, 1)}}), idx(frame, {{X(1, 1)}}), idx(frame, {{X(1, 2)}}), idx(frame, {{X(2, 2)}})}};
  CHECK(linear_extension(tf, swap));
  CHECK(is_allowed_reversible(tf, swap));

  // X[1|1] -> X[1|2] -> X[2|1] -> X[2|2] -> X[1|1] keeps the only relation
  // X[1|1] + X[2|1] = X[1|2] + X[2|2], so it extends; it is the measurement
  // swap followed by an outcome swap.
  EffectPermutation cycle;
  cycle.image.resize(4);
  cycle.image[idx(frame, {{X(1, 1)}})] = idx(frame, {{X(1, 2)}});
  cycle.image[idx(frame, {{X(1, 2)}})] = idx(frame, {{X(2, 1)}});
  cycle.image[idx(frame, {{X(2, 1)}})] = idx(frame, {{X(2, 2)}});
  cycle.image[idx(frame, {{X(2, 2)}})] = idx(frame, {{X(1, 1)}});
  CHECK(linear_extension(tf, cycle));
  CHECK(is_allowed_reversible(tf, cycle));
  const auto group = trivial_permutations(frame);
  CHECK(std::binary_search(group.begin(), group.end(), cycle));

  // A transposition breaks the relation.
  EffectPermutation transposition = EffectPermutation::identity(4);
  std::swap(transposition.image[0], transposition.image[2]);
  CHECK_FALSE(linear_extension(tf, transposition));
  CHECK_FALSE(is_allowed_reversible(tf, transposition));
}

TEST_CASE("trivial group sizes") {
  CHECK(generate_trivial_group(FiducialFrame(MultiSpec::from_counts({{2, 2}}))).size() == 8);
  CHECK(generate_trivial_group(FiducialFrame(MultiSpec::from_counts({{2, 3}}))).size() == 12);
  CHECK(generate_trivial_group(FiducialFrame(MultiSpec::from_counts({{3, 3}}))).size() == 72);
  CHECK(generate_trivial_group(FiducialFrame(MultiSpec::from_counts({{2, 2}, {2, 2}}))).size() == 128);
  CHECK(trivial_group_order(MultiSpec::from_counts({{2, 2, 3}, {2, 3, 2}})) == 2 * (2 * 2 * 2 * 6) * (2 * 2 * 2 * 6));
  CHECK(generate_trivial_group(FiducialFrame(MultiSpec::from_counts({{2, 2, 3}, {2, 3, 2}}))).size() == 4608);
  CHECK_THROWS_AS(generate_trivial_group(FiducialFrame(MultiSpec::from_counts({{2}}))), ClassicalSystemUnsupported);
}

TEST_CASE("pruned enumeration equals exhaustive search on single systems") {
  for (const auto& counts : std::vector<std::vector<std::vector<int>>>{{{2, 2}}, {{2, 3}}, {{3, 3}}, {{2, 2, 2}}}) {
    FiducialFrame frame(MultiSpec::from_counts(counts));
    TransformFrame tf(frame);
    BudgetMeter meter;
    const auto found = enumerate_reversible(tf, meter);
    CHECK(found == brute_force_reversible(tf));
    CHECK(found == trivial_permutations(frame));
  }
}

TEST_CASE("generated trivial elements are allowed and decompose back") {
  for (const auto& counts : std::vector<std::vector<std::vector<int>>>{{{2, 3}}, {{2, 2}, {2, 2}}, {{2, 2}, {2, 3}}}) {
    FiducialFrame frame(MultiSpec::from_counts(counts));
    TransformFrame tf(frame);
    for (const auto& e : generate_trivial_group(frame)) {
      REQUIRE(is_allowed_reversible(tf, e.permutation));
      const auto form = decompose_trivial(frame, e.permutation);
      REQUIRE(form);
      CHECK(*form == e.form);
      CHECK(apply(frame, *form) == e.permutation);
    }
  }
}

TEST_CASE("bipartite enumeration: closure, hamming distance, decomposition") {
  FiducialFrame frame(MultiSpec::from_counts({{2, 2}, {2, 2}}));
  TransformFrame tf(frame);
  BudgetMeter meter;
  const auto found = enumerate_reversible(tf, meter);
  REQUIRE(found.size() == 128);
  CHECK(found == trivial_permutations(frame));
  const std::set<EffectPermutation> set(found.begin(), found.end());
  for (const auto& p : found) {
    check_hamming_one(frame, p);
    CHECK(set.count(inverse(p)));
    for (const auto& q : found) REQUIRE(set.count(compose(p, q)));
  }
  int swapping = 0;
  for (const auto& p : found) {
    const auto form = decompose_trivial(frame, p);
    REQUIRE(form);
    swapping += form->swaps_systems();
  }
  CHECK(swapping == 64);

  const auto id = decompose_trivial(frame, EffectPermutation::identity(16));
  REQUIRE(id);
  CHECK_FALSE(id->swaps_systems());
  const auto swap = decompose_trivial(frame, system_swap(frame));
  REQUIRE(swap);
  CHECK(swap->system_permutation == std::vector<int>{1, 0});
  CHECK(swap->local[0].measurement_map == std::vector<int>{0, 1});
}

TEST_CASE("non-trivial permutations are rejected") {
  FiducialFrame frame(MultiSpec::from_counts({{2, 2}, {2, 2}}));
  TransformFrame tf(frame);
  SubunitCatalog catalog(frame);
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t b = a + 1; b < 16; ++b) {
      auto p = EffectPermutation::identity(16);
      std::swap(p.image[a], p.image[b]);
      CHECK_FALSE(is_allowed_reversible(tf, p));
      CHECK_FALSE(decompose_trivial(frame, p));
      // Some sub-unit effect is sent to something that is not one.
      CHECK_FALSE(verify_subunit_images(frame, catalog, p).passed());
    }
  std::mt19937 rng(3);
  for (int k = 0; k < 200; ++k) {
    auto p = EffectPermutation::identity(16);
    std::shuffle(p.image.begin(), p.image.end(), rng);
    CHECK(is_allowed_reversible(tf, p) == static_cast<bool>(decompose_trivial(frame, p)));
  }
}

TEST_CASE("sub-unit images and structural properties") {
  FiducialFrame frame(MultiSpec::from_counts({{2, 2}, {2, 2}}));
  SubunitCatalog catalog(frame);
  const auto swap = system_swap(frame);
  auto report = verify_subunit_images(frame, catalog, swap);
  CHECK(report.passed());
  for (const auto& r : report.records)
    if (r.check == "subunit-image") CHECK(r.details["unit_system"] != r.details["image_unit_system"]);

  CHECK_THROWS_AS(verify_structural_properties(frame, catalog, swap, SystemSubset{{0}}), PreconditionNotMet);
  CHECK(verify_structural_properties(frame, catalog, swap, SystemSubset::all(2)).passed());

  // Outcome swap on measurement 1 of system 1.
  TrivialForm local{{0, 1}, {{{0, 1}, {{1, 0}, {0, 1}}}, {{0, 1}, {{0, 1}, {0, 1}}}}};
  const auto relabel = apply(frame, local);
  report = verify_subunit_images(frame, catalog, relabel);
  CHECK(report.passed());
  for (const auto& r : report.records)
    if (r.check == "subunit-image") CHECK(r.details["unit_system"] == r.details["image_unit_system"]);
  report = verify_structural_properties(frame, catalog, relabel, SystemSubset{{0}});
  CHECK(report.passed());
  CHECK(report.summary["pairs"] == 120);

  FiducialFrame mixed(MultiSpec::from_counts({{2, 2}, {3, 3}}));
  SubunitCatalog mixed_catalog(mixed);
  for (const auto& e : generate_trivial_group(mixed)) {
    REQUIRE(verify_subunit_images(mixed, mixed_catalog, e.permutation).passed());
    REQUIRE(verify_structural_properties(mixed, mixed_catalog, e.permutation, SystemSubset{{0}}).passed());
  }
}

TEST_CASE("classification report") {
  FiducialFrame frame(MultiSpec::from_counts({{2, 2}, {2, 2}}));
  TransformFrame tf(frame);
  BudgetMeter meter;
  const auto report = verify_classification(tf, meter);
  CHECK(report.passed());
  CHECK(report.summary["reversible_found"] == 128);
  CHECK(report.summary["trivial_group_size"] == 128);
  CHECK(report.summary["system_swapping"] == 64);
  CHECK(report.search_nodes > 0);

  Budget small;
  small.max_nodes = 100;
  BudgetMeter tight(small);
  CHECK_THROWS_AS(verify_classification(tf, tight), ResourceBudgetExceeded);
  CHECK_THROWS_AS(TransformFrame(FiducialFrame(MultiSpec::from_counts({{2}, {2, 2}}))).multi().require_nonclassical("x"),
                  ClassicalSystemUnsupported);
}
