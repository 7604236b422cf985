#include "witness_sweep.hpp"

#include <boxworld/errors.hpp>
#include <boxworld/witness.hpp>

#include <doctest.h>

#include <random>

using namespace boxworld;

namespace {

LocalEffectLabel X(int a, int x) { return LocalEffectLabel::fiducial(x - 1, a - 1); }

std::size_t idx(const FiducialFrame& frame, const JointEffectLabel& l) { return frame.alphabet().index(l); }

WitnessProblem problem(const FiducialFrame& frame, std::initializer_list<JointEffectLabel> avoid,
                       const JointEffectLabel& target, WitnessMode mode) {
  std::vector<std::size_t> terms;
  for (const auto& l : avoid) terms.push_back(idx(frame, l));
  return {make_decomposition(terms), idx(frame, target), mode};
}

}  // namespace

TEST_CASE("single-system base case") {
  FiducialFrame frame(MultiSpec::from_counts({{2, 2}}));
  const auto p = problem(frame, {{{X(1, 1)}}}, {{X(1, 2)}}, WitnessMode::kSmallSet);
  const auto w = small_set_witness(frame, p);
  CHECK(w.outcomes == std::vector<std::vector<int>>{{1, 0}});
}

TEST_CASE("bipartite witnesses through both inductive cases") {
  FiducialFrame frame(MultiSpec::from_counts({{2, 2}, {2, 2}}));
  // Avoid components fill measurement 1 on the first system.
  auto p = problem(frame, {{{X(1, 1), X(1, 1)}}, {{X(2, 1), X(2, 1)}}}, {{X(1, 2), X(1, 1)}}, WitnessMode::kSmallSet);
  CHECK(brute_force_witness(frame, p.avoid, p.target));
  auto w = small_set_witness(frame, p);
  CHECK(witness_holds(frame, p.avoid, p.target, w));
  CHECK(w.outcomes[0][1] == 0);

  p = problem(frame, {{{X(1, 1), X(1, 1)}}}, {{X(1, 1), X(1, 2)}}, WitnessMode::kSmallSet);
  w = small_set_witness(frame, p);
  CHECK(witness_holds(frame, p.avoid, p.target, w));
  CHECK(brute_force_witness(frame, p.avoid, p.target));
}

TEST_CASE("filled-measurement witness") {
  FiducialFrame frame(MultiSpec::from_counts({{2, 2}, {2, 2}}));
  auto p = problem(frame, {{{X(1, 1), X(1, 1)}}, {{X(2, 1), X(1, 2)}}}, {{X(1, 2), X(1, 1)}},
                   WitnessMode::kFilledMeasurement);
  CHECK_FALSE(witness_problem_error(frame, p));
  auto w = filled_measurement_witness(frame, p);
  CHECK(witness_holds(frame, p.avoid, p.target, w));
  CHECK(brute_force_witness(frame, p.avoid, p.target));

  // Target on the filled measurement itself.
  p = problem(frame, {{{X(1, 1), X(1, 1)}}, {{X(2, 1), X(1, 2)}}}, {{X(2, 1), X(2, 2)}},
              WitnessMode::kFilledMeasurement);
  w = filled_measurement_witness(frame, p);
  CHECK(witness_holds(frame, p.avoid, p.target, w));

  // Both terms agree off the first system: they sum to U (x) X[1|1], which
  // the target forces.
  p = problem(frame, {{{X(1, 1), X(1, 1)}}, {{X(2, 1), X(1, 1)}}}, {{X(1, 2), X(1, 1)}},
              WitnessMode::kFilledMeasurement);
  CHECK_THROWS_AS(filled_measurement_witness(frame, p), InvalidWitnessProblem);
  CHECK_FALSE(brute_force_witness(frame, p.avoid, p.target));
}

TEST_CASE("precondition violations") {
  FiducialFrame single(MultiSpec::from_counts({{2, 2}}));
  auto p = problem(single, {{{X(1, 1)}}, {{X(2, 1)}}}, {{X(1, 2)}}, WitnessMode::kSmallSet);
  CHECK_THROWS_AS(small_set_witness(single, p), InvalidWitnessProblem);
  CHECK_FALSE(brute_force_witness(single, p.avoid, p.target));

  p = problem(single, {{{X(1, 1)}}}, {{X(1, 1)}}, WitnessMode::kSmallSet);
  CHECK(witness_problem_error(single, p) == std::string("target belongs to the avoid set"));

  // Three terms exceed K^(1)_1 = 2 but fill measurement 1 on the second system.
  FiducialFrame bi(MultiSpec::from_counts({{2, 2}, {3, 3}}));
  p = problem(bi, {{{X(1, 1), X(1, 1)}}, {{X(1, 2), X(2, 1)}}, {{X(1, 1), X(3, 1)}}}, {{X(1, 2), X(1, 2)}},
              WitnessMode::kSmallSet);
  CHECK_THROWS_AS(construct_witness(bi, p), InvalidWitnessProblem);
  p.mode = WitnessMode::kFilledMeasurement;
  CHECK_NOTHROW(construct_witness(bi, p));

  FiducialFrame unsorted(MultiSpec::from_counts({{3, 3}, {2, 2}}));
  p = problem(unsorted, {{{X(1, 1), X(1, 1)}}}, {{X(2, 1), X(1, 1)}}, WitnessMode::kSmallSet);
  CHECK_THROWS_AS(construct_witness(unsorted, p), InvalidWitnessProblem);
  CHECK_THROWS_AS(witness_mode_from_string("greedy"), InvalidWitnessProblem);
}

TEST_CASE("exhaustive sweep agrees with the oracle on small bipartite systems") {
  for (const auto& counts : std::vector<std::vector<std::vector<int>>>{{{2, 2}, {2, 2}}, {{2, 2}, {2, 3}}}) {
    FiducialFrame frame(MultiSpec::from_counts(counts));
    sweep::WitnessSweep s;
    sweep::run_witness_sweep(frame, 3, s);
    for (const auto& f : s.failures) INFO(f);
    CHECK(s.failures.empty());
    CHECK(s.ok());
    CHECK(s.valid > 0);
    CHECK(s.valid + s.rejected == s.problems);
    CHECK(s.covering_empty_oracle > 0);
  }
}

TEST_CASE("tripartite witnesses on random problems") {
  FiducialFrame frame(MultiSpec::from_counts({{2, 2}, {2, 2}, {2, 3}}));
  SubunitCatalog catalog(frame);
  std::mt19937 rng(2024);
  std::uniform_int_distribution<std::size_t> pick(0, frame.label_count() - 1);
  int valid = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<std::size_t> terms;
    const int k = 1 + static_cast<int>(rng() % 3);
    while (static_cast<int>(terms.size()) < k) {
      auto l = pick(rng);
      if (std::find(terms.begin(), terms.end(), l) == terms.end()) terms.push_back(l);
    }
    for (auto mode : {WitnessMode::kSmallSet, WitnessMode::kFilledMeasurement}) {
      WitnessProblem p{make_decomposition(terms), pick(rng), mode};
      if (witness_problem_error(frame, catalog, p)) continue;
      ++valid;
      const auto w = construct_witness(frame, catalog, p);
      CHECK(witness_holds(frame, p.avoid, p.target, w));
      CHECK(brute_force_witness(frame, p.avoid, p.target));
    }
  }
  CHECK(valid > 100);
}
