#pragma once

// Pure product states that hit a target fiducial effect while missing every
// effect of a given set. Two constructive routes (small avoid sets, and avoid
// sets that fill one local measurement) plus an exhaustive oracle.

#include <boxworld/decomposition.hpp>
#include <boxworld/representation.hpp>

#include <optional>
#include <string>

namespace boxworld {

enum class WitnessMode {
  /// |avoid| <= K^(1)_1 and avoid covers no sub-unit effect.
  kSmallSet,
  /// avoid covers no sub-unit effect, and on some system i the components of
  /// avoid sum to the local unit.
  kFilledMeasurement,
};

std::string to_string(WitnessMode mode);
WitnessMode witness_mode_from_string(const std::string& text);

struct WitnessProblem {
  Decomposition avoid;
  std::size_t target = 0;
  WitnessMode mode = WitnessMode::kSmallSet;
};

/// Empty when valid; otherwise the reason the preconditions fail. Requires a
/// canonical, non-classical frame.
std::optional<std::string> witness_problem_error(const FiducialFrame& frame, const WitnessProblem& problem);
std::optional<std::string> witness_problem_error(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                                 const WitnessProblem& problem);
void validate(const FiducialFrame& frame, const WitnessProblem& problem);
void validate(const FiducialFrame& frame, const SubunitCatalog& catalog, const WitnessProblem& problem);

/// Inductive construction over the systems in order. The first system takes
/// the target's outcome on the target's measurement. If the avoid components
/// there fill no other measurement, every other measurement is set to an
/// outcome no avoid term uses and the rest recurses on the terms that agree
/// with the target on this system. Otherwise a filled measurement picks out a
/// single term (the first one that differs from the target off this system)
/// and the rest recurses on that term alone.
/// Throws InvalidWitnessProblem or, if the result fails evaluation, ConstructionBug.
Assignment small_set_witness(const FiducialFrame& frame, const WitnessProblem& problem);
Assignment small_set_witness(const FiducialFrame& frame, const SubunitCatalog& catalog, const WitnessProblem& problem);

/// Construction for avoid sets whose components on some system i are one full
/// measurement x'. With f^(i) = X_{a|x}: if x' = x, block every term but the
/// one with outcome a and hand that single term to small_set_witness on the
/// other systems; otherwise pick the first term that differs from f off
/// system i, select it on x' and recurse on it alone.
Assignment filled_measurement_witness(const FiducialFrame& frame, const WitnessProblem& problem);
Assignment filled_measurement_witness(const FiducialFrame& frame, const SubunitCatalog& catalog,
                                      const WitnessProblem& problem);

/// Dispatches on problem.mode.
/// The catalog overloads skip rebuilding the sub-unit table on every call.
Assignment construct_witness(const FiducialFrame& frame, const WitnessProblem& problem);
Assignment construct_witness(const FiducialFrame& frame, const SubunitCatalog& catalog, const WitnessProblem& problem);

/// First pure product state in lexicographic order that hits `target` and
/// none of `avoid`.
std::optional<Assignment> brute_force_witness(const FiducialFrame& frame, const Decomposition& avoid,
                                              std::size_t target);

/// Exact evaluation: target evaluates to 1, every avoid term to 0.
bool witness_holds(const FiducialFrame& frame, const Decomposition& avoid, std::size_t target,
                   const Assignment& assignment);

}  // namespace boxworld
