#pragma once

// Exhaustive witness sweep shared by the unit tests and the acceptance suite:
// every set of 1..max_avoid distinct fiducial labels, every target outside
// it, both construction modes.

#include <boxworld/errors.hpp>
#include <boxworld/label_text.hpp>
#include <boxworld/witness.hpp>

#include <string>
#include <vector>

namespace sweep {

struct WitnessSweep {
  std::size_t problems = 0;
  std::size_t valid = 0;
  std::size_t constructed = 0;
  std::size_t oracle_nonempty = 0;
  std::size_t rejected = 0;
  std::size_t covering = 0;
  std::size_t covering_empty_oracle = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty() && constructed == valid && oracle_nonempty == valid; }
};

inline void run_witness_sweep(const boxworld::FiducialFrame& frame, std::size_t max_avoid, WitnessSweep& out) {
  using namespace boxworld;
  SubunitCatalog catalog(frame);
  const std::size_t n = frame.label_count();
  auto fail = [&](const WitnessProblem& p, const std::string& what) {
    if (out.failures.size() < 20) {
      std::string avoid;
      for (const auto& l : labels_of(frame, p.avoid)) avoid += (avoid.empty() ? "" : "; ") + format_label(l);
      out.failures.push_back(to_string(p.mode) + " avoid {" + avoid + "} target " +
                             format_label(frame.alphabet().label(p.target)) + ": " + what);
    }
  };

  std::vector<std::size_t> set;
  auto visit = [&](const Decomposition& avoid) {
    const bool covering = !covered_subunits(frame, catalog, avoid).empty();
    for (std::size_t target = 0; target < n; ++target) {
      if (std::binary_search(avoid.terms.begin(), avoid.terms.end(), target)) continue;
      const auto oracle = brute_force_witness(frame, avoid, target);
      if (covering) {
        ++out.covering;
        if (!oracle) ++out.covering_empty_oracle;
      }
      for (auto mode : {WitnessMode::kSmallSet, WitnessMode::kFilledMeasurement}) {
        WitnessProblem p{avoid, target, mode};
        ++out.problems;
        const bool valid = !witness_problem_error(frame, catalog, p);
        if (valid) {
          ++out.valid;
          if (oracle) ++out.oracle_nonempty;
          else fail(p, "oracle found no witness");
          try {
            const auto w = construct_witness(frame, catalog, p);
            if (witness_holds(frame, avoid, target, w)) ++out.constructed;
            else fail(p, "witness fails evaluation");
          } catch (const Error& e) {
            fail(p, e.what());
          }
        } else {
          try {
            construct_witness(frame, catalog, p);
            fail(p, "construction accepted an invalid problem");
          } catch (const InvalidWitnessProblem&) {
            ++out.rejected;
          }
        }
      }
    }
  };
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (!set.empty()) visit(Decomposition{set});
    if (set.size() == max_avoid) return;
    for (std::size_t l = start; l < n; ++l) {
      set.push_back(l);
      self(self, l + 1);
      set.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace sweep
