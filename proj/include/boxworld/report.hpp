#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace boxworld {

struct CheckRecord {
  std::string check;
  std::string instance;
  bool pass = true;
  /// Counterexample or constructed object; null when there is nothing to show.
  nlohmann::json witness;
  nlohmann::json details;
};

/// Result object shared by every verification and enumeration. The machine
/// and human renderings are both produced from this structure.
struct Report {
  std::string command;
  std::string instance;
  std::vector<CheckRecord> records;
  nlohmann::json summary = nlohmann::json::object();
  bool partial = false;
  std::uint64_t search_nodes = 0;

  bool passed() const;
  std::size_t failures() const;
  CheckRecord& add(std::string check, std::string instance, bool pass);
  /// Appends the records of `other`, keeping this report's command.
  void merge(const Report& other);
};

/// One JSON object per line: a record line per check, then a summary line.
std::string render_machine(const Report& report, const nlohmann::json& metadata = nullptr);
std::string render_human(const Report& report);

}  // namespace boxworld
