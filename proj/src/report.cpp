#include <boxworld/report.hpp>

#include <algorithm>
#include <sstream>

namespace boxworld {

bool Report::passed() const { return !partial && failures() == 0; }

std::size_t Report::failures() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return !r.pass; }));
}

CheckRecord& Report::add(std::string check, std::string inst, bool pass) {
  records.push_back({std::move(check), std::move(inst), pass, nullptr, nullptr});
  return records.back();
}

void Report::merge(const Report& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  search_nodes += other.search_nodes;
  partial = partial || other.partial;
}

std::string render_machine(const Report& report, const nlohmann::json& metadata) {
  std::ostringstream out;
  if (!metadata.is_null()) {
    nlohmann::json meta = metadata;
    meta["record"] = "meta";
    meta["command"] = report.command;
    meta["instance"] = report.instance;
    out << meta.dump() << '\n';
  }
  for (const auto& r : report.records) {
    nlohmann::json j;
    j["record"] = "check";
    j["command"] = report.command;
    j["instance"] = report.instance;
    j["check"] = r.check;
    j["case"] = r.instance;
    j["verdict"] = r.pass ? "pass" : "fail";
    if (!r.witness.is_null()) j["witness"] = r.witness;
    if (!r.details.is_null()) j["details"] = r.details;
    out << j.dump() << '\n';
  }
  nlohmann::json s;
  s["record"] = "summary";
  s["command"] = report.command;
  s["instance"] = report.instance;
  s["verdict"] = report.partial ? "partial" : (report.passed() ? "pass" : "fail");
  s["partial"] = report.partial;
  s["checks"] = report.records.size();
  s["failures"] = report.failures();
  s["counts"] = report.summary;
  s["timing"] = {{"search_nodes", report.search_nodes}};
  out << s.dump() << '\n';
  return out.str();
}

std::string render_human(const Report& report) {
  std::ostringstream out;
  out << report.command << " on " << report.instance << '\n';
  for (const auto& r : report.records)
    if (!r.pass) out << "  FAIL " << r.check << ": " << r.instance << (r.witness.is_null() ? "" : "  witness: " + r.witness.dump()) << '\n';
  for (const auto& [key, value] : report.summary.items()) {
    out << "  " << key << ": ";
    if (value.is_string()) out << value.get<std::string>();
    else out << value.dump();
    out << '\n';
  }
  out << "  checks: " << report.records.size() << ", failures: " << report.failures() << '\n';
  out << "  search nodes: " << report.search_nodes << '\n';
  if (report.partial) out << "  PARTIAL: budget exhausted before completion\n";
  out << "  verdict: " << (report.partial ? "PARTIAL" : report.passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

}  // namespace boxworld
