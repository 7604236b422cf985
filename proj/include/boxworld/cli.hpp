#pragma once

// Command-line front end: system files, dispatch, and report output.

#include <boxworld/budget.hpp>
#include <boxworld/report.hpp>
#include <boxworld/system.hpp>
#include <boxworld/witness.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace boxworld::cli {

enum class Command { kVerifyDecompositions, kVerifySmallSums, kVerifyClassification, kEnumVertices, kEnumTransforms, kEnumDecomps, kWitness };

std::string to_string(Command c);
std::optional<Command> command_from_string(const std::string& name);
/// Commands that need every system non-classical.
bool rejects_classical(Command c);

enum class Format { kHuman, kMachine };

struct SystemFile {
  std::string name;
  /// The spec as written in the file.
  MultiSpec original;
  /// Sorted spec that every command runs on, plus the map back.
  CanonicalForm canonical;
};

/// Parses the YAML system schema:
///
///   name: optional string
///   systems:
///     - [2, 2]      # one list of outcome counts per system
///     - [2, 3]
///
/// Throws ParseError with a 1-based line and column.
SystemFile parse_system_text(const std::string& text);
SystemFile load_system_file(const std::string& path);

struct RunConfig {
  std::string spec_path;
  Command command = Command::kVerifyDecompositions;
  Budget budget;
  std::string out_path;
  Format format = Format::kHuman;
  /// enum-decomps: ';'-separated labels whose sum is decomposed.
  std::string effect;
  /// witness: ';'-separated avoid labels, the target label, and the mode.
  std::string avoid;
  std::string target;
  WitnessMode mode = WitnessMode::kSmallSet;
};

/// Raised for bad flags; exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Thrown by parse_config for --help; what() is the help text. Exit code 0.
class HelpRequested : public Error {
 public:
  using Error::Error;
};

/// Parses flags (without the program name) into a config. Throws UsageError
/// or HelpRequested.
RunConfig parse_config(const std::vector<std::string>& args);

struct RunResult {
  int exit_code = 0;
  Report report;
  /// Meta record: spec, canonical relabelling, budget.
  nlohmann::json metadata;
};

/// Loads the system file, runs the command and returns the report. Exit
/// codes: 0 pass, 1 check failure, 3 budget (report marked partial). Usage
/// and input errors propagate as exceptions.
RunResult run(const RunConfig& config);

std::string render(const RunResult& result, Format format);

/// Full program: parse, run, write. Returns the exit code (2 on usage or input errors).
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace boxworld::cli
