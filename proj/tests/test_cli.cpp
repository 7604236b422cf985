#include <boxworld/cli.hpp>
#include <boxworld/errors.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace boxworld;
using namespace boxworld::cli;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("boxworld_cli_" + name + ".yaml");
  std::ofstream(path) << text;
  return path.string();
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = main_entry(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<nlohmann::json> lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST_CASE("system file parsing") {
  const auto sys = parse_system_text("name: demo\nsystems:\n  - [3, 2]\n  - [2, 2]\n");
  CHECK(sys.name == "demo");
  CHECK(sys.original.counts() == std::vector<std::vector<int>>{{3, 2}, {2, 2}});
  CHECK(sys.canonical.multi.counts() == std::vector<std::vector<int>>{{2, 2}, {2, 3}});
  CHECK(parse_system_text("systems: [[2, 2]]").name == "[[2,2]]");

  auto where = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_system_text(text);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    FAIL("no parse error");
    return {0, 0};
  };
  CHECK(where("systems:\n  - [2, 1]\n") == std::pair<std::size_t, std::size_t>{2, 9});
  CHECK(where("systems:\n  - [2, x]\n") == std::pair<std::size_t, std::size_t>{2, 9});
  CHECK(where("systems:\n  - []\n").first == 2);
  CHECK(where("sistems: [[2, 2]]\n") == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(where("name: a\n").first == 1);
  CHECK(where("systems: [[2, 2]\n").first >= 1);
}

TEST_CASE("flag parsing") {
  const auto c = parse_config({"--spec", "a.yaml", "--check", "witness", "--target", "X[1|1]@1", "--mode",
                               "filled-measurement", "--budget-nodes", "10", "--format", "machine"});
  CHECK(c.command == Command::kWitness);
  CHECK(c.mode == WitnessMode::kFilledMeasurement);
  CHECK(c.budget.max_nodes == 10);
  CHECK(c.format == Format::kMachine);
  CHECK_THROWS_AS(parse_config({"--spec", "a.yaml"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--spec", "a.yaml", "--check", "bogus"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--spec", "a.yaml", "--check", "witness"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--spec", "a.yaml", "--check", "enum-decomps"}), UsageError);
  CHECK_THROWS_AS(parse_config({"--help"}), HelpRequested);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("exit codes") {
  const auto qubits = write_temp("qubits", "name: q\nsystems:\n  - [2, 2]\n  - [2, 2]\n");
  const auto classical = write_temp("classical", "systems:\n  - [2]\n");
  const auto bad = write_temp("bad", "systems:\n  - [2, 1]\n");

  auto r = invoke({"--spec", qubits, "--check", "verify-theorem"});
  CHECK(r.code == 0);
  CHECK(r.out.find("reversible transformations found: 128; trivial group size: 128; MATCH") != std::string::npos);

  r = invoke({"--spec", classical, "--check", "verify-theorem"});
  CHECK(r.code == 2);
  CHECK(r.err.find("classical") != std::string::npos);
  CHECK(invoke({"--spec", classical, "--check", "enum-vertices"}).code == 0);

  r = invoke({"--spec", bad, "--check", "enum-vertices"});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2, column 9") != std::string::npos);
  CHECK(invoke({"--spec", "/nonexistent.yaml", "--check", "enum-vertices"}).code == 2);

  r = invoke({"--spec", qubits, "--check", "verify-theorem", "--budget-nodes", "50", "--format", "machine"});
  CHECK(r.code == 3);
  const auto summary = lines(r.out).back();
  CHECK(summary["partial"] == true);
  CHECK(summary["verdict"] == "partial");

  r = invoke({"--spec", qubits, "--check", "witness", "--avoid", "X[1|1]@1 X[1|1]@2;X[2|1]@1 X[1|1]@2", "--target",
              "X[1|2]@1 X[1|1]@2"});
  CHECK(r.code == 2);
  CHECK(invoke({"--spec", qubits, "--check", "witness", "--target", "X[9|1]@1 X[1|1]@2"}).code == 2);
}

TEST_CASE("machine reports") {
  const auto qubits = write_temp("qubits2", "systems:\n  - [2, 2]\n  - [2, 2]\n");
  auto r = invoke({"--spec", qubits, "--check", "enum-vertices", "--format", "machine"});
  REQUIRE(r.code == 0);
  auto records = lines(r.out);
  CHECK(records.front()["record"] == "meta");
  CHECK(records.size() == 26);
  CHECK(records.back()["counts"]["vertices"] == 24);
  CHECK(records.back()["counts"]["pure_product"] == 16);

  const auto mixed = write_temp("mixed", "systems:\n  - [2, 2]\n  - [2, 3]\n");
  CHECK(invoke({"--spec", mixed, "--check", "verify-lemma1"}).code == 0);
  CHECK(invoke({"--spec", mixed, "--check", "verify-cor2"}).code == 0);

  r = invoke({"--spec", qubits, "--check", "enum-decomps", "--format", "machine", "--effect",
              "X[1|1]@1 X[1|1]@2;X[2|1]@1 X[1|1]@2"});
  REQUIRE(r.code == 0);
  records = lines(r.out);
  CHECK(records.back()["counts"]["decompositions"] == 2);
  CHECK(records.back()["counts"]["subunit"] == "U@1 X[1|1]@2");

  // Input in the file's labelling; output assignment given in both.
  const auto unsorted = write_temp("unsorted", "systems:\n  - [3, 2]\n  - [2, 2]\n");
  r = invoke({"--spec", unsorted, "--check", "witness", "--format", "machine", "--avoid",
              "X[1|1]@1 X[1|1]@2;X[2|1]@1 X[2|1]@2;X[3|1]@1 X[1|2]@2", "--target", "X[1|2]@1 X[2|2]@2", "--mode",
              "filled-measurement"});
  REQUIRE(r.code == 0);
  records = lines(r.out);
  CHECK(records.front()["relabelling"]["system_order"] == nlohmann::json::array({2, 1}));
  CHECK(records.back()["counts"]["target"] == "X[2|2]@1 X[1|1]@2");
}

TEST_CASE("machine output is byte-identical across runs") {
  const auto qubits = write_temp("qubits3", "systems:\n  - [2, 2]\n  - [2, 2]\n");
  const std::vector<std::vector<std::string>> runs = {
      {"--check", "verify-lemma1"},
      {"--check", "verify-cor2"},
      {"--check", "verify-theorem"},
      {"--check", "enum-vertices"},
      {"--check", "enum-transforms"},
      {"--check", "enum-decomps", "--effect", "X[1|1]@1 X[1|1]@2;X[2|1]@1 X[1|1]@2"},
      {"--check", "witness", "--avoid", "X[1|1]@1 X[1|1]@2", "--target", "X[1|2]@1 X[1|1]@2"},
  };
  for (auto args : runs) {
    args.insert(args.end(), {"--spec", qubits, "--format", "machine"});
    const auto a = invoke(args), b = invoke(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}
