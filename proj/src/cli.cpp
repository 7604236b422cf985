#include <boxworld/cli.hpp>
#include <boxworld/decomposition.hpp>
#include <boxworld/dynamics.hpp>
#include <boxworld/errors.hpp>
#include <boxworld/label_text.hpp>
#include <boxworld/polytope.hpp>

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace boxworld::cli {

namespace {

const std::vector<std::pair<Command, std::string>> kCommands = {
    {Command::kVerifyDecompositions, "verify-lemma1"},     {Command::kVerifySmallSums, "verify-cor2"},
    {Command::kVerifyClassification, "verify-theorem"},   {Command::kEnumVertices, "enum-vertices"},
    {Command::kEnumTransforms, "enum-transforms"}, {Command::kEnumDecomps, "enum-decomps"},
    {Command::kWitness, "witness"},
};

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "unknown";
}

std::optional<Command> command_from_string(const std::string& name) {
  for (const auto& [cmd, n] : kCommands)
    if (n == name) return cmd;
  return std::nullopt;
}

bool rejects_classical(Command c) {
  return c == Command::kVerifyDecompositions || c == Command::kVerifySmallSums || c == Command::kVerifyClassification ||
         c == Command::kEnumTransforms || c == Command::kWitness;
}

// ---------------------------------------------------------------- system files

namespace {

[[noreturn]] void fail_at(const YAML::Mark& mark, const std::string& what) {
  if (mark.is_null()) throw ParseError(what, 1, 1);
  throw ParseError(what, static_cast<std::size_t>(mark.line) + 1, static_cast<std::size_t>(mark.column) + 1);
}

int outcome_count(const YAML::Node& node) {
  if (!node.IsScalar()) fail_at(node.Mark(), "outcome count must be an integer");
  long v = 0;
  try {
    v = node.as<long>();
  } catch (const YAML::Exception&) {
    fail_at(node.Mark(), "outcome count '" + node.Scalar() + "' is not an integer");
  }
  if (v < 2) fail_at(node.Mark(), "outcome count " + std::to_string(v) + " is below 2");
  if (v > 64) fail_at(node.Mark(), "outcome count " + std::to_string(v) + " is too large");
  return static_cast<int>(v);
}

std::string counts_text(const MultiSpec& multi) { return nlohmann::json(multi.counts()).dump(); }

}  // namespace

SystemFile parse_system_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail_at(e.mark, e.msg);
  }
  if (!root.IsMap()) fail_at(root.Mark(), "expected a mapping with a 'systems' key");
  std::string name;
  std::optional<YAML::Node> systems;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (key == "systems") {
      systems = kv.second;
    } else if (key == "name") {
      if (!kv.second.IsScalar()) fail_at(kv.second.Mark(), "'name' must be a string");
      name = kv.second.Scalar();
    } else {
      fail_at(kv.first.Mark(), "unknown key '" + key + "'");
    }
  }
  if (!systems) fail_at(root.Mark(), "missing 'systems'");
  if (!systems->IsSequence() || systems->size() == 0)
    fail_at(systems->Mark(), "'systems' must be a non-empty list of outcome-count lists");
  std::vector<std::vector<int>> counts;
  for (const auto& sys : *systems) {
    if (!sys.IsSequence() || sys.size() == 0) fail_at(sys.Mark(), "a system must be a non-empty list of outcome counts");
    std::vector<int> ks;
    for (const auto& k : sys) ks.push_back(outcome_count(k));
    counts.push_back(std::move(ks));
  }
  auto original = MultiSpec::from_counts(counts);
  auto canonical = canonical_sort(original);
  if (name.empty()) name = counts_text(original);
  return {name, std::move(original), std::move(canonical)};
}

SystemFile load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open system file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_text(buf.str());
}

// ---------------------------------------------------------------- flags

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig config;
  CLI::App app{"Exact checks of reversible dynamics on Boxworld systems", "boxworld"};
  std::string check, format = "human", mode = "small-set";
  std::optional<std::uint64_t> nodes, rays;
  std::optional<double> seconds;
  std::vector<std::string> names;
  for (const auto& [c, n] : kCommands) names.push_back(n);

  app.add_option("--spec", config.spec_path, "System description file (YAML)")->required();
  app.add_option("--check", check, "Command to run")->required()->check(CLI::IsMember(names));
  app.add_option("--budget-nodes", nodes, "Maximum search nodes")->check(CLI::PositiveNumber);
  app.add_option("--budget-rays", rays, "Maximum intermediate rays in vertex enumeration")->check(CLI::PositiveNumber);
  app.add_option("--budget-seconds", seconds, "Wall-clock limit in seconds")->check(CLI::PositiveNumber);
  app.add_option("--out", config.out_path, "Write the report to this file instead of stdout");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"human", "machine"}));
  app.add_option("--effect", config.effect, "enum-decomps: labels to sum, separated by ';'");
  app.add_option("--avoid", config.avoid, "witness: labels to avoid, separated by ';'");
  app.add_option("--target", config.target, "witness: label to hit");
  app.add_option("--mode", mode, "witness: construction")->check(CLI::IsMember({"small-set", "filled-measurement"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  config.command = *command_from_string(check);
  config.format = format == "machine" ? Format::kMachine : Format::kHuman;
  config.mode = witness_mode_from_string(mode);
  if (nodes) config.budget.max_nodes = *nodes;
  if (rays) config.budget.max_rays = *rays;
  config.budget.max_seconds = seconds;
  if (config.command == Command::kEnumDecomps && config.effect.empty())
    throw UsageError("enum-decomps needs --effect");
  if (config.command == Command::kWitness && config.target.empty()) throw UsageError("witness needs --target");
  return config;
}

// ---------------------------------------------------------------- commands

namespace {

nlohmann::json relabelling_json(const CanonicalRelabelling& r) {
  nlohmann::json systems = nlohmann::json::array(), measurements = nlohmann::json::array();
  for (int i : r.system_order) systems.push_back(i + 1);
  for (const auto& per : r.measurement_order) {
    auto row = nlohmann::json::array();
    for (int x : per) row.push_back(x + 1);
    measurements.push_back(row);
  }
  return {{"system_order", systems}, {"measurement_order", measurements}, {"identity", r.is_identity()}};
}

nlohmann::json budget_json(const Budget& b) {
  return {{"max_nodes", b.max_nodes},
          {"max_rays", b.max_rays},
          {"max_seconds", b.max_seconds ? nlohmann::json(*b.max_seconds) : nlohmann::json()}};
}

std::vector<std::size_t> parse_indices(const SystemFile& sys, const FiducialFrame& frame, const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& label : parse_label_list(text, sys.original.size())) {
    validate(sys.original, label);
    const auto canonical = sys.canonical.relabelling.to_canonical(label);
    if (!canonical.is_fiducial()) throw InvalidLabel("'" + format_label(label) + "' is not a fiducial label");
    out.push_back(frame.alphabet().index(canonical));
  }
  return out;
}

nlohmann::json form_json(const TrivialForm& form) {
  nlohmann::json p = nlohmann::json::array(), q = nlohmann::json::array();
  for (int j : form.system_permutation) p.push_back(j + 1);
  for (const auto& local : form.local) {
    nlohmann::json m = nlohmann::json::array(), o = nlohmann::json::array();
    for (int x : local.measurement_map) m.push_back(x + 1);
    for (const auto& row : local.outcome_map) {
      auto r = nlohmann::json::array();
      for (int a : row) r.push_back(a + 1);
      o.push_back(r);
    }
    q.push_back({{"measurements", m}, {"outcomes", o}});
  }
  return {{"P", p}, {"Q", q}};
}

Report enum_vertices(const FiducialFrame& frame, BudgetMeter& meter) {
  auto polytope = build_polytope(frame.multi());
  const auto& vertices = enumerate_vertices(polytope, meter);
  Report report;
  std::size_t pure = 0;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const auto& v = vertices[k];
    bool is_pure = true;
    auto values = nlohmann::json::array();
    for (std::size_t l = 0; l < frame.label_count(); ++l) {
      const auto e = evaluate(frame.vector(l), v);
      is_pure = is_pure && (e == 0 || e == 1);
      values.push_back(boxworld::to_string(e));
    }
    pure += is_pure;
    auto coords = nlohmann::json::array();
    for (const auto& c : v.coords) coords.push_back(boxworld::to_string(c));
    auto& rec = report.add("vertex", std::to_string(k + 1), membership(polytope, v));
    rec.witness = {{"coordinates", coords}, {"fiducial_values", values}, {"pure_product", is_pure}};
  }
  report.summary = {{"vertices", vertices.size()}, {"pure_product", pure}, {"nonproduct", vertices.size() - pure}};
  return report;
}

Report enum_transforms(const FiducialFrame& frame, BudgetMeter& meter) {
  TransformFrame tf(frame, meter);
  const auto found = enumerate_reversible(tf, meter);
  Report report;
  std::size_t swapping = 0;
  for (std::size_t k = 0; k < found.size(); ++k) {
    auto pairs = nlohmann::json::array();
    for (std::size_t l = 0; l < frame.label_count(); ++l)
      pairs.push_back({format_label(frame.alphabet().label(l)), format_label(frame.alphabet().label(found[k](l)))});
    const auto form = decompose_trivial(frame, found[k]);
    if (form && form->swaps_systems()) ++swapping;
    auto& rec = report.add("transformation", std::to_string(k + 1), true);
    rec.witness = pairs;
    rec.details = {{"trivial_form", form ? form_json(*form) : nlohmann::json()}};
  }
  report.summary = {{"transformations", found.size()}, {"system_swapping", swapping}};
  return report;
}

Report enum_decomps(const SystemFile& sys, const FiducialFrame& frame, const std::string& effect, BudgetMeter& meter) {
  Report report;
  EffectVector e = zero_effect(frame.multi());
  std::string shown;
  for (const auto& label : parse_label_list(effect, sys.original.size())) {
    validate(sys.original, label);
    const auto canonical = sys.canonical.relabelling.to_canonical(label);
    e = e + joint_effect_vector(frame.multi(), canonical);
    shown += (shown.empty() ? "" : "; ") + format_label(canonical);
  }
  if (shown.empty()) throw UsageError("--effect lists no labels");
  std::vector<Decomposition> ds;
  try {
    ds = enumerate_decompositions(frame, e, meter);
  } catch (const NotInCone& err) {
    report.add("in-cone", shown, false).details = {{"error", err.what()}};
    return report;
  }
  for (std::size_t k = 0; k < ds.size(); ++k) {
    auto labels = nlohmann::json::array();
    for (const auto& l : labels_of(frame, ds[k])) labels.push_back(format_label(l));
    report.add("decomposition", std::to_string(k + 1), true).witness = labels;
  }
  const auto sub = classify_subunit(frame, e);
  report.summary = {{"effect", shown},
                    {"decompositions", ds.size()},
                    {"multiform", ds.size() >= 2},
                    {"subunit", sub ? nlohmann::json(format_label(sub->label)) : nlohmann::json()}};
  return report;
}

Report witness(const SystemFile& sys, const FiducialFrame& frame, const RunConfig& config) {
  const auto target = parse_indices(sys, frame, config.target);
  if (target.size() != 1) throw UsageError("--target must name exactly one label");
  WitnessProblem problem{make_decomposition(parse_indices(sys, frame, config.avoid)), target.front(), config.mode};
  SubunitCatalog catalog(frame);
  if (auto err = witness_problem_error(frame, catalog, problem)) throw InvalidWitnessProblem(*err);

  Report report;
  const auto w = construct_witness(frame, catalog, problem);
  const bool holds = witness_holds(frame, problem.avoid, problem.target, w);
  auto& rec = report.add("construction", to_string(config.mode), holds);
  rec.witness = {{"assignment", format_assignment(w)},
                 {"assignment_original", format_assignment(sys.canonical.relabelling.to_original(w))}};
  const auto oracle = brute_force_witness(frame, problem.avoid, problem.target);
  auto& orc = report.add("oracle", "exhaustive scan", static_cast<bool>(oracle));
  if (oracle) orc.witness = {{"assignment", format_assignment(*oracle)}};
  auto avoid = nlohmann::json::array();
  for (const auto& l : labels_of(frame, problem.avoid)) avoid.push_back(format_label(l));
  report.summary = {{"target", format_label(frame.alphabet().label(problem.target))},
                    {"avoid", avoid},
                    {"mode", to_string(config.mode)},
                    {"assignment", format_assignment(w)}};
  return report;
}

}  // namespace

RunResult run(const RunConfig& config) {
  const auto sys = load_system_file(config.spec_path);
  if (rejects_classical(config.command)) sys.canonical.multi.require_nonclassical(to_string(config.command));

  RunResult result;
  result.metadata = {{"spec", {{"name", sys.name}, {"systems", sys.original.counts()}}},
                     {"canonical_systems", sys.canonical.multi.counts()},
                     {"relabelling", relabelling_json(sys.canonical.relabelling)},
                     {"labels", "canonical"},
                     {"budget", budget_json(config.budget)}};

  FiducialFrame frame(sys.canonical.multi);
  BudgetMeter meter(config.budget);
  Report report;
  try {
    switch (config.command) {
      case Command::kVerifyDecompositions: report = verify_subunit_decompositions(frame, meter); break;
      case Command::kVerifySmallSums: report = verify_small_sums(frame, meter); break;
      case Command::kVerifyClassification: report = verify_classification(TransformFrame(frame, meter), meter); break;
      case Command::kEnumVertices: report = enum_vertices(frame, meter); break;
      case Command::kEnumTransforms: report = enum_transforms(frame, meter); break;
      case Command::kEnumDecomps: report = enum_decomps(sys, frame, config.effect, meter); break;
      case Command::kWitness: report = witness(sys, frame, config); break;
    }
  } catch (const ResourceBudgetExceeded& e) {
    report = Report{};
    report.partial = true;
    report.add("budget", "resource limit", false).details = {{"error", e.what()}};
  }
  report.command = to_string(config.command);
  report.instance = sys.name;
  report.search_nodes = meter.nodes();
  result.exit_code = report.partial ? 3 : report.passed() ? 0 : 1;
  result.report = std::move(report);
  return result;
}

std::string render(const RunResult& result, Format format) {
  if (format == Format::kMachine) return render_machine(result.report, result.metadata);
  std::string out;
  const auto& s = result.report.summary;
  if (result.report.command == "verify-theorem" && s.contains("reversible_found"))
    out += "reversible transformations found: " + s["reversible_found"].dump() +
           "; trivial group size: " + s["trivial_group_size"].dump() + "; " +
           (s["match"].get<bool>() ? "MATCH" : "MISMATCH") + "\n";
  if (!result.metadata["relabelling"]["identity"].get<bool>())
    out += "note: systems were canonically sorted; labels below use the sorted order " +
           result.metadata["canonical_systems"].dump() + "\n";
  return out + render_human(result.report);
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const auto config = parse_config(args);
    const auto result = run(config);
    const auto text = render(result, config.format);
    if (config.out_path.empty()) {
      out << text;
    } else {
      std::ofstream file(config.out_path, std::ios::binary);
      if (!file) throw UsageError("cannot write '" + config.out_path + "'");
      file << text;
    }
    return result.exit_code;
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const ClassicalSystemUnsupported& e) {
    err << "unsupported system: " << e.what() << "\n";
  } catch (const InvalidWitnessProblem& e) {
    err << "invalid witness problem: " << e.what() << "\n";
  } catch (const InvalidLabel& e) {
    err << "invalid label: " << e.what() << "\n";
  } catch (const InvalidSystemSpec& e) {
    err << "invalid system: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace boxworld::cli
