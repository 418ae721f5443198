// Copyright 2026 The tweakscale Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: scale, tweak, measure, run, analyze-overlap,
// validate-target and sweep.
//
// Exit codes: 0 success, 1 other failure, 2 configuration or input error,
// 3 infeasible target, 4 coordinator exhausted. Failures print one JSON
// record {"error": <code>, "message": <text>} on stderr.

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tweakscale/coordinator.hpp"
#include "tweakscale/dataset_io.hpp"
#include "tweakscale/error.hpp"
#include "tweakscale/metrics.hpp"
#include "tweakscale/modification.hpp"
#include "tweakscale/overlap.hpp"
#include "tweakscale/pipeline.hpp"
#include "tweakscale/rand_scaler.hpp"
#include "tweakscale/schema.hpp"
#include "tweakscale/target_io.hpp"

extern char** environ;

namespace {

using namespace tweakscale;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

// Everything a subcommand may read. Empty strings mean "not given".
struct Settings {
  std::string config;
  std::string schema;
  std::string data;
  std::string reference;
  std::string sizes;
  std::string order = "L-C-P";
  std::size_t iterations = 1;
  std::uint64_t seed = 0;
  double eThreshold = 0.05;
  std::size_t maxRelaxationRounds = 16;
  std::vector<std::string> targets;
  std::string groundTruth;
  std::string queries;
  std::string out;
  std::string journal;
  bool snapshots = false;
  bool noSelfResponses = false;
  bool noRepair = false;
  bool repair = false;
  std::vector<std::string> tools;
  std::vector<std::string> orders;
  std::size_t jobs = 1;
};

int exitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kSchemaParseError:
    case ErrorCode::kMissingTableFile:
    case ErrorCode::kDuplicatePrimaryKey:
    case ErrorCode::kDanglingForeignKey:
    case ErrorCode::kCyclicSchema:
    case ErrorCode::kIoFailure:
    case ErrorCode::kSpecMismatch:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kGroupMismatch:
    case ErrorCode::kBindingMismatch:
      return 2;
    case ErrorCode::kTargetInfeasible:
    case ErrorCode::kInfeasibleTarget:
    case ErrorCode::kInfeasibleRepair:
      return 3;
    case ErrorCode::kCoordinatorExhausted:
      return 4;
    default:
      return 1;
  }
}

void printError(std::string_view code, std::string_view message) {
  std::cerr << ordered_json{{"error", code}, {"message", message}}.dump() << "\n";
}

// Config file keys; flags given on the command line override them.
Settings loadConfig(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(readFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfigError, path + ": config must be a JSON object");
  Settings s;
  s.config = path;
  const std::map<std::string, std::function<void(const ordered_json&)>> keys{
      {"schema", [&](const auto& v) { s.schema = v.template get<std::string>(); }},
      {"data", [&](const auto& v) { s.data = v.template get<std::string>(); }},
      {"reference", [&](const auto& v) { s.reference = v.template get<std::string>(); }},
      {"sizes", [&](const auto& v) { s.sizes = v.template get<std::string>(); }},
      {"order", [&](const auto& v) { s.order = v.template get<std::string>(); }},
      {"iterations", [&](const auto& v) { s.iterations = v.template get<std::size_t>(); }},
      {"seed", [&](const auto& v) { s.seed = v.template get<std::uint64_t>(); }},
      {"eThreshold", [&](const auto& v) { s.eThreshold = v.template get<double>(); }},
      {"maxRelaxationRounds", [&](const auto& v) { s.maxRelaxationRounds = v.template get<std::size_t>(); }},
      {"targets",
       [&](const auto& v) {
         s.targets = v.is_string() ? std::vector<std::string>{v.template get<std::string>()}
                                   : v.template get<std::vector<std::string>>();
       }},
      {"groundTruth", [&](const auto& v) { s.groundTruth = v.template get<std::string>(); }},
      {"queries", [&](const auto& v) { s.queries = v.template get<std::string>(); }},
      {"out", [&](const auto& v) { s.out = v.template get<std::string>(); }},
      {"journal", [&](const auto& v) { s.journal = v.template get<std::string>(); }},
      {"snapshots", [&](const auto& v) { s.snapshots = v.template get<bool>(); }},
      {"selfResponses", [&](const auto& v) { s.noSelfResponses = !v.template get<bool>(); }},
      {"repairTargets", [&](const auto& v) { s.noRepair = !v.template get<bool>(); }},
      {"orders", [&](const auto& v) { s.orders = v.template get<std::vector<std::string>>(); }},
      {"jobs", [&](const auto& v) { s.jobs = v.template get<std::size_t>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    auto it = keys.find(key);
    if (it == keys.end()) throw Error(ErrorCode::kConfigError, path + ": unknown key \"" + key + "\"");
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kConfigError, path + ": bad value for \"" + key + "\": " + e.what());
    }
  }
  return s;
}

// Binds flags of one subcommand to a Settings object and remembers which
// were given, so that a --config file can fill in the rest.
class Binder {
 public:
  Binder(CLI::App* app, Settings& flags) : app_(app), flags_(flags) {
    app_->add_option("--config", flags_.config, "JSON config file; flags override its keys");
  }

  template <typename T>
  CLI::Option* option(const std::string& name, T Settings::*field, const std::string& help) {
    CLI::Option* o = app_->add_option(name, flags_.*field, help);
    copies_.emplace_back(o, [field](Settings& to, const Settings& from) { to.*field = from.*field; });
    return o;
  }

  CLI::Option* flag(const std::string& name, bool Settings::*field, const std::string& help) {
    CLI::Option* o = app_->add_flag(name, flags_.*field, help);
    copies_.emplace_back(o, [field](Settings& to, const Settings& from) { to.*field = from.*field; });
    return o;
  }

  [[nodiscard]] Settings resolve() const {
    if (flags_.config.empty()) return flags_;
    Settings s = loadConfig(flags_.config);
    for (const auto& [opt, copy] : copies_) {
      if (opt->count() > 0) copy(s, flags_);
    }
    return s;
  }

  [[nodiscard]] CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  Settings& flags_;
  std::vector<std::pair<CLI::Option*, std::function<void(Settings&, const Settings&)>>> copies_;
};

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw Error(ErrorCode::kConfigError, flag + " is required");
}

void addRunFlags(Binder& b) {
  b.option("--order", &Settings::order, "tool permutation over L, C, P, e.g. C-L-P");
  b.option("--iterations", &Settings::iterations, "passes over the permutation (>= 1)");
  b.option("--seed", &Settings::seed, "random seed");
  b.option("--e-threshold", &Settings::eThreshold, "validator threshold in [0, 1)");
  b.option("--max-relaxations", &Settings::maxRelaxationRounds, "relaxation rounds per submission");
  b.option("--targets", &Settings::targets, "explicit target files")->expected(1, -1);
  b.option("--ground-truth", &Settings::groundTruth, "ground-truth dataset directory for queries");
  b.option("--queries", &Settings::queries, "query file (JSON array)");
  b.flag("--no-self-responses", &Settings::noSelfResponses, "do not model self responses");
  b.flag("--no-repair", &Settings::noRepair, "fail on infeasible targets instead of repairing");
}

RunOptions runOptions(const Settings& s, const DatasetSchema& schema) {
  RunOptions o;
  o.order = s.order;
  o.iterations = s.iterations;
  o.selfResponses = !s.noSelfResponses;
  o.coordinator.eThreshold = s.eThreshold;
  o.coordinator.seed = s.seed;
  o.coordinator.maxRelaxationRounds = s.maxRelaxationRounds;
  o.coordinator.repairTargets = !s.noRepair;
  for (const auto& path : s.targets) {
    FeatureTargets t = loadTargets(schema, path);
    auto append = [](auto& into, auto& from) { into.insert(into.end(), from.begin(), from.end()); };
    append(o.explicitTargets.linear, t.linear);
    append(o.explicitTargets.coappear, t.coappear);
    append(o.explicitTargets.pairwise, t.pairwise);
  }
  return o;
}

std::vector<QueryResult> queryResults(const Settings& s, const DatasetSchema& schema, const Dataset& d) {
  if (s.groundTruth.empty() || s.queries.empty()) return {};
  return evaluateQueries(loadDataset(schema, s.groundTruth), d, loadQueries(schema, s.queries));
}

ordered_json errorsJson(const ErrorReport& r) {
  ordered_json out;
  for (const auto& [name, values] :
       {std::pair{"linear", &r.linear}, std::pair{"coappear", &r.coappear}, std::pair{"pairwise", &r.pairwise}}) {
    const auto mean = ErrorReport::mean(*values);
    out[name] = {{"items", *values}, {"mean", mean ? ordered_json(*mean) : ordered_json(nullptr)}};
  }
  return out;
}

ordered_json queriesJson(const std::vector<QueryResult>& results) {
  ordered_json q = ordered_json::array();
  for (const auto& r : results) {
    q.push_back({{"name", r.name},
                 {"truth", r.truth},
                 {"scaled", r.scaled},
                 {"error", r.error ? ordered_json(*r.error) : ordered_json(nullptr)}});
  }
  return q;
}

ordered_json violationsJson(const std::vector<Violation>& vs) {
  ordered_json out = ordered_json::array();
  for (const auto& v : vs) out.push_back({{"condition", v.condition}, {"detail", v.detail}});
  return out;
}

std::string joined(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? std::string(sep) : "") + parts[i];
  return out;
}

int cmdScale(const Settings& s) {
  require(s.schema, "--schema");
  require(s.data, "--data");
  require(s.out, "--out");
  const DatasetSchema schema = loadSchema(s.schema);
  const Dataset input = loadDataset(schema, s.data);
  const SizeTarget sizes = s.sizes.empty() ? currentSizes(input) : loadSizeTarget(s.sizes);
  const Dataset scaled = randScale(input, sizes, s.seed);
  writeDataset(scaled, s.out);
  std::cout << sizeTargetToJson(currentSizes(scaled));
  return 0;
}

// Tweaks an already scaled dataset toward targets taken from --reference
// (default: the dataset itself) and any --targets files.
int cmdTweak(const Settings& s) {
  require(s.schema, "--schema");
  require(s.data, "--data");
  require(s.out, "--out");
  const DatasetSchema schema = loadSchema(s.schema);
  Dataset data = loadDataset(schema, s.data);
  const Dataset reference = s.reference.empty() ? data : loadDataset(schema, s.reference);
  const RunOptions options = runOptions(s, schema);
  auto snapshot = [&](std::size_t it, const Dataset& d) {
    if (s.snapshots) writeDataset(d, fs::path(s.out) / ("iteration-" + std::to_string(it)));
  };
  RunOutcome outcome = runTools(data, reference, options, snapshot);
  outcome.final.queries = queryResults(s, schema, data);
  const std::string report = reportToJson(outcome, outcome.final.queries, currentSizes(data));
  writeDataset(data, fs::path(s.out) / "data");
  writeFile(fs::path(s.out) / "report.json", report);
  writeFile(fs::path(s.out) / "targets.json", targetsToJson(outcome.targets));
  writeFile(s.journal.empty() ? fs::path(s.out) / "journal.ndjson" : fs::path(s.journal),
            journalToText(schema, outcome.journal));
  std::cout << report;
  return 0;
}

int cmdMeasure(const Settings& s) {
  require(s.schema, "--schema");
  require(s.data, "--data");
  if (s.reference.empty() && s.targets.empty()) {
    throw Error(ErrorCode::kConfigError, "measure needs --reference or --targets");
  }
  const DatasetSchema schema = loadSchema(s.schema);
  const Dataset data = loadDataset(schema, s.data);
  const RunOptions options = runOptions(s, schema);
  FeatureTargets targets = options.explicitTargets;
  targets.selfResponses = options.selfResponses;
  if (!s.reference.empty()) targets = generateTargets(data, loadDataset(schema, s.reference), options);
  const ErrorReport report = featureErrorReport(data, targets);
  ordered_json out;
  out["sizes"] = ordered_json::parse(sizeTargetToJson(currentSizes(data)));
  out["errors"] = errorsJson(report);
  out["queries"] = queriesJson(queryResults(s, schema, data));
  const std::string text = out.dump(2) + "\n";
  if (!s.out.empty()) writeFile(s.out, text);
  std::cout << text;
  return 0;
}

int cmdRun(const Settings& s) {
  require(s.schema, "--schema");
  require(s.data, "--data");
  require(s.out, "--out");
  PipelineConfig cfg;
  cfg.schemaPath = s.schema;
  cfg.dataDir = s.data;
  if (!s.sizes.empty()) cfg.sizeTargetPath = s.sizes;
  cfg.order = s.order;
  cfg.iterations = s.iterations;
  cfg.seed = s.seed;
  cfg.eThreshold = s.eThreshold;
  cfg.maxRelaxationRounds = s.maxRelaxationRounds;
  cfg.repairTargets = !s.noRepair;
  cfg.selfResponses = !s.noSelfResponses;
  for (const auto& t : s.targets) cfg.targets.emplace_back(t);
  if (!s.groundTruth.empty()) cfg.groundTruthDir = s.groundTruth;
  if (!s.queries.empty()) cfg.queriesPath = s.queries;
  cfg.outputDir = s.out;
  if (!s.journal.empty()) cfg.journalPath = s.journal;
  cfg.snapshots = s.snapshots;
  std::cout << runPipeline(cfg).reportJson;
  return 0;
}

// Rebuilds per-tool tuple access from a journal and reports the overlap graph.
int cmdAnalyzeOverlap(const Settings& s) {
  require(s.schema, "--schema");
  require(s.journal, "--journal");
  const DatasetSchema schema = loadSchema(s.schema);
  std::istringstream in(readFile(s.journal));
  AccessLog log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const JournalRecord r = parseJournalLine(schema, line);
    auto& touched = log[r.tool];
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, AppendTuple>) {
            touched.emplace(m.table, m.assigned);
          } else {
            for (TupleId t : m.tuples) touched.emplace(m.table, t);
          }
        },
        r.mod);
  }
  const OverlapGraph g = overlapGraph(log, s.tools);
  ordered_json edges = ordered_json::array();
  for (const auto& [a, b] : g.edges) edges.push_back({g.nodes[a], g.nodes[b]});
  ordered_json out;
  out["nodes"] = g.nodes;
  out["edges"] = edges;
  out["independentSet"] = maximumIndependentSet(g);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmdValidateTarget(const Settings& s) {
  require(s.schema, "--schema");
  if (s.targets.empty()) throw Error(ErrorCode::kConfigError, "--targets is required");
  if (s.sizes.empty() && s.data.empty()) throw Error(ErrorCode::kConfigError, "validate-target needs --sizes or --data");
  const DatasetSchema schema = loadSchema(s.schema);
  std::optional<Dataset> data;
  if (!s.data.empty()) data = loadDataset(schema, s.data);
  const SizeTarget sizes = s.sizes.empty() ? currentSizes(*data) : loadSizeTarget(s.sizes);
  const bool self = !s.noSelfResponses;

  ordered_json items = ordered_json::array();
  FeatureTargets repaired;
  repaired.selfResponses = self;
  bool valid = true;
  auto record = [&](const char* feature, const std::string& item, const std::vector<Violation>& vs) {
    valid = valid && vs.empty();
    items.push_back({{"feature", feature}, {"item", item}, {"violations", violationsJson(vs)}});
  };
  for (const auto& path : s.targets) {
    const FeatureTargets t = loadTargets(schema, path);
    for (const auto& m : t.linear) {
      record("linear", joined(m.chain.tables, "->"), checkNecessityL(m, sizes));
      if (s.repair) repaired.linear.push_back(repairTargetL(m, sizes));
    }
    for (const auto& c : t.coappear) {
      record("coappear", joined(c.group.referencing, ",") + "->" + joined(c.group.referenced, ","),
             checkNecessityC(c, sizes));
      if (s.repair) repaired.coappear.push_back(repairTargetC(c, sizes));
    }
    for (const auto& p : t.pairwise) {
      PairwiseTotals totals = pairwiseTotals(p.binding, sizes);
      if (!self && data) totals.responses -= countSelfResponses(*data, p.binding);
      record("pairwise", p.binding.responseTable, checkNecessityP(p, totals, self));
      if (s.repair) repaired.pairwise.push_back(repairTargetP(p, totals, self));
    }
  }
  ordered_json out;
  out["valid"] = valid;
  out["items"] = items;
  if (s.repair) {
    const std::string text = targetsToJson(repaired);
    if (!s.out.empty()) writeFile(s.out, text);
    out["repaired"] = ordered_json::parse(text);
  }
  std::cout << out.dump(2) << "\n";
  return valid || s.repair ? 0 : 3;
}

std::vector<std::string> permutations(std::string letters) {
  std::sort(letters.begin(), letters.end());
  std::vector<std::string> out;
  do {
    std::string o;
    for (char c : letters) o += (o.empty() ? "" : "-") + std::string(1, c);
    out.push_back(o);
  } while (std::next_permutation(letters.begin(), letters.end()));
  return out;
}

std::vector<std::string> runArgs(const Settings& s, const std::string& order, const fs::path& out) {
  std::vector<std::string> a{"run", "--schema", s.schema, "--data", s.data, "--order", order,
                             "--iterations", std::to_string(s.iterations), "--seed", std::to_string(s.seed),
                             "--e-threshold", std::to_string(s.eThreshold), "--max-relaxations",
                             std::to_string(s.maxRelaxationRounds), "--out", out.string()};
  auto add = [&](const char* flag, const std::string& v) {
    if (!v.empty()) a.insert(a.end(), {flag, v});
  };
  add("--sizes", s.sizes);
  add("--ground-truth", s.groundTruth);
  add("--queries", s.queries);
  if (!s.targets.empty()) {
    a.emplace_back("--targets");
    a.insert(a.end(), s.targets.begin(), s.targets.end());
  }
  if (s.snapshots) a.emplace_back("--snapshots");
  if (s.noSelfResponses) a.emplace_back("--no-self-responses");
  if (s.noRepair) a.emplace_back("--no-repair");
  return a;
}

// One `run` child process per permutation, at most --jobs at a time.
int cmdSweep(const Settings& s, const std::string& self_exe) {
  require(s.schema, "--schema");
  require(s.data, "--data");
  require(s.out, "--out");
  std::vector<std::string> orders = s.orders;
  if (orders.empty()) orders = permutations("LCP");
  for (const auto& o : orders) parseOrder(o);
  const std::size_t jobs = std::max<std::size_t>(1, s.jobs);

  std::map<pid_t, std::size_t> running;
  std::vector<int> codes(orders.size(), 0);
  auto reap = [&] {
    int status = 0;
    const pid_t pid = waitpid(-1, &status, 0);
    if (pid <= 0) return;
    codes[running.at(pid)] = WIFEXITED(status) ? WEXITSTATUS(status) : 1;
    running.erase(pid);
  };
  for (std::size_t i = 0; i < orders.size(); ++i) {
    while (running.size() >= jobs) reap();
    std::vector<std::string> args = runArgs(s, orders[i], fs::path(s.out) / orders[i]);
    args.insert(args.begin(), self_exe);
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t pid = 0;
    if (posix_spawn(&pid, self_exe.c_str(), nullptr, nullptr, argv.data(), environ) != 0) {
      throw Error(ErrorCode::kIoFailure, "cannot start " + self_exe);
    }
    running.emplace(pid, i);
  }
  while (!running.empty()) reap();

  ordered_json summary = ordered_json::array();
  int worst = 0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    ordered_json entry{{"order", orders[i]}, {"exitCode", codes[i]}};
    const fs::path report = fs::path(s.out) / orders[i] / "report.json";
    if (codes[i] == 0 && fs::exists(report)) entry["final"] = ordered_json::parse(readFile(report))["final"];
    summary.push_back(entry);
    if (codes[i] != 0 && worst == 0) worst = codes[i];
  }
  const std::string text = summary.dump(2) + "\n";
  writeFile(fs::path(s.out) / "sweep.json", text);
  std::cout << text;
  return worst;
}

std::string selfExecutable(const char* argv0) {
  std::error_code ec;
  const fs::path p = fs::read_symlink("/proc/self/exe", ec);
  return ec ? std::string(argv0) : p.string();
}

int run(int argc, char** argv) {
  CLI::App app{"Schema-aware scaling of relational datasets with feature tweaking."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand help for every subcommand");

  std::vector<std::pair<Settings, std::unique_ptr<Binder>>> subs;
  subs.reserve(7);
  auto sub = [&](const char* name, const char* help) -> Binder& {
    CLI::App* a = app.add_subcommand(name, help);
    subs.emplace_back();
    subs.back().second = std::make_unique<Binder>(a, subs.back().first);
    return *subs.back().second;
  };

  Binder& scale = sub("scale", "Rescale table sizes without tweaking");
  scale.option("--schema", &Settings::schema, "schema JSON");
  scale.option("--data", &Settings::data, "input dataset directory");
  scale.option("--sizes", &Settings::sizes, "size target JSON (default: keep sizes)");
  scale.option("--seed", &Settings::seed, "random seed");
  scale.option("--out", &Settings::out, "output dataset directory");

  Binder& tweak = sub("tweak", "Tweak an already scaled dataset");
  tweak.option("--schema", &Settings::schema, "schema JSON");
  tweak.option("--data", &Settings::data, "scaled dataset directory");
  tweak.option("--reference", &Settings::reference, "dataset whose features become the targets");
  addRunFlags(tweak);
  tweak.option("--out", &Settings::out, "output directory");
  tweak.option("--journal", &Settings::journal, "journal path (default: <out>/journal.ndjson)");
  tweak.flag("--snapshots", &Settings::snapshots, "write <out>/iteration-N after each iteration");

  Binder& measure = sub("measure", "Feature and query errors of a dataset");
  measure.option("--schema", &Settings::schema, "schema JSON");
  measure.option("--data", &Settings::data, "dataset directory");
  measure.option("--reference", &Settings::reference, "dataset whose rescaled features are the targets");
  addRunFlags(measure);
  measure.option("--out", &Settings::out, "also write the JSON here");

  Binder& full = sub("run", "Scale, tweak and report");
  full.option("--schema", &Settings::schema, "schema JSON");
  full.option("--data", &Settings::data, "input dataset directory");
  full.option("--sizes", &Settings::sizes, "size target JSON (default: keep sizes)");
  addRunFlags(full);
  full.option("--out", &Settings::out, "output directory");
  full.option("--journal", &Settings::journal, "journal path (default: <out>/journal.ndjson)");
  full.flag("--snapshots", &Settings::snapshots, "write <out>/iteration-N after each iteration");

  Binder& overlap = sub("analyze-overlap", "Tool overlap graph and a maximum independent set");
  overlap.option("--schema", &Settings::schema, "schema JSON");
  overlap.option("--journal", &Settings::journal, "journal of a completed run");
  overlap.option("--tool", &Settings::tools, "tool that should appear even if it touched nothing");

  Binder& validate = sub("validate-target", "Check targets against the necessary conditions");
  validate.option("--schema", &Settings::schema, "schema JSON");
  validate.option("--targets", &Settings::targets, "target files")->expected(1, -1);
  validate.option("--sizes", &Settings::sizes, "size target JSON");
  validate.option("--data", &Settings::data, "dataset directory, for sizes and self-response counts");
  validate.flag("--no-self-responses", &Settings::noSelfResponses, "do not model self responses");
  validate.flag("--repair", &Settings::repair, "also emit repaired targets");
  validate.option("--out", &Settings::out, "write repaired targets here");

  Binder& sweep = sub("sweep", "Run several permutations as separate processes");
  sweep.option("--schema", &Settings::schema, "schema JSON");
  sweep.option("--data", &Settings::data, "input dataset directory");
  sweep.option("--sizes", &Settings::sizes, "size target JSON");
  addRunFlags(sweep);
  sweep.option("--orders", &Settings::orders, "permutations to run (default: all six)")->expected(1, -1);
  sweep.option("--jobs", &Settings::jobs, "concurrent runs");
  sweep.option("--out", &Settings::out, "output directory; one subdirectory per order");
  sweep.flag("--snapshots", &Settings::snapshots, "write iteration snapshots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    printError(to_string(ErrorCode::kConfigError), e.what());
    return 2;
  }

  const std::string self_exe = selfExecutable(argv[0]);
  const std::map<std::string, std::function<int(const Settings&)>> handlers{
      {"scale", cmdScale},
      {"tweak", cmdTweak},
      {"measure", cmdMeasure},
      {"run", cmdRun},
      {"analyze-overlap", cmdAnalyzeOverlap},
      {"validate-target", cmdValidateTarget},
      {"sweep", [&](const Settings& s) { return cmdSweep(s, self_exe); }},
  };
  for (const auto& [flags, binder] : subs) {
    if (binder->app()->parsed()) return handlers.at(binder->app()->get_name())(binder->resolve());
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    printError(to_string(e.code()), e.what());
    return exitCodeFor(e.code());
  } catch (const std::exception& e) {
    printError("InternalError", e.what());
    return 1;
  }
}
