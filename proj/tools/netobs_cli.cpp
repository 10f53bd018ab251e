// netobs: contraction detection, sensor placement and recovery, Kalman
// verification, network generation and ensemble experiments.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "netobs/netobs.hpp"

namespace {

using namespace netobs;

constexpr std::uint64_t kDefaultSeed = 1;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

EdgeListResult read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load_edge_list(in);
}

// Writes to --out when given, stdout otherwise.
template <typename Fn>
void emit(const std::string& out_path, Fn&& write) {
  if (out_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  write(out);
}

nlohmann::json node_json(const Graph& g, Node v) { return {{"index", v}, {"label", g.label(v)}}; }

nlohmann::json nodes_json(const Graph& g, std::span<const Node> nodes) {
  auto out = nlohmann::json::array();
  for (Node v : nodes) out.push_back(node_json(g, v));
  return out;
}

Node resolve(const Graph& g, const std::string& token) {
  auto v = g.find_node(token);
  if (!v) throw UsageError("unknown node '" + token + "'");
  return *v;
}

SensorSet resolve_sensors(const Graph& g, const std::vector<std::string>& tokens) {
  std::vector<Node> nodes;
  for (const auto& t : tokens) nodes.push_back(resolve(g, t));
  try {
    return SensorSet(std::move(nodes), g.node_count());
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
}

void dump(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

// --- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
  std::string input, format = "json", out;
  std::uint64_t seed = kDefaultSeed;
};

void run_analyze(const AnalyzeArgs& a) {
  const EdgeListResult loaded = read_graph(a.input);
  const Graph& g = loaded.graph;
  const ContractionReport report = detect_contractions(g);

  if (a.format == "csv") {
    emit(a.out, [&](std::ostream& out) { write_histogram_csv(out, report.size_histogram); });
    return;
  }
  const ExperimentReport real = analyze_real(g);
  const DegreeStats deg = degree_variance(g);
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["input"] = std::filesystem::path(a.input).filename().string();
  j["graph"] = {{"n", g.node_count()},
                {"edges", g.edge_count()},
                {"dropped_self_loops", loaded.self_loops_dropped},
                {"dropped_duplicates", loaded.duplicates_dropped},
                {"mean_degree", deg.mean},
                {"degree_variance", deg.variance},
                {"clustering_global", clustering_global(g)},
                {"connected", is_connected(g)}};
  j["contractions"] = to_json(report);
  j["contractions"]["mean_size"] = report.mean_size();
  auto labelled = nlohmann::json::array();
  for (const auto& c : report.contractions) {
    std::vector<std::string> names;
    for (Node v : c.nodes) names.push_back(g.label(v));
    labelled.push_back({{"generator", node_json(g, c.generator)}, {"labels", names}});
  }
  j["contractions"]["labelled"] = std::move(labelled);
  j["minimum_sensor_count"] = real.minimum_sensor_count;
  emit(a.out, [&](std::ostream& out) { dump(out, j); });
}

// --- place / recover -----------------------------------------------------------

struct PlaceArgs {
  std::string input, out;
  std::uint64_t seed = kDefaultSeed;
};

void run_place(const PlaceArgs& a) {
  const Graph g = read_graph(a.input).graph;
  const SensorSet s = minimum_sensor_sets(g);
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["count"] = s.size();
  j["sensors"] = nodes_json(g, s.nodes());
  emit(a.out, [&](std::ostream& out) { dump(out, j); });
}

struct RecoverArgs {
  std::string input, failed, out;
  std::vector<std::string> sensors;
  std::uint64_t seed = kDefaultSeed;
};

void run_recover(const RecoverArgs& a) {
  const Graph g = read_graph(a.input).graph;
  const SensorSet s = resolve_sensors(g, a.sensors);
  const Node failed = resolve(g, a.failed);
  if (!s.contains(failed)) throw UsageError("failed node '" + a.failed + "' is not among the sensors");
  const auto candidates = recovery_candidates(g, s, failed);
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["failed"] = node_json(g, failed);
  j["sensors"] = nodes_json(g, s.nodes());
  j["count"] = candidates.size();
  j["candidates"] = nodes_json(g, candidates);
  emit(a.out, [&](std::ostream& out) { dump(out, j); });
}

// --- estimate ------------------------------------------------------------------

struct EstimateArgs {
  std::string input, out;
  std::vector<std::string> sensors;
  std::size_t horizon = 300;
  std::size_t runs = 20;
  std::uint64_t seed = kDefaultSeed;
};

void run_estimate(const EstimateArgs& a) {
  if (a.horizon == 0) throw UsageError("--horizon must be at least 1");
  if (a.runs == 0) throw UsageError("--runs must be at least 1");
  const Graph g = read_graph(a.input).graph;
  const SensorSet s = resolve_sensors(g, a.sensors);
  const LinearSystem sys = realize_system(g, s, a.seed, true);
  const KalmanRun run = run_kalman(sys, a.horizon, detail::derive_seed(a.seed, 1), {.runs = a.runs});
  const double tail = run.tail_mean(50);
  const std::string verdict = run.diverged ? "diverged" : tail < 1e4 ? "bounded" : "inconclusive";
  const ObservabilityVerdict structural = check_structural_observability(g, s);

  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["verdict"] = verdict;
  j["structurally_observable"] = structural.observable;
  j["deficiency_remaining"] = structural.deficiency_remaining;
  j["spectral_radius"] = sys.spectral_radius;
  j["tail50_mean_msee"] = tail;
  j["final_gain_norm"] = run.final_gain_norm;
  j["horizon"] = a.horizon;
  j["runs"] = a.runs;
  j["seed"] = a.seed;
  if (a.out.empty()) {
    write_msee_csv(std::cout, run);
    std::cerr << verdict << '\n';
  } else {
    emit(a.out, [&](std::ostream& out) { write_msee_csv(out, run); });
    dump(std::cout, j);
  }
}

// --- generate ------------------------------------------------------------------

struct GenerateArgs {
  std::string model, out;
  std::size_t n = 100;
  std::optional<std::size_t> m;
  std::size_t m_r = 1, m_s = 1, seed_size = 0, k = 3;
  double p = 0.0;
  std::uint64_t seed = kDefaultSeed;
};

void run_generate(const GenerateArgs& a) {
  NetgenConfig cfg;
  try {
    cfg.model = parse_model(a.model);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  cfg.n = a.n;
  cfg.m = a.m.value_or(2);
  cfg.m_r = a.m_r;
  cfg.m_s = a.m_s;
  cfg.seed_size = a.seed_size;
  cfg.k = a.k;
  cfg.p = a.p;
  cfg.rng_seed = a.seed;
  if (cfg.model == Model::CSF && a.m && *a.m != a.m_r + a.m_s)
    throw UsageError("csf needs m = m_r + m_s, got m=" + std::to_string(*a.m) + " m_r=" +
                     std::to_string(a.m_r) + " m_s=" + std::to_string(a.m_s));
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const Graph g = generate(cfg);
  emit(a.out, [&](std::ostream& out) { write_generated(out, g, cfg); });
}

// --- experiment ----------------------------------------------------------------

struct ExperimentArgs {
  std::string spec, out_dir;
  std::optional<std::uint64_t> seed;
};

void run_experiment_command(const ExperimentArgs& a) {
  ExperimentSpec spec = load_experiment_spec(a.spec);
  if (a.seed) spec.seed = *a.seed;
  const ExperimentReport report = run_experiment(spec);
  const nlohmann::json j = to_json(report);
  if (a.out_dir.empty()) {
    dump(std::cout, j);
    return;
  }
  const std::filesystem::path dir(a.out_dir);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "report.json") << j.dump(2) << '\n';
  std::ofstream records(dir / "records.csv");
  write_records_csv(records, report);
  for (const auto& g : report.groups) {
    std::string name = "histogram_" + g.model;
    if (g.model == "ws") name += "_p" + nlohmann::json(g.p).dump();
    std::ofstream hist(dir / (name + ".csv"));
    write_histogram_csv(hist, g.pooled_histogram);
  }
  std::cout << dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contraction detection and structural observability of network systems"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* cmd_analyze = app.add_subcommand("analyze", "Contractions, metrics and sensor count of an edge list");
  cmd_analyze->add_option("--input", analyze.input, "Edge-list file")->required();
  cmd_analyze->add_option("--format", analyze.format, "json (full report) or csv (size histogram)")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd_analyze->add_option("--out", analyze.out, "Output path (default stdout)");
  cmd_analyze->add_option("--seed", analyze.seed, "Seed (analysis is deterministic)");

  PlaceArgs place;
  auto* cmd_place = app.add_subcommand("place", "Minimum sensor set for structural observability");
  cmd_place->add_option("--input", place.input, "Edge-list file")->required();
  cmd_place->add_option("--out", place.out, "Output path (default stdout)");
  cmd_place->add_option("--seed", place.seed, "Seed (placement is deterministic)");

  RecoverArgs recover;
  auto* cmd_recover = app.add_subcommand("recover", "Replacement sensors after a sensor failure");
  cmd_recover->add_option("--input", recover.input, "Edge-list file")->required();
  cmd_recover->add_option("--sensors", recover.sensors, "Comma-separated node labels")
      ->required()
      ->delimiter(',');
  cmd_recover->add_option("--failed", recover.failed, "Label of the failed sensor node")->required();
  cmd_recover->add_option("--out", recover.out, "Output path (default stdout)");
  cmd_recover->add_option("--seed", recover.seed, "Seed (recovery is deterministic)");

  EstimateArgs estimate;
  auto* cmd_estimate = app.add_subcommand("estimate", "Kalman MSEE of a random unstable realization");
  cmd_estimate->add_option("--input", estimate.input, "Edge-list file")->required();
  cmd_estimate->add_option("--sensors", estimate.sensors, "Comma-separated node labels")
      ->required()
      ->delimiter(',');
  cmd_estimate->add_option("--horizon", estimate.horizon, "Filter iterations")->required();
  cmd_estimate->add_option("--runs", estimate.runs, "Monte-Carlo runs");
  cmd_estimate->add_option("--seed", estimate.seed, "Seed for weights and noise");
  cmd_estimate->add_option("--out", estimate.out, "CSV path for the k,msee trace");

  GenerateArgs generate_args;
  auto* cmd_generate = app.add_subcommand("generate", "Generate an SF, CSF or WS network");
  cmd_generate->add_option("--model", generate_args.model, "sf, csf or ws")->required();
  cmd_generate->add_option("--n", generate_args.n, "Node count");
  cmd_generate->add_option("--m", generate_args.m, "Links per new node (sf); must equal m_r + m_s for csf");
  cmd_generate->add_option("--m-r", generate_args.m_r, "Preferential links per new node (csf)");
  cmd_generate->add_option("--m-s", generate_args.m_s, "Triad links per new node (csf)");
  cmd_generate->add_option("--seed-size", generate_args.seed_size, "Initial ring size (default max(m+1,5))");
  cmd_generate->add_option("--k", generate_args.k, "Neighbors per side (ws)");
  cmd_generate->add_option("--p", generate_args.p, "Rewiring probability (ws)");
  cmd_generate->add_option("--seed", generate_args.seed, "Generator seed");
  cmd_generate->add_option("--out", generate_args.out, "Output path (default stdout)");

  ExperimentArgs experiment;
  auto* cmd_experiment = app.add_subcommand("experiment", "Run an ensemble experiment from a spec file");
  cmd_experiment->add_option("--spec", experiment.spec, "Experiment spec file")->required();
  cmd_experiment->add_option("--out-dir", experiment.out_dir, "Directory for report.json and CSVs");
  cmd_experiment->add_option("--seed", experiment.seed, "Overrides the spec's master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cmd_analyze) run_analyze(analyze);
    if (*cmd_place) run_place(place);
    if (*cmd_recover) run_recover(recover);
    if (*cmd_estimate) run_estimate(estimate);
    if (*cmd_generate) run_generate(generate_args);
    if (*cmd_experiment) run_experiment_command(experiment);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
