// Acceptance checks: one PASS/FAIL (or SKIP when external data is absent)
// line per criterion, followed by the measured numbers. Exit status is
// nonzero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "netobs/netobs.hpp"
#include "oracle.hpp"

using namespace netobs;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

enum class Outcome { Pass, Fail, Skip };

int failures = 0;

void report(int id, const std::string& title, Outcome outcome, const std::string& detail) {
  const char* tag = outcome == Outcome::Pass ? "PASS" : outcome == Outcome::Fail ? "FAIL" : "SKIP";
  if (outcome == Outcome::Fail) ++failures;
  std::cout << tag << "  criterion " << id << ": " << title << '\n';
  std::istringstream lines(detail);
  std::string line;
  while (std::getline(lines, line)) std::cout << "      " << line << '\n';
  std::cout.flush();
}

Outcome verdict(bool ok) { return ok ? Outcome::Pass : Outcome::Fail; }

std::vector<Graph> corpus() {
  auto graphs = oracle::load_atlas(std::string(NETOBS_TEST_DATA) + "/atlas_connected.txt");
  for (auto& g : oracle::random_corpus(2024, 200)) graphs.push_back(std::move(g));
  return graphs;
}

// --- 1 ------------------------------------------------------------------------

void matching_oracle(const std::vector<Graph>& graphs) {
  const auto start = Clock::now();
  std::size_t mismatches = 0;
  for (const auto& g : graphs)
    if (maximum_matching(to_bipartite(g)).size != oracle::structural_rank(g)) ++mismatches;
  const double elapsed = seconds_since(start);
  std::ostringstream d;
  d << graphs.size() << " graphs (all connected graphs on 1..7 nodes plus 200 random on 2..12), "
    << mismatches << " mismatches, " << elapsed << " s";
  report(1, "maximum matching size equals brute force", verdict(mismatches == 0 && elapsed < 60.0), d.str());
}

// --- 2 ------------------------------------------------------------------------

void contraction_oracle(const std::vector<Graph>& graphs) {
  std::size_t count_bad = 0, single_bad = 0, union_bad = 0, matchings = 0, graphs_checked = 0;
  for (const auto& g : graphs) {
    const auto report = detect_contractions(g);
    const auto adj = oracle::bipartite(g);
    const std::size_t n = g.node_count();
    if (report.count() != n - oracle::matching_size(adj, n)) ++count_bad;
    const auto b = to_bipartite(g);
    bool union_ok = true;
    for (const auto& mate : oracle::all_maximum_matchings(adj, n)) {
      ++matchings;
      std::vector<std::pair<Node, Node>> pairs;
      for (Node p = 0; p < n; ++p)
        if (mate[p] >= 0) pairs.emplace_back(p, static_cast<Node>(mate[p]));
      const auto m = make_matching(b, pairs);
      const AuxiliaryGraph aux(b, m);
      const std::set<Node> unmatched(m.unmatched_plus.begin(), m.unmatched_plus.end());
      std::set<Node> joined;
      for (Node u : m.unmatched_plus) {
        const auto reach = alternating_reach(aux, u);
        std::size_t hits = 0;
        for (Node v : reach) hits += unmatched.count(v);
        if (hits != 1) ++single_bad;
        joined.insert(reach.begin(), reach.end());
      }
      if (std::vector<Node>(joined.begin(), joined.end()) != report.union_nodes) union_ok = false;
    }
    if (!union_ok) ++union_bad;
    ++graphs_checked;
  }
  std::ostringstream d;
  d << graphs_checked << " graphs, " << matchings << " maximum matchings enumerated\n"
    << "count != n - brute-force rank: " << count_bad << "\n"
    << "contractions without exactly one unmatched node: " << single_bad << "\n"
    << "graphs whose union changes across matchings: " << union_bad;
  report(2, "contractions agree with brute force; single unmatched node; union invariant",
         verdict(count_bad == 0 && single_bad == 0 && union_bad == 0), d.str());
}

// --- 3 ------------------------------------------------------------------------

void numeric_rank_check(const std::vector<Graph>& graphs) {
  // every tenth graph of the corpus gives 100 graphs of mixed size
  std::size_t agree = 0, total = 0;
  for (std::size_t i = 0; i < graphs.size() && total < 100 * 100; i += graphs.size() / 100) {
    const Graph& g = graphs[i];
    const std::size_t srank = structural_rank(g);
    const SensorSet none({0}, g.node_count());
    for (std::uint64_t draw = 0; draw < 100; ++draw) {
      const auto sys = realize_system(g, none, detail::derive_seed(i, draw), false);
      ++total;
      if (numeric_rank(sys.A, 1e-9) == srank) ++agree;
    }
  }
  const double rate = static_cast<double>(agree) / static_cast<double>(total);
  std::ostringstream d;
  d << total << " realizations (100 graphs x 100 draws), numeric rank == structural rank in " << agree
    << " (" << 100.0 * rate << "%)";
  report(3, "numeric rank of random realizations equals structural rank", verdict(rate >= 0.99), d.str());
}

// --- 4 and 5 --------------------------------------------------------------------

// Sparse connected graphs on 10..30 nodes, which carry several contractions.
std::vector<Graph> estimation_graphs() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> size(10, 30);
  std::vector<Graph> out;
  while (out.size() < 50) {
    const std::size_t n = size(rng);
    Graph g = oracle::random_connected(n, 1.0 / static_cast<double>(n), rng);
    if (rank_deficiency(g) >= 2) out.push_back(std::move(g));
  }
  return out;
}

constexpr std::size_t kHorizon = 300;

struct MseeOutcome {
  bool bounded = false;
  bool diverged = false;
  double tail = 0.0;
};

MseeOutcome simulate(const Graph& g, const SensorSet& s, std::uint64_t seed) {
  const auto sys = realize_system(g, s, seed, true);
  const auto run = run_kalman(sys, kHorizon, detail::derive_seed(seed, 1));
  MseeOutcome o;
  o.tail = run.tail_mean(50);
  o.diverged = run.diverged;
  o.bounded = !run.diverged && o.tail < 1e4;
  return o;
}

void dichotomy(const std::vector<Graph>& graphs) {
  const auto start = Clock::now();
  std::size_t valid_sets = 0, valid_bounded = 0, deficient_sets = 0, deficient_diverged = 0;
  double worst_valid = 0.0, largest_deficient = 0.0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const Graph& g = graphs[i];
    const auto report = detect_contractions(g);
    const SensorSet base = minimum_sensor_sets(g, report);

    std::vector<SensorSet> sets{base};
    // an equivalent substitute for the first sensor, when one exists
    const auto alt = recovery_candidates(g, base, base.nodes()[0], report);
    if (!alt.empty()) sets.push_back(base.without(base.nodes()[0]).with(alt.front()));
    // dropping one sensor leaves a deficiency of one
    sets.push_back(base.without(base.nodes()[0]));

    for (std::size_t k = 0; k < sets.size(); ++k) {
      const auto cover = validate_sensor_cover(g, sets[k], report);
      const auto o = simulate(g, sets[k], detail::derive_seed(i, k));
      if (cover.valid) {
        ++valid_sets;
        if (o.bounded) ++valid_bounded;
        worst_valid = std::max(worst_valid, o.tail);
      } else if (cover.verdict.deficiency_remaining >= 1) {
        ++deficient_sets;
        if (o.diverged) ++deficient_diverged;
        if (!o.diverged) largest_deficient = std::max(largest_deficient, o.tail);
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool observable_half = valid_bounded == valid_sets;
  const bool deficient_half = deficient_diverged == deficient_sets;
  std::ostringstream d;
  d << graphs.size() << " graphs, rho(A) in [1.05, 1.3], horizon " << kHorizon << ", 20 runs, " << elapsed
    << " s\n"
    << "valid sensor sets bounded (tail-50 < 1e4): " << valid_bounded << "/" << valid_sets
    << " (largest tail " << worst_valid << ")\n"
    << "deficient sensor sets diverged (> 1e6): " << deficient_diverged << "/" << deficient_sets
    << " (largest non-diverged tail " << largest_deficient << ")\n"
    << "a structural-rank deficiency leaves unobservable directions in the kernel of A, "
       "which do not grow";
  report(4, "observable sets stay bounded and deficient sets diverge",
         verdict(observable_half && deficient_half && elapsed < 300.0), d.str());
}

void recovery(const std::vector<Graph>& graphs) {
  std::size_t substitutions = 0, bounded = 0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const Graph& g = graphs[i];
    const auto report = detect_contractions(g);
    const SensorSet base = minimum_sensor_sets(g, report);
    for (Node failed : base.nodes()) {
      const auto candidates = recovery_candidates(g, base, failed, report);
      // one simulation per candidate would be 10^3 filters; the first two suffice per failure
      for (std::size_t c = 0; c < candidates.size() && c < 2; ++c) {
        ++substitutions;
        if (simulate(g, base.without(failed).with(candidates[c]), detail::derive_seed(i, 100 + failed)).bounded)
          ++bounded;
      }
    }
  }

  const Graph eleven = load_edge_list(std::string_view(
                                          "x1 x2\nx1 x4\nx3 x2\nx3 x4\nx5 x2\nx5 x4\nx6 x7\nx8 x7\n"
                                          "x9 x10\nx11 x10\nx2 x7\nx4 x10\n"))
                           .graph;
  auto at = [&](const char* label) { return *eleven.find_node(label); };
  const SensorSet s({at("x1"), at("x8"), at("x9")}, eleven.node_count());
  const std::size_t c1 = recovery_candidates(eleven, s, at("x1")).size();
  const std::size_t c8 = recovery_candidates(eleven, s, at("x8")).size();
  const std::size_t c9 = recovery_candidates(eleven, s, at("x9")).size();

  std::ostringstream d;
  d << "substitutions restoring bounded MSEE: " << bounded << "/" << substitutions << "\n"
    << "11-state graph, sensors {x1,x8,x9}: options for x1 = " << c1 << ", x8 = " << c8 << ", x9 = " << c9;
  report(5, "recovery substitutions restore bounded estimation",
         verdict(bounded == substitutions && substitutions > 0 && c1 == 2 && c8 == 1 && c9 == 1), d.str());
}

// --- 6 and 7 --------------------------------------------------------------------

std::string describe(const ExperimentReport& r) {
  std::ostringstream d;
  for (const auto& g : r.groups) {
    d << g.model;
    if (g.model == "ws") d << " p=" << g.p;
    d << ": mean size " << g.mean_contraction_size.mean << " (se " << g.mean_contraction_size.se
      << "), count " << g.contraction_count.mean << " (se " << g.contraction_count.se << "), degree var "
      << g.degree_variance.mean << ", clustering " << g.clustering.mean << "\n";
  }
  for (const auto& v : r.verdicts)
    d << (v.passed ? "ok  " : "NO  ") << v.name << ": gap " << v.gap << " threshold " << v.threshold << "\n";
  return d.str();
}

void sf_vs_csf() {
  const auto r = run_sf_vs_csf(300, 2, 1, 1, 50, 1);
  report(6, "SF exceeds CSF in mean contraction size and count by 2 SE", verdict(r.all_verdicts_passed()),
         describe(r));
}

void ws_sweep() {
  const auto r = run_ws_sweep(300, 3, {0.1, 0.3, 0.5, 1.0}, 50, 1);
  std::string d = describe(r);
  bool any = false;
  for (const auto& g : r.groups) any = any || g.contraction_count.mean > 0.0;
  if (!any) {
    // informational only: the verdict above is unchanged
    d += "no contractions at k=3: every node keeps its own k lattice edges, so degree >= 3 at any p\n";
    const auto thin = run_ws_sweep(300, 1, {0.1, 0.3, 0.5, 1.0}, 50, 1);
    d += "for reference, k=1 (not part of the verdict):\n" + describe(thin);
  }
  report(7, "WS: size falls, count and degree variance rise with p", verdict(r.all_verdicts_passed()), d);
}

// --- 8 ------------------------------------------------------------------------

struct RealTarget {
  const char* env;
  const char* name;
  std::size_t nodes, edges, contractions;
  double mean_size, clustering, clustering_tol;
};

void real_data() {
  const RealTarget targets[] = {
      {"NETOBS_POWER_GRID", "power grid", 4941, 6594, 575, 4.98, 0.103, 0.003},
      {"NETOBS_ROUTE_VIEW", "route view", 6474, 13895, 3568, 7.65, 0.00959, 0.0005},
  };
  std::ostringstream d;
  bool any = false, ok = true;
  for (const auto& t : targets) {
    const char* path = std::getenv(t.env);
    if (!path || !fs::exists(path)) {
      d << t.name << ": set " << t.env << " to an edge-list file to check\n";
      continue;
    }
    any = true;
    std::ifstream in(path);
    const Graph g = load_edge_list(in).graph;
    const auto c = detect_contractions(g);
    const double cc = clustering_global(g);
    const bool count_ok = c.count() == t.contractions;
    const bool size_ok = std::abs(c.mean_size() - t.mean_size) <= 0.05;
    const bool cc_ok = std::abs(cc - t.clustering) <= t.clustering_tol;
    ok = ok && count_ok && size_ok && cc_ok;
    d << t.name << ": n " << g.node_count() << " (expect " << t.nodes << "), edges " << g.edge_count()
      << " (expect " << t.edges << "), contractions " << c.count() << " (expect " << t.contractions
      << ", n - structural rank = " << g.node_count() - c.structural_rank << "), mean size " << c.mean_size()
      << " (expect " << t.mean_size << "), clustering " << cc << " (expect " << t.clustering << ")\n";
  }
  report(8, "real networks reproduce published contraction statistics",
         any ? verdict(ok) : Outcome::Skip, d.str());
}

// --- 9 ------------------------------------------------------------------------

double time_matching(const Graph& g) {
  const auto b = to_bipartite(g);
  double best = 1e300;
  for (int rep = 0; rep < 5; ++rep) {
    const auto start = Clock::now();
    const auto m = maximum_matching(b);
    best = std::min(best, seconds_since(start));
    if (m.size == 0) std::cerr << "";
  }
  return best;
}

void performance() {
  NetgenConfig cfg{.model = Model::SF, .n = 6474, .m = 2, .rng_seed = 3};
  const Graph g = generate(cfg);
  const auto start = Clock::now();
  const auto c = detect_contractions(g);
  const auto real = analyze_real(g);
  const double cc = clustering_global(g);
  const double analyze = seconds_since(start);

  std::ostringstream d;
  d << "analyze on SF n=" << g.node_count() << " edges=" << g.edge_count() << ": " << analyze << " s ("
    << c.count() << " contractions, clustering " << cc << ", " << real.minimum_sensor_count << " sensors)\n";
  std::vector<double> ratios;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.rng_seed = seed;
    cfg.n = 10000;
    const double small = time_matching(generate(cfg));
    cfg.n = 100000;
    const double large = time_matching(generate(cfg));
    ratios.push_back(large / small);
    d << "matching SF seed " << seed << ": n=1e4 " << small << " s, n=1e5 " << large << " s, ratio "
      << ratios.back() << "\n";
  }
  std::sort(ratios.begin(), ratios.end());
  const double ratio = ratios[ratios.size() / 2];
  d << "median ratio " << ratio << " (limit 20; sqrt(10) * 10 = 31.6 is the worst-case bound)";
  report(9, "analyze under 10 s at route-view scale; matching scales near sqrt(n)|E|",
         verdict(analyze < 10.0 && ratio <= 20.0), d.str());
}

// --- 10 -----------------------------------------------------------------------

struct Captured {
  int code = -1;
  std::string out;
};

Captured run_cli(const std::string& args) {
  const std::string command = std::string(NETOBS_CLI_PATH) + " " + args + " 2>/dev/null";
  Captured r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buffer;
  std::size_t got;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) r.out.append(buffer.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp_tree(const fs::path& root) {
  std::string all;
  std::vector<fs::path> files;
  if (fs::is_regular_file(root)) files.push_back(root);
  else if (fs::is_directory(root))
    for (const auto& e : fs::recursive_directory_iterator(root)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    if (!fs::is_regular_file(f)) continue;
    std::ifstream in(f, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    all += f.filename().string() + "\n" + s.str();
  }
  return all;
}

void reproducibility() {
  const std::string samples = NETOBS_SAMPLES;
  const fs::path tmp = fs::temp_directory_path() / "netobs_acceptance_repro";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze --input " + samples + "/eleven_state.txt --seed 7", ""},
      {"analyze --input " + samples + "/eleven_state.txt --format csv --seed 7", ""},
      {"place --input " + samples + "/eleven_state.txt --seed 7", ""},
      {"recover --input " + samples + "/eleven_state.txt --sensors x1,x8,x9 --failed x1 --seed 7", ""},
      {"estimate --input " + samples + "/eleven_state.txt --sensors x1,x8,x9 --horizon 100 --seed 7 --out ",
       "msee.csv"},
      {"generate --model sf --n 500 --m 2 --seed 7 --out ", "sf.txt"},
      {"generate --model csf --n 500 --m-r 1 --m-s 1 --seed 7 --out ", "csf.txt"},
      {"generate --model ws --n 500 --k 3 --p 0.3 --seed 7 --out ", "ws.txt"},
      {"experiment --spec " + samples + "/ws_sweep.spec --seed 7 --out-dir ", "ws_out"},
  };
  std::size_t identical = 0;
  std::ostringstream d;
  for (const auto& [args, target] : commands) {
    std::string outputs[2];
    int codes[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = tmp / std::to_string(run);
      fs::remove_all(dir);
      fs::create_directories(dir);
      const std::string full = target.empty() ? args : args + (dir / target).string();
      const auto r = run_cli(full);
      codes[run] = r.code;
      // output paths differ between the two runs, so compare file contents only
      outputs[run] = target.empty() ? r.out : slurp_tree(dir / target);
      if (target == "msee.csv") outputs[run] += r.out;
    }
    const bool same = codes[0] == 0 && codes[1] == 0 && outputs[0] == outputs[1] && !outputs[0].empty();
    if (same) ++identical;
    else d << "differs or failed: " << args << "\n";
  }
  fs::remove_all(tmp);
  d << identical << "/" << commands.size() << " subcommand invocations byte-identical across two runs";
  report(10, "CLI output is byte-identical for identical flags and seed", verdict(identical == commands.size()),
         d.str());
}

}  // namespace

int main() {
  std::cout.precision(6);
  const auto graphs = corpus();
  matching_oracle(graphs);
  contraction_oracle(graphs);
  numeric_rank_check(graphs);
  const auto estimation = estimation_graphs();
  dichotomy(estimation);
  recovery(estimation);
  sf_vs_csf();
  ws_sweep();
  real_data();
  performance();
  reproducibility();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
