#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "netobs/contraction.hpp"
#include "netobs/detail/parallel.hpp"
#include "netobs/error.hpp"
#include "netobs/estimation.hpp"
#include "netobs/graph.hpp"
#include "netobs/netgen.hpp"

namespace netobs {

inline constexpr int kReportSchemaVersion = 1;

/// Statistics of one network realization.
struct RealizationRecord {
  std::string model;
  double p = 0.0;  // WS rewiring probability, 0 otherwise
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t edges = 0;
  double mean_degree = 0.0;
  double clustering = 0.0;
  double degree_variance = 0.0;
  std::size_t contraction_count = 0;
  double mean_contraction_size = 0.0;  // 0 when there are no contractions
  std::map<std::size_t, std::size_t> histogram;
};

struct Aggregate {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  double se = 0.0;  // sd / sqrt(n)
};

inline Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  const double n = static_cast<double>(values.size());
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / n;
  if (values.size() > 1) {
    double acc = 0.0;
    for (double v : values) acc += (v - a.mean) * (v - a.mean);
    a.sd = std::sqrt(acc / (n - 1.0));
    a.se = a.sd / std::sqrt(n);
  }
  return a;
}

// Ensemble statistics of all records sharing (model, p).
struct GroupSummary {
  std::string model;
  double p = 0.0;
  std::size_t realizations = 0;
  Aggregate contraction_count;
  Aggregate mean_contraction_size;
  Aggregate clustering;
  Aggregate degree_variance;
  Aggregate edges;
  std::map<std::size_t, std::size_t> pooled_histogram;
};

// Directional comparison; passed iff gap >= threshold.
struct Verdict {
  std::string name;
  bool passed = false;
  double gap = 0.0;
  double threshold = 0.0;
};

// Published value kept next to our numbers for human comparison only.
struct ReferenceValue {
  std::string label;
  double value = 0.0;
};

struct ExperimentReport {
  std::string kind;
  nlohmann::json config;
  std::vector<RealizationRecord> records;
  std::vector<GroupSummary> groups;
  std::vector<Verdict> verdicts;
  std::vector<ReferenceValue> references;
  std::size_t minimum_sensor_count = 0;  // analyze_real only

  const GroupSummary& group(const std::string& model, double p = 0.0) const {
    for (const auto& g : groups)
      if (g.model == model && g.p == p) return g;
    throw PreconditionError("no group " + model);
  }

  bool all_verdicts_passed() const {
    for (const auto& v : verdicts)
      if (!v.passed) return false;
    return true;
  }
};

inline RealizationRecord measure(const Graph& g, const std::string& model, double p,
                                 std::size_t seed_index, std::uint64_t seed) {
  RealizationRecord r;
  r.model = model;
  r.p = p;
  r.seed_index = seed_index;
  r.seed = seed;
  r.n = g.node_count();
  r.edges = g.edge_count();
  const DegreeStats deg = degree_variance(g);
  r.mean_degree = deg.mean;
  r.degree_variance = deg.variance;
  r.clustering = clustering_global(g);
  const ContractionReport c = detect_contractions(g);
  r.contraction_count = c.count();
  r.mean_contraction_size = c.mean_size();
  r.histogram = c.size_histogram;
  return r;
}

inline GroupSummary summarize(const std::vector<RealizationRecord>& records, const std::string& model,
                              double p) {
  GroupSummary s;
  s.model = model;
  s.p = p;
  std::vector<double> count, size, cc, var, edges;
  for (const auto& r : records) {
    if (r.model != model || r.p != p) continue;
    count.push_back(static_cast<double>(r.contraction_count));
    size.push_back(r.mean_contraction_size);
    cc.push_back(r.clustering);
    var.push_back(r.degree_variance);
    edges.push_back(static_cast<double>(r.edges));
    for (auto [k, v] : r.histogram) s.pooled_histogram[k] += v;
  }
  s.realizations = count.size();
  s.contraction_count = aggregate(count);
  s.mean_contraction_size = aggregate(size);
  s.clustering = aggregate(cc);
  s.degree_variance = aggregate(var);
  s.edges = aggregate(edges);
  return s;
}

namespace detail {

// Stream for realization i of group `group` under master_seed.
inline std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t group, std::uint64_t i) {
  return derive_seed(derive_seed(master_seed, group), i);
}

inline Verdict gap_verdict(const std::string& name, const Aggregate& high, const Aggregate& low,
                           double multiple = 2.0) {
  Verdict v;
  v.name = name;
  v.gap = high.mean - low.mean;
  v.threshold = multiple * std::sqrt(high.se * high.se + low.se * low.se);
  v.passed = v.gap >= v.threshold && v.gap > 0.0;
  return v;
}

inline Verdict order_verdict(const std::string& name, double earlier, double later, bool increasing) {
  Verdict v;
  v.name = name;
  v.gap = increasing ? later - earlier : earlier - later;
  v.threshold = 0.0;
  v.passed = v.gap > 0.0;
  return v;
}

}  // namespace detail

/// SF against CSF at equal links per node: contraction count and mean size
/// should both be larger for SF, each by at least two pooled standard errors.
inline ExperimentReport run_sf_vs_csf(std::size_t n, std::size_t m, std::size_t m_r, std::size_t m_s,
                                      std::size_t realizations, std::uint64_t master_seed,
                                      std::size_t seed_size = 0) {
  if (m != m_r + m_s)
    throw ConfigError("sf-vs-csf needs m = m_r + m_s (" + std::to_string(m) + " != " +
                      std::to_string(m_r) + " + " + std::to_string(m_s) + ")");
  if (realizations == 0) throw ConfigError("realizations must be at least 1");
  NetgenConfig sf{.model = Model::SF, .n = n, .m = m, .seed_size = seed_size};
  NetgenConfig csf{.model = Model::CSF, .n = n, .seed_size = seed_size, .m_r = m_r, .m_s = m_s};
  sf.validate();
  csf.validate();

  ExperimentReport report;
  report.kind = "sf_vs_csf";
  report.config = {{"n", n},         {"m", m},
                   {"m_r", m_r},     {"m_s", m_s},
                   {"seed_size", sf.effective_seed_size()},
                   {"realizations", realizations},
                   {"master_seed", master_seed}};
  report.records.resize(2 * realizations);
  detail::parallel_for(2 * realizations, [&](std::size_t job) {
    const std::size_t model_index = job / realizations;
    const std::size_t i = job % realizations;
    NetgenConfig cfg = model_index == 0 ? sf : csf;
    cfg.rng_seed = detail::realization_seed(master_seed, model_index, i);
    report.records[job] = measure(generate(cfg), to_string(cfg.model), 0.0, i, cfg.rng_seed);
  });

  report.groups = {summarize(report.records, "sf", 0.0), summarize(report.records, "csf", 0.0)};
  const auto& s = report.groups[0];
  const auto& c = report.groups[1];
  report.verdicts.push_back(
      detail::gap_verdict("sf_mean_size_exceeds_csf", s.mean_contraction_size, c.mean_contraction_size));
  report.verdicts.push_back(
      detail::gap_verdict("sf_count_exceeds_csf", s.contraction_count, c.contraction_count));
  report.references = {{"published_sf_mean_size_n1000", 18.89},
                       {"published_csf_mean_size_n1000", 6.72},
                       {"published_sf_count_n1000", 156},
                       {"published_csf_count_n1000", 109}};
  return report;
}

/// WS ensembles over an ascending grid of rewiring probabilities. Expected
/// trend: mean contraction size falls, count and degree variance rise.
inline ExperimentReport run_ws_sweep(std::size_t n, std::size_t k, const std::vector<double>& p_grid,
                                     std::size_t realizations, std::uint64_t master_seed) {
  if (p_grid.empty()) throw ConfigError("p grid is empty");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] >= 0.0 && p_grid[i] <= 1.0)) throw ConfigError("p grid values must lie in [0, 1]");
    if (i > 0 && !(p_grid[i] > p_grid[i - 1])) throw ConfigError("p grid must be strictly ascending");
  }
  if (realizations == 0) throw ConfigError("realizations must be at least 1");
  NetgenConfig base{.model = Model::WS, .n = n, .k = k};
  base.validate();

  ExperimentReport report;
  report.kind = "ws_sweep";
  report.config = {{"n", n},
                   {"k", k},
                   {"p_grid", p_grid},
                   {"realizations", realizations},
                   {"master_seed", master_seed}};
  const std::size_t total = p_grid.size() * realizations;
  report.records.resize(total);
  detail::parallel_for(total, [&](std::size_t job) {
    const std::size_t group = job / realizations;
    const std::size_t i = job % realizations;
    NetgenConfig cfg = base;
    cfg.p = p_grid[group];
    cfg.rng_seed = detail::realization_seed(master_seed, group, i);
    report.records[job] = measure(generate(cfg), "ws", cfg.p, i, cfg.rng_seed);
  });

  for (double p : p_grid) report.groups.push_back(summarize(report.records, "ws", p));
  for (std::size_t i = 1; i < report.groups.size(); ++i) {
    const auto& a = report.groups[i - 1];
    const auto& b = report.groups[i];
    const std::string step = "p" + nlohmann::json(a.p).dump() + "_to_p" + nlohmann::json(b.p).dump();
    report.verdicts.push_back(detail::order_verdict("mean_size_decreases_" + step,
                                                    a.mean_contraction_size.mean,
                                                    b.mean_contraction_size.mean, false));
    report.verdicts.push_back(detail::order_verdict("count_increases_" + step, a.contraction_count.mean,
                                                    b.contraction_count.mean, true));
    report.verdicts.push_back(detail::order_verdict("degree_variance_increases_" + step,
                                                    a.degree_variance.mean, b.degree_variance.mean, true));
  }
  report.references = {{"published_mean_size_p0.1_n1000", 13.71}, {"published_count_p0.1_n1000", 25},
                       {"published_mean_size_p0.5_n1000", 4.14},  {"published_count_p0.5_n1000", 101},
                       {"published_mean_size_p1.0_n1000", 3.42},  {"published_count_p1.0_n1000", 133}};
  return report;
}

/// Single-record report for a user-supplied network. The sensor count is
/// the contraction count plus one sensor for every component that has no
/// contraction, which equals the minimum sensor set size on connected input.
inline ExperimentReport analyze_real(const Graph& g, const std::string& name = "input") {
  ExperimentReport report;
  report.kind = "real";
  report.config = {{"name", name}};
  report.records.push_back(measure(g, "real", 0.0, 0, 0));
  report.groups.push_back(summarize(report.records, "real", 0.0));

  std::size_t components = 0;
  const auto component = connected_components(g, &components);
  std::vector<bool> has_contraction(components, false);
  const ContractionReport c = detect_contractions(g);
  for (const auto& set : c.contractions) has_contraction[component[set.generator]] = true;
  report.minimum_sensor_count = c.count();
  for (bool covered : has_contraction)
    if (!covered) ++report.minimum_sensor_count;
  return report;
}

// --- Serialization -----------------------------------------------------------

inline nlohmann::json to_json(const Aggregate& a) {
  return {{"mean", a.mean}, {"sd", a.sd}, {"se", a.se}};
}

inline nlohmann::json histogram_json(const std::map<std::size_t, std::size_t>& h) {
  auto j = nlohmann::json::object();
  for (auto [size, count] : h) j[std::to_string(size)] = count;
  return j;
}

inline nlohmann::json to_json(const RealizationRecord& r) {
  return {{"model", r.model},
          {"p", r.p},
          {"seed_index", r.seed_index},
          {"seed", r.seed},
          {"n", r.n},
          {"edges", r.edges},
          {"mean_degree", r.mean_degree},
          {"clustering", r.clustering},
          {"degree_variance", r.degree_variance},
          {"contraction_count", r.contraction_count},
          {"mean_contraction_size", r.mean_contraction_size},
          {"histogram", histogram_json(r.histogram)}};
}

inline nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = report.kind;
  j["config"] = report.config;
  auto records = nlohmann::json::array();
  for (const auto& r : report.records) records.push_back(to_json(r));
  j["records"] = std::move(records);
  auto groups = nlohmann::json::array();
  for (const auto& g : report.groups) {
    groups.push_back({{"model", g.model},
                      {"p", g.p},
                      {"realizations", g.realizations},
                      {"contraction_count", to_json(g.contraction_count)},
                      {"mean_contraction_size", to_json(g.mean_contraction_size)},
                      {"clustering", to_json(g.clustering)},
                      {"degree_variance", to_json(g.degree_variance)},
                      {"edges", to_json(g.edges)},
                      {"pooled_histogram", histogram_json(g.pooled_histogram)}});
  }
  j["groups"] = std::move(groups);
  auto verdicts = nlohmann::json::array();
  for (const auto& v : report.verdicts)
    verdicts.push_back({{"name", v.name}, {"passed", v.passed}, {"gap", v.gap}, {"threshold", v.threshold}});
  j["verdicts"] = std::move(verdicts);
  auto refs = nlohmann::json::object();
  for (const auto& r : report.references) refs[r.label] = r.value;
  j["references"] = std::move(refs);
  if (report.kind == "real") j["minimum_sensor_count"] = report.minimum_sensor_count;
  return j;
}

inline void write_records_csv(std::ostream& out, const ExperimentReport& report) {
  out << "model,p,seed_index,seed,n,edges,mean_degree,clustering,degree_variance,"
         "contraction_count,mean_contraction_size\n";
  out.precision(17);
  for (const auto& r : report.records) {
    out << r.model << ',' << r.p << ',' << r.seed_index << ',' << r.seed << ',' << r.n << ',' << r.edges
        << ',' << r.mean_degree << ',' << r.clustering << ',' << r.degree_variance << ','
        << r.contraction_count << ',' << r.mean_contraction_size << '\n';
  }
}

}  // namespace netobs
