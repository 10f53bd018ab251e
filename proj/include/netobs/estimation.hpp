#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "netobs/detail/parallel.hpp"
#include "netobs/error.hpp"
#include "netobs/graph.hpp"
#include "netobs/observability.hpp"

namespace netobs {

/// Numeric realization of a system graph with a sensor set.
struct LinearSystem {
  Eigen::MatrixXd A;  // n x n, A(j, i) != 0 iff {i, j} is an edge
  Eigen::MatrixXd C;  // one row per sensor, a single 1 at the measured state
  Eigen::MatrixXd V;  // process noise covariance
  Eigen::MatrixXd R;  // measurement noise covariance
  std::vector<Node> sensors;
  double spectral_radius = 0.0;

  std::size_t state_count() const { return static_cast<std::size_t>(A.rows()); }
};

struct RealizationOptions {
  double weight_min = 0.5;
  double weight_max = 1.5;
  double rho_min = 1.05;  // target band for the spectral radius when unstable
  double rho_max = 1.3;
  double process_noise = 0.01;
  double measurement_noise = 0.01;
};

namespace detail {

// Independent 64-bit stream seed for (seed, stream) pairs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline double spectral_radius(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Draws a weight of magnitude U(weight_min, weight_max) and random sign for
/// both directions of every edge (edges in sorted order, a_uv before a_vu).
/// With target_unstable the matrix is rescaled so that its spectral radius
/// lands uniformly in [rho_min, rho_max].
inline LinearSystem realize_system(const Graph& g, const SensorSet& s, std::uint64_t seed,
                                   bool target_unstable, const RealizationOptions& opt = {}) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> magnitude(opt.weight_min, opt.weight_max);
  std::bernoulli_distribution negative(0.5);
  auto draw = [&] {
    const double w = magnitude(rng);
    return negative(rng) ? -w : w;
  };

  LinearSystem sys;
  sys.A = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    sys.A(u, v) = draw();
    sys.A(v, u) = draw();
  }
  sys.spectral_radius = detail::spectral_radius(sys.A);
  if (target_unstable && sys.spectral_radius > 0.0) {
    std::uniform_real_distribution<double> target(opt.rho_min, opt.rho_max);
    const double scale = target(rng) / sys.spectral_radius;
    sys.A *= scale;
    sys.spectral_radius *= scale;
  }

  sys.sensors.assign(s.nodes().begin(), s.nodes().end());
  const auto m = static_cast<Eigen::Index>(sys.sensors.size());
  sys.C = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index k = 0; k < m; ++k) sys.C(k, static_cast<Eigen::Index>(sys.sensors[k])) = 1.0;
  sys.V = opt.process_noise * Eigen::MatrixXd::Identity(n, n);
  sys.R = opt.measurement_noise * Eigen::MatrixXd::Identity(m, m);
  return sys;
}

/// Number of singular values above relative_tolerance * sigma_max.
inline std::size_t numeric_rank(const Eigen::MatrixXd& m, double relative_tolerance) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sigma = svd.singularValues();
  if (sigma(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > relative_tolerance * sigma(0)) ++rank;
  return rank;
}

/// Numeric rank of [C_r; C_r A; ...; C_r A^(n-1)] for the selected sensor
/// rows r, singular values below n * eps * sigma_max treated as zero.
inline std::size_t gramian_rank(const LinearSystem& sys, std::span<const std::size_t> rows) {
  if (rows.empty()) throw PreconditionError("gramian rank needs at least one sensor row");
  const Eigen::Index n = sys.A.rows();
  const auto r = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd block(r, n);
  for (Eigen::Index k = 0; k < r; ++k) {
    if (rows[k] >= static_cast<std::size_t>(sys.C.rows()))
      throw PreconditionError("sensor row out of range");
    block.row(k) = sys.C.row(static_cast<Eigen::Index>(rows[k]));
  }
  Eigen::MatrixXd stacked(r * n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    stacked.middleRows(i * r, r) = block;
    block = block * sys.A;
  }
  return numeric_rank(stacked, static_cast<double>(n) * std::numeric_limits<double>::epsilon());
}

/// Observational equivalence of i and j over random realizations: the
/// Gramian ranks for {i}, {j} and {i, j} (each alongside the optional
/// context sensors) agree in every trial.
inline bool check_equivalence_numeric(const Graph& g, Node i, Node j, std::size_t trials,
                                      std::uint64_t seed, std::span<const Node> context = {}) {
  if (i == j) throw PreconditionError("equivalence check needs two distinct nodes");
  std::vector<Node> nodes(context.begin(), context.end());
  nodes.push_back(i);
  nodes.push_back(j);
  // the sensor set sorts nodes; remember where i and j ended up
  const SensorSet s(nodes, g.node_count());
  auto row_of = [&](Node v) {
    auto all = s.nodes();
    return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), v) - all.begin());
  };
  std::vector<std::size_t> base;
  for (Node c : context) base.push_back(row_of(c));
  auto rows_i = base, rows_j = base, rows_ij = base;
  rows_i.push_back(row_of(i));
  rows_j.push_back(row_of(j));
  rows_ij.push_back(row_of(i));
  rows_ij.push_back(row_of(j));

  for (std::size_t t = 0; t < trials; ++t) {
    const LinearSystem sys = realize_system(g, s, detail::derive_seed(seed, t), true);
    const std::size_t ri = gramian_rank(sys, rows_i);
    if (gramian_rank(sys, rows_j) != ri || gramian_rank(sys, rows_ij) != ri) return false;
  }
  return true;
}

struct KalmanOptions {
  std::size_t runs = 20;               // Monte-Carlo runs averaged into the trace
  double divergence_threshold = 1e6;   // on per-step MSEE
  double initial_covariance = 1.0;     // P0 = x0 covariance = this * I
  bool zero_gain = false;              // open-loop prediction only
};

struct KalmanRun {
  std::size_t horizon = 0;
  std::vector<double> msee_trace;  // per step, ||x_k - xhat_k|k||^2 / n averaged over runs
  double final_gain_norm = 0.0;
  bool diverged = false;
  std::optional<std::size_t> diverged_at;

  double tail_mean(std::size_t window) const {
    window = std::min(window, msee_trace.size());
    if (window == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t k = msee_trace.size() - window; k < msee_trace.size(); ++k) acc += msee_trace[k];
    return acc / static_cast<double>(window);
  }
};

/// Kalman filter with time-varying Riccati gain on x_{k+1} = A x_k + v_k,
/// y_k = C x_k + r_k, starting from xhat_0 = 0 and x_0 ~ N(0, P0).
///
/// The gain sequence does not depend on the data, so it is computed once.
/// Each Monte-Carlo run then propagates the estimation error
///   e_k = (I - K_k C)(A e_{k-1} + v_{k-1}) - K_k r_k,
/// which is exactly x_k - xhat_k|k of the filter driven by the simulated
/// truth, but avoids cancelling two exponentially growing vectors when A is
/// unstable. Run r draws its noise from derive_seed(seed, r).
inline KalmanRun run_kalman(const LinearSystem& sys, std::size_t horizon, std::uint64_t seed,
                            const KalmanOptions& opt = {}) {
  if (horizon == 0) throw PreconditionError("kalman horizon must be at least 1");
  if (opt.runs == 0) throw PreconditionError("kalman needs at least one Monte-Carlo run");
  if (!sys.A.allFinite() || !sys.C.allFinite() || !sys.V.allFinite() || !sys.R.allFinite())
    throw NumericError("system matrices contain non-finite entries", 0);
  const Eigen::Index n = sys.A.rows();
  const Eigen::Index m = sys.C.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  KalmanRun out;
  out.horizon = horizon;
  out.msee_trace.assign(horizon, 0.0);

  // gains and the step at which the covariance stopped being finite
  std::vector<Eigen::MatrixXd> gains(horizon);
  std::size_t finite_steps = horizon;
  Eigen::MatrixXd P = opt.initial_covariance * I;
  for (std::size_t k = 0; k < horizon; ++k) {
    Eigen::MatrixXd Pp = sys.A * P * sys.A.transpose() + sys.V;
    if (opt.zero_gain || m == 0) {
      gains[k] = Eigen::MatrixXd::Zero(n, m);
      P = Pp;
    } else {
      const Eigen::MatrixXd S = sys.C * Pp * sys.C.transpose() + sys.R;
      gains[k] = S.ldlt().solve(sys.C * Pp).transpose();
      P = (I - gains[k] * sys.C) * Pp;
      P = 0.5 * (P + P.transpose());
    }
    if (!P.allFinite() || !gains[k].allFinite()) {
      finite_steps = k;
      break;
    }
  }
  if (finite_steps > 0) out.final_gain_norm = gains[finite_steps - 1].norm();

  const Eigen::LLT<Eigen::MatrixXd> v_chol(sys.V);
  const Eigen::LLT<Eigen::MatrixXd> r_chol(sys.R);
  const Eigen::MatrixXd v_factor = v_chol.matrixL();
  const Eigen::MatrixXd r_factor = m > 0 ? Eigen::MatrixXd(r_chol.matrixL()) : Eigen::MatrixXd();
  const double p0 = std::sqrt(opt.initial_covariance);

  std::vector<std::vector<double>> per_run(opt.runs, std::vector<double>(horizon, 0.0));
  detail::parallel_for(opt.runs, [&](std::size_t run) {
    std::mt19937_64 rng(detail::derive_seed(seed, run));
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto normal = [&](Eigen::Index size) {
      Eigen::VectorXd z(size);
      for (Eigen::Index i = 0; i < size; ++i) z(i) = gauss(rng);
      return z;
    };
    Eigen::VectorXd e = p0 * normal(n);  // x_0 - xhat_0 with xhat_0 = 0
    auto& trace = per_run[run];
    for (std::size_t k = 0; k < horizon; ++k) {
      if (k >= finite_steps) {
        trace[k] = std::numeric_limits<double>::infinity();
        continue;
      }
      Eigen::VectorXd prior = sys.A * e + v_factor * normal(n);
      e = prior;
      if (m > 0) e -= gains[k] * (sys.C * prior + r_factor * normal(m));
      trace[k] = e.squaredNorm() / static_cast<double>(n);
    }
  });

  for (std::size_t k = 0; k < horizon; ++k) {
    double acc = 0.0;
    for (const auto& trace : per_run) acc += trace[k];
    const double value = acc / static_cast<double>(opt.runs);
    out.msee_trace[k] = value;
    if (out.diverged) continue;
    if (std::isnan(value) || (std::isinf(value) && k < finite_steps))
      throw NumericError("non-finite estimation error", k);
    if (value > opt.divergence_threshold || std::isinf(value)) {
      out.diverged = true;
      out.diverged_at = k;
    }
  }
  return out;
}

inline void write_msee_csv(std::ostream& out, const KalmanRun& run) {
  out << "k,msee\n";
  out.precision(17);
  for (std::size_t k = 0; k < run.msee_trace.size(); ++k) out << k << ',' << run.msee_trace[k] << '\n';
}

}  // namespace netobs
