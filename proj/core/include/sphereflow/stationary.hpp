#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sphereflow/errors.hpp"
#include "sphereflow/flow.hpp"

namespace sphereflow {

/// Not enough converging samples to fit a decay law.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

struct StationaryResult {
  Field field;
  double multiplier = 0.0;
  double residual = 0.0;
  double energy = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  Termination termination = Termination::horizon;
};

/// ||grad_M E(u)|| for unit-norm u (tolerance 1e-6).
double stationarity_residual(const Domain& domain, const Field& u, double p);

/// Runs the normalized flow from u0 until the stationarity residual is <= tol
/// or the horizon config.T is reached (converged = false, best state kept).
StationaryResult solve_ground_state(const Domain& domain, const Field& u0, FlowConfig config,
                                    double tol, const Spectrum* spectrum = nullptr);

struct OmegaLimitReport {
  std::size_t cluster_count = 0;
  /// Cluster label per snapshot.
  std::vector<std::size_t> labels;
  /// Index of the first snapshot of each cluster.
  std::vector<std::size_t> representatives;
  /// Snapshots with t >= t_last / 2 all fall in one cluster.
  bool tail_single_cluster = false;
  /// max |E(w1) - E(w2)| over cluster representatives.
  double energy_spread = 0.0;
  bool energy_constant = false;
};

/// Single-linkage clustering of snapshots by L2 distance <= tol.
OmegaLimitReport detect_omega_limit(const Domain& domain, std::span<const Snapshot> snapshots,
                                    double p, double tol, double energy_tol = 1e-8);

/// ||A(u - v)||, a discrete H^2 surrogate distance.
double h2_surrogate_distance(const Domain& domain, const Field& u, const Field& v);

struct LojasiewiczFit {
  double theta = 0.0;
  /// C in (E - E_inf)^{1-theta} <= C ||grad_M E||, i.e. 1 / min rho.
  double constant = 0.0;
  /// max rho with rho = ||grad_M E|| / (E - E_inf)^{1-theta}.
  double ratio_max = 0.0;
  /// Exponential rate r of E(t) - E_inf ~ exp(-r t).
  double rate = 0.0;
  double r_squared = 0.0;
  double window_t_begin = 0.0;
  double window_t_end = 0.0;
  std::size_t window_samples = 0;
  double e_inf = 0.0;
  /// Largest distance to the final state over window snapshots, when known.
  std::optional<double> sigma;
};

/// Fits decay rate and Lojasiewicz exponent on the last contiguous window
/// where E - E_inf lies in [1e-12, 1e-2]. Throws InsufficientData when the
/// window has fewer than three samples or no candidate theta keeps the
/// ratio spread max rho / min rho within 100.
LojasiewiczFit fit_lojasiewicz(std::span<const DiagnosticsRecord> series, double e_inf);

/// Same, plus sigma from the run's snapshots inside the window.
LojasiewiczFit fit_lojasiewicz(const Domain& domain, const RunResult& run, double e_inf);

}  // namespace sphereflow
