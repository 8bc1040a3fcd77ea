#include "sphereflow/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace sphereflow {

double stationarity_residual(const Domain& domain, const Field& u, double p) {
  return l2_norm(domain, constrained_gradient(domain, u, p));
}

StationaryResult solve_ground_state(const Domain& domain, const Field& u0, FlowConfig config,
                                    double tol, const Spectrum* spectrum) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  config.renormalize = true;
  config.stop_residual = tol;
  config.cutoff.reset();
  config.yosida_mu.reset();
  if (spectrum == nullptr) config.fractional_norms = false;

  const RunResult run = run_flow(domain, u0, config, spectrum);
  const DiagnosticsRecord& last = run.series.back();
  StationaryResult out;
  out.field = run.final_field;
  out.multiplier = last.lambda;
  out.energy = last.energy;
  out.residual = stationarity_residual(domain, out.field, config.p);
  out.iterations = run.steps_taken;
  out.termination = run.termination;
  out.converged = run.termination == Termination::residual_stop;
  return out;
}

OmegaLimitReport detect_omega_limit(const Domain& domain, std::span<const Snapshot> snapshots,
                                    double p, double tol, double energy_tol) {
  if (snapshots.size() < 2) throw InvalidArgument("at least two snapshots required");
  const std::size_t n = snapshots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Field d = snapshots[i].field;
      d -= snapshots[j].field;
      if (l2_norm(domain, d) <= tol) {
        const std::size_t a = find(i);
        const std::size_t b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  OmegaLimitReport report;
  report.labels.resize(n);
  std::vector<std::size_t> root_label(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (root_label[r] == n) {
      root_label[r] = report.representatives.size();
      report.representatives.push_back(i);
    }
    report.labels[i] = root_label[r];
  }
  report.cluster_count = report.representatives.size();

  const double t_half = 0.5 * snapshots.back().t;
  std::optional<std::size_t> tail_label;
  report.tail_single_cluster = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (snapshots[i].t < t_half) continue;
    if (!tail_label) tail_label = report.labels[i];
    if (*tail_label != report.labels[i]) report.tail_single_cluster = false;
  }

  double e_min = std::numeric_limits<double>::infinity();
  double e_max = -e_min;
  for (std::size_t r : report.representatives) {
    const double e = energy(domain, snapshots[r].field, p);
    e_min = std::min(e_min, e);
    e_max = std::max(e_max, e);
  }
  report.energy_spread = e_max - e_min;
  report.energy_constant = report.energy_spread <= energy_tol;
  return report;
}

double h2_surrogate_distance(const Domain& domain, const Field& u, const Field& v) {
  Field d = u;
  d -= v;
  return l2_norm(domain, apply_A(domain, d));
}

LojasiewiczFit fit_lojasiewicz(std::span<const DiagnosticsRecord> series, double e_inf) {
  constexpr double kGapLo = 1e-12;
  constexpr double kGapHi = 1e-2;
  auto in_window = [&](const DiagnosticsRecord& r) {
    const double g = r.energy - e_inf;
    return g >= kGapLo && g <= kGapHi;
  };
  std::size_t end = series.size();
  while (end > 0 && !in_window(series[end - 1])) --end;
  std::size_t begin = end;
  while (begin > 0 && in_window(series[begin - 1])) --begin;
  const std::size_t m = end - begin;
  if (m < 3) throw InsufficientData("fit window has fewer than three samples (flow not converging?)");

  LojasiewiczFit fit;
  fit.e_inf = e_inf;
  fit.window_samples = m;
  fit.window_t_begin = series[begin].t;
  fit.window_t_end = series[end - 1].t;

  double st = 0.0, sy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    st += series[i].t;
    sy += std::log(series[i].energy - e_inf);
  }
  const double mt = st / static_cast<double>(m);
  const double my = sy / static_cast<double>(m);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double dt = series[i].t - mt;
    const double dy = std::log(series[i].energy - e_inf) - my;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (stt <= 0.0) throw InsufficientData("fit window spans zero time");
  const double slope = sty / stt;
  fit.rate = -slope;
  fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;

  for (int step = 10; step >= 1; --step) {
    const double theta = 0.05 * step;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double rho = series[i].stat_residual / std::pow(series[i].energy - e_inf, 1.0 - theta);
      lo = std::min(lo, rho);
      hi = std::max(hi, rho);
    }
    if (lo > 0.0 && hi / lo <= 100.0) {
      fit.theta = theta;
      fit.ratio_max = hi;
      fit.constant = 1.0 / lo;
      return fit;
    }
  }
  throw InsufficientData("no candidate exponent keeps the Lojasiewicz ratio bounded");
}

LojasiewiczFit fit_lojasiewicz(const Domain& domain, const RunResult& run, double e_inf) {
  LojasiewiczFit fit = fit_lojasiewicz(run.series, e_inf);
  double sigma = -1.0;
  for (const Snapshot& s : run.snapshots) {
    if (s.t < fit.window_t_begin || s.t > fit.window_t_end) continue;
    Field d = s.field;
    d -= run.final_field;
    sigma = std::max(sigma, l2_norm(domain, d));
  }
  if (sigma >= 0.0) fit.sigma = sigma;
  return fit;
}

}  // namespace sphereflow
