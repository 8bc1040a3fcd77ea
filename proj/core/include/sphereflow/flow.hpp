#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sphereflow/domain.hpp"
#include "sphereflow/functionals.hpp"
#include "sphereflow/resolvent.hpp"
#include "sphereflow/spectrum.hpp"

namespace sphereflow {

enum class Integrator { projected_euler, imex, backward_euler, etd };

/// How the multiplier term is extended off the unit sphere. Both agree
/// when ||u|| = 1.
enum class MultiplierForm {
  projected,    ///< lambda(u) / ||u||^2 : tangent projection of grad E, keeps ||u|| neutral
  closed_form,  ///< lambda(u) : literal multiplier, the sphere is unstable off it
};

enum class Termination { horizon, residual_stop, solver_failure };

std::string_view to_string(Integrator integrator);
std::string_view to_string(MultiplierForm form);
std::string_view to_string(Termination termination);
std::optional<Integrator> parse_integrator(std::string_view name);
std::optional<MultiplierForm> parse_multiplier_form(std::string_view name);

struct FlowConfig {
  double p = 2.0;
  Integrator integrator = Integrator::imex;
  double dt = 1e-3;
  double T = 1.0;
  bool renormalize = true;
  MultiplierForm multiplier = MultiplierForm::projected;
  /// Run the cut-off problem du/dt + G^K(u) = 0 instead of the plain flow.
  std::optional<CutoffParams> cutoff;
  /// Run the Yosida-regularized flow: N(u) filtered through J_mu, u0 -> J_mu u0.
  std::optional<double> yosida_mu;
  std::size_t sample_every = 1;
  /// Stop once ||grad_M E(u)|| falls to this value.
  std::optional<double> stop_residual;
  double fixed_point_tol = 1e-10;
  std::size_t fixed_point_cap = 100;
  CgSettings linear_solver{.rel_tol = 1e-12, .max_iterations = 0};
  /// Record ||A^alpha u|| and ||A^beta u|| when an eigenbasis is available.
  bool fractional_norms = true;
  double frac_alpha = 0.75;
  double frac_beta = 1.25;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t steps() const;
};

struct DiagnosticsRecord {
  std::size_t step = 0;
  double t = 0.0;
  double l2_norm = 0.0;
  double energy = 0.0;
  double grad_sq = 0.0;
  double lp_p = 0.0;
  double lambda = 0.0;
  double stat_residual = 0.0;
  double cum_dissipation = 0.0;
  double energy_eq_residual = 0.0;
  std::optional<double> frac_alpha;
  std::optional<double> frac_beta;
  /// (N(u), Au); the continuum value is (p-1) || |u|^{(p-2)/2} grad u ||^2 >= 0.
  double lap_nonlinearity = 0.0;
};

struct Snapshot {
  std::size_t step = 0;
  double t = 0.0;
  Field field;
};

struct RunResult {
  Field final_field;
  std::vector<DiagnosticsRecord> series;
  Termination termination = Termination::horizon;
  std::string failure_message;
  /// Stored at t = 1, 2, 4, ... within the horizon, plus the final state.
  std::vector<Snapshot> snapshots;
  std::size_t steps_taken = 0;
  double initial_energy = 0.0;
  /// Largest single-step energy increase E(u^{n+1}) - E(u^n) (negative when
  /// every step dissipates).
  double max_energy_increase = 0.0;
};

/// Explicit part F of the right-hand side, du/dt = -Au + F(u).
Field explicit_part(const Domain& domain, const Field& u, const FlowConfig& config);

/// Full right-hand side -Au + F(u).
Field rhs(const Domain& domain, const Field& u, const FlowConfig& config);

Field step_projected_euler(const Domain& domain, const Field& u, const FlowConfig& config);

/// (I + dt A) u+ = u + dt F(u), then optional renormalization.
Field step_imex(const Domain& domain, const Field& u, const FlowConfig& config,
                const CgSettings& settings);

/// Fixed point x <- (I + dt A)^{-1}(u + dt F(x)). With renormalization on,
/// every iterate is retracted to the unit sphere.
Field step_backward_euler(const Domain& domain, const Field& u, const FlowConfig& config,
                          const CgSettings& settings);

/// Exponential integrator on a fixed eigenbasis:
/// u+ = e^{-A dt} u + A^{-1}(I - e^{-A dt}) forcing.
class EtdPropagator {
 public:
  EtdPropagator(const Spectrum& spectrum, double dt);

  Field propagate(const Field& u, const Field& forcing) const;
  const Spectrum& spectrum() const noexcept { return *spectrum_; }

 private:
  const Spectrum* spectrum_;
  std::vector<double> decay_;
  std::vector<double> phi1_;
};

Field step_etd(const Spectrum& spectrum, const Field& u, const FlowConfig& config);

/// Integrates to the horizon (or residual stop). If spectrum is null, one is
/// computed when the integrator needs it or fractional norms are requested
/// and the grid is under the cap.
RunResult run_flow(const Domain& domain, const Field& u0, const FlowConfig& config,
                   const Spectrum* spectrum = nullptr);

/// Diagnostics of a single state (t, dissipation fields left at zero).
DiagnosticsRecord evaluate_state(const Domain& domain, const Field& u, double p,
                                 const Spectrum* spectrum = nullptr, double frac_alpha = 0.75,
                                 double frac_beta = 1.25);

}  // namespace sphereflow
