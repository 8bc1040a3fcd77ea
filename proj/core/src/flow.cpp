#include "sphereflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sphereflow/errors.hpp"

namespace sphereflow {

std::string_view to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::projected_euler: return "projected_euler";
    case Integrator::imex: return "imex";
    case Integrator::backward_euler: return "backward_euler";
    case Integrator::etd: return "etd";
  }
  return "unknown";
}

std::string_view to_string(MultiplierForm form) {
  return form == MultiplierForm::projected ? "projected" : "closed_form";
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::horizon: return "horizon";
    case Termination::residual_stop: return "residual_stop";
    case Termination::solver_failure: return "solver_failure";
  }
  return "unknown";
}

std::optional<Integrator> parse_integrator(std::string_view name) {
  for (auto i : {Integrator::projected_euler, Integrator::imex, Integrator::backward_euler,
                 Integrator::etd}) {
    if (to_string(i) == name) return i;
  }
  return std::nullopt;
}

std::optional<MultiplierForm> parse_multiplier_form(std::string_view name) {
  if (name == "projected") return MultiplierForm::projected;
  if (name == "closed_form") return MultiplierForm::closed_form;
  return std::nullopt;
}

void FlowConfig::validate() const {
  if (!(p >= 2.0)) throw InvalidArgument("p ≥ 2 required");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("horizon T must be positive");
  if (!(dt < T)) throw InvalidArgument("dt must be smaller than the horizon T");
  if (sample_every < 1) throw InvalidArgument("sample_every must be at least 1");
  if (cutoff) {
    cutoff->validate();
    if (cutoff->p != p) throw InvalidArgument("cut-off exponent must match the flow exponent p");
  }
  if (yosida_mu && !(*yosida_mu > 0.0)) throw InvalidArgument("yosida mu must be positive");
  if (cutoff && yosida_mu) throw InvalidArgument("cut-off and Yosida modes are exclusive");
  if (stop_residual && !(*stop_residual > 0.0)) throw InvalidArgument("stop_residual must be positive");
  if (!(fixed_point_tol > 0.0)) throw InvalidArgument("fixed-point tolerance must be positive");
  if (fixed_point_cap < 1) throw InvalidArgument("fixed-point cap must be at least 1");
  linear_solver.validate();
}

std::size_t FlowConfig::steps() const {
  return static_cast<std::size_t>(std::llround(T / dt));
}

namespace {

Field renormalized(const Domain& domain, Field u) {
  const double n = l2_norm(domain, u);
  if (n == 0.0) return u;
  if (!(n >= 1e-12) || !std::isfinite(n)) {
    throw SolverError("norm collapsed to " + std::to_string(n) + " (step too large?)");
  }
  u *= 1.0 / n;
  return u;
}

void require_finite(const Field& u, const char* who) {
  if (!u.all_finite()) throw SolverError(std::string(who) + " produced non-finite values");
}

}  // namespace

Field explicit_part(const Domain& domain, const Field& u, const FlowConfig& config) {
  require_conforming(domain, u);
  const double p = config.p;
  Field nl = nonlinearity(u, p);
  if (config.cutoff) {
    Field g = cutoff_g(domain, u, *config.cutoff);
    g -= nl;
    return g;
  }
  double coef = multiplier(domain, u, p);
  if (config.multiplier == MultiplierForm::projected) {
    const double nsq = inner(domain, u, u);
    coef = nsq > 0.0 ? coef / nsq : 0.0;
  }
  if (config.yosida_mu) nl = yosida(domain, *config.yosida_mu, nl, config.linear_solver);
  Field out = coef * u;
  out -= nl;
  return out;
}

Field rhs(const Domain& domain, const Field& u, const FlowConfig& config) {
  Field out = explicit_part(domain, u, config);
  out -= apply_A(domain, u);
  return out;
}

Field step_projected_euler(const Domain& domain, const Field& u, const FlowConfig& config) {
  Field next = u;
  next.axpy(config.dt, rhs(domain, u, config));
  require_finite(next, "projected Euler step");
  return config.renormalize ? renormalized(domain, std::move(next)) : next;
}

namespace {

// (I + dt A)^{-1} b, written as (mu I + A)^{-1} (mu b) with mu = 1/dt.
Field implicit_solve(const Domain& domain, double dt, Field b, const CgSettings& settings,
                     const Field& guess) {
  const double mu = 1.0 / dt;
  b *= mu;
  return solve_shifted(domain, mu, b, settings, &guess);
}

}  // namespace

Field step_imex(const Domain& domain, const Field& u, const FlowConfig& config,
                const CgSettings& settings) {
  Field b = u;
  b.axpy(config.dt, explicit_part(domain, u, config));
  Field next = implicit_solve(domain, config.dt, std::move(b), settings, u);
  require_finite(next, "IMEX step");
  return config.renormalize ? renormalized(domain, std::move(next)) : next;
}

Field step_backward_euler(const Domain& domain, const Field& u, const FlowConfig& config,
                          const CgSettings& settings) {
  Field x = u;
  double diff = 0.0;
  for (std::size_t it = 0; it < config.fixed_point_cap; ++it) {
    Field b = u;
    b.axpy(config.dt, explicit_part(domain, x, config));
    Field next = implicit_solve(domain, config.dt, std::move(b), settings, x);
    require_finite(next, "backward Euler iterate");
    if (config.renormalize) next = renormalized(domain, std::move(next));
    Field delta = next;
    delta -= x;
    diff = l2_norm(domain, delta);
    x = std::move(next);
    if (diff <= config.fixed_point_tol * std::max(1.0, l2_norm(domain, x))) return x;
  }
  throw ConvergenceError("backward Euler fixed point did not converge (last change " +
                             std::to_string(diff) + ")",
                         diff, config.fixed_point_cap);
}

EtdPropagator::EtdPropagator(const Spectrum& spectrum, double dt) : spectrum_(&spectrum) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const auto lambdas = spectrum.eigenvalues();
  decay_.resize(lambdas.size());
  phi1_.resize(lambdas.size());
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double x = lambdas[k] * dt;
    decay_[k] = std::exp(-x);
    phi1_[k] = -std::expm1(-x) / lambdas[k];
  }
}

Field EtdPropagator::propagate(const Field& u, const Field& forcing) const {
  auto cu = spectrum_->to_coefficients(u);
  const auto cf = spectrum_->to_coefficients(forcing);
  for (std::size_t k = 0; k < cu.size(); ++k) cu[k] = decay_[k] * cu[k] + phi1_[k] * cf[k];
  return spectrum_->from_coefficients(cu);
}

Field step_etd(const Spectrum& spectrum, const Field& u, const FlowConfig& config) {
  const Domain& domain = spectrum.domain();
  const EtdPropagator prop(spectrum, config.dt);
  Field next = prop.propagate(u, explicit_part(domain, u, config));
  require_finite(next, "ETD step");
  return config.renormalize ? renormalized(domain, std::move(next)) : next;
}

DiagnosticsRecord evaluate_state(const Domain& domain, const Field& u, double p,
                                 const Spectrum* spectrum, double frac_alpha, double frac_beta) {
  DiagnosticsRecord rec;
  const Field au = apply_A(domain, u);
  const Field nl = nonlinearity(u, p);
  const double nsq = inner(domain, u, u);
  rec.l2_norm = std::sqrt(nsq);
  rec.grad_sq = inner(domain, au, u);
  rec.lp_p = lp_norm_p(domain, u, p);
  rec.energy = 0.5 * rec.grad_sq + rec.lp_p / p;
  rec.lambda = rec.grad_sq + rec.lp_p;
  Field grad = au;
  grad += nl;
  if (nsq > 0.0) grad.axpy(-rec.lambda / nsq, u);
  rec.stat_residual = l2_norm(domain, grad);
  rec.lap_nonlinearity = inner(domain, nl, au);
  if (spectrum != nullptr) {
    rec.frac_alpha = fractional_norm(*spectrum, u, frac_alpha);
    rec.frac_beta = fractional_norm(*spectrum, u, frac_beta);
  }
  return rec;
}

RunResult run_flow(const Domain& domain, const Field& u0, const FlowConfig& config,
                   const Spectrum* spectrum) {
  config.validate();
  require_conforming(domain, u0);
  if (!config.cutoff && std::abs(l2_norm(domain, u0) - 1.0) > 1e-8) {
    throw InvalidArgument("initial field must have unit L2 norm");
  }

  std::optional<Spectrum> owned;
  const bool wants_spectrum = config.integrator == Integrator::etd || config.fractional_norms;
  if (spectrum == nullptr && wants_spectrum) {
    const std::size_t cap = spectrum_cap_from_env();
    if (config.integrator == Integrator::etd || domain.total() <= cap) {
      owned = compute_spectrum(domain, cap);
      spectrum = &*owned;
    }
  }
  const Spectrum* frac_spectrum = config.fractional_norms ? spectrum : nullptr;
  std::optional<EtdPropagator> etd;
  if (config.integrator == Integrator::etd) etd.emplace(*spectrum, config.dt);

  Field u = u0;
  if (config.yosida_mu) {
    u = yosida(domain, *config.yosida_mu, u0, config.linear_solver);
    if (config.renormalize) u = renormalized(domain, std::move(u));
  }

  RunResult result;
  const std::size_t steps = config.steps();
  double cum = 0.0;

  auto diagnose = [&](const Field& state, std::size_t step) {
    DiagnosticsRecord rec =
        evaluate_state(domain, state, config.p, frac_spectrum, config.frac_alpha, config.frac_beta);
    rec.step = step;
    rec.t = static_cast<double>(step) * config.dt;
    return rec;
  };

  DiagnosticsRecord current = diagnose(u, 0);
  result.initial_energy = current.energy;
  result.max_energy_increase = -std::numeric_limits<double>::infinity();
  result.series.push_back(current);
  double last_sample_energy = current.energy;
  double next_dyadic = 1.0;

  auto finish = [&](Termination why) {
    result.termination = why;
    if (result.steps_taken == 0) result.max_energy_increase = 0.0;
    if (result.snapshots.empty() || result.snapshots.back().step != result.steps_taken) {
      result.snapshots.push_back({result.steps_taken, static_cast<double>(result.steps_taken) * config.dt, u});
    }
    result.final_field = u;
    return result;
  };

  if (config.stop_residual && current.stat_residual <= *config.stop_residual) {
    return finish(Termination::residual_stop);
  }

  for (std::size_t n = 1; n <= steps; ++n) {
    Field next;
    try {
      switch (config.integrator) {
        case Integrator::projected_euler: next = step_projected_euler(domain, u, config); break;
        case Integrator::imex: next = step_imex(domain, u, config, config.linear_solver); break;
        case Integrator::backward_euler:
          next = step_backward_euler(domain, u, config, config.linear_solver);
          break;
        case Integrator::etd: {
          next = etd->propagate(u, explicit_part(domain, u, config));
          require_finite(next, "ETD step");
          if (config.renormalize) next = renormalized(domain, std::move(next));
          break;
        }
      }
    } catch (const Error& e) {
      result.failure_message = e.what();
      if (result.series.back().step != result.steps_taken) result.series.push_back(current);
      return finish(Termination::solver_failure);
    }

    Field velocity = next;
    velocity -= u;
    const double speed = l2_norm(domain, velocity) / config.dt;
    cum += config.dt * speed * speed;
    u = std::move(next);
    result.steps_taken = n;

    const double previous_energy = current.energy;
    current = diagnose(u, n);
    current.cum_dissipation = cum;
    current.energy_eq_residual = std::abs(current.energy + cum - result.initial_energy);
    result.max_energy_increase = std::max(result.max_energy_increase, current.energy - previous_energy);

    const double t = current.t;
    while (t + 0.5 * config.dt >= next_dyadic) {
      const bool fresh = result.snapshots.empty() || result.snapshots.back().step != n;
      if (fresh && next_dyadic <= config.T + 0.5 * config.dt) result.snapshots.push_back({n, t, u});
      next_dyadic *= 2.0;
    }

    const bool stop = config.stop_residual && current.stat_residual <= *config.stop_residual;
    if (n % config.sample_every == 0 || n == steps || stop) {
      result.series.push_back(current);
      if (last_sample_energy > 0.0 && current.energy > 10.0 * last_sample_energy) {
        result.failure_message = "energy grew more than tenfold between samples";
        return finish(Termination::solver_failure);
      }
      last_sample_energy = current.energy;
    }
    if (stop) return finish(Termination::residual_stop);
  }
  return finish(Termination::horizon);
}

}  // namespace sphereflow
