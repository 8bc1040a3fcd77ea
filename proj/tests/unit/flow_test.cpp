#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sphereflow/errors.hpp"
#include "sphereflow/flow.hpp"
#include "sphereflow/random_fields.hpp"

namespace sphereflow {
namespace {

using testing::interval;
constexpr double kPi = std::numbers::pi;

struct Modes {
  Domain d;
  Spectrum s;
  Field e1;
  Field e2;
};

Modes modes(std::size_t n) {
  const Domain d = interval(kPi, n);
  Spectrum s = compute_spectrum(d);
  const std::size_t k1[] = {1};
  const std::size_t k2[] = {2};
  Field e1 = s.mode(k1);
  Field e2 = s.mode(k2);
  return {d, std::move(s), std::move(e1), std::move(e2)};
}

Field mixture(const Modes& m) { return 0.8 * m.e1 + 0.6 * m.e2; }

FlowConfig base_config(Integrator integrator = Integrator::imex) {
  FlowConfig c;
  c.p = 2.0;
  c.integrator = integrator;
  c.dt = 1e-3;
  c.T = 1.0;
  c.linear_solver = {.rel_tol = 1e-13, .max_iterations = 0};
  return c;
}

TEST(FlowConfig, Validation) {
  FlowConfig c = base_config();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.steps(), 1000u);
  c.p = 1.5;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = base_config();
  c.T = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = base_config();
  c.dt = 2.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = base_config();
  c.cutoff = CutoffParams{.K = 1.0, .p = 4.0, .lambda1 = 1.0};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.cutoff->p = 2.0;
  c.yosida_mu = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  EXPECT_EQ(parse_integrator("etd"), Integrator::etd);
  EXPECT_EQ(parse_integrator("rk4"), std::nullopt);
  EXPECT_EQ(to_string(Integrator::backward_euler), "backward_euler");
}

TEST(ExplicitPart, FormsAgreeOnTheSphere) {
  const Modes m = modes(63);
  const Field u = mixture(m);
  FlowConfig a = base_config();
  FlowConfig b = base_config();
  b.multiplier = MultiplierForm::closed_form;
  for (double p : {2.0, 4.0}) {
    a.p = b.p = p;
    EXPECT_LT(l2_norm(m.d, explicit_part(m.d, u, a) - explicit_part(m.d, u, b)), 1e-12);
  }
  EXPECT_LT(l2_norm(m.d, rhs(m.d, m.e1, base_config())), 1e-10);
  EXPECT_EQ(rhs(m.d, Field(m.d), base_config()), Field(m.d));
}

TEST(ExplicitPart, CutoffBranchOracle) {
  const Modes m = modes(63);
  FlowConfig c = base_config();
  c.cutoff = CutoffParams{.K = 0.5, .p = 2.0, .lambda1 = m.d.lambda1_discrete()};
  const Field u = 2.0 * mixture(m);
  const double S = multiplier(m.d, u, 2.0);
  ASSERT_GT(S, 0.5);
  const Field expected = (0.25 / S) * u - u - apply_A(m.d, u);
  EXPECT_LT(l2_norm(m.d, rhs(m.d, u, c) - expected), 1e-10);
}

TEST(Steppers, GroundModeIsFixed) {
  const Modes m = modes(63);
  FlowConfig c = base_config();
  EXPECT_LT(l2_norm(m.d, step_projected_euler(m.d, m.e1, c) - m.e1), 1e-12);
  EXPECT_LT(l2_norm(m.d, step_imex(m.d, m.e1, c, c.linear_solver) - m.e1), 1e-12);
  EXPECT_LT(l2_norm(m.d, step_backward_euler(m.d, m.e1, c, c.linear_solver) - m.e1), 1e-12);
  EXPECT_LT(l2_norm(m.d, step_etd(m.s, m.e1, c) - m.e1), 1e-12);
}

TEST(Steppers, ZeroStateStaysZero) {
  const Modes m = modes(31);
  FlowConfig c = base_config();
  for (bool renorm : {true, false}) {
    c.renormalize = renorm;
    EXPECT_EQ(step_projected_euler(m.d, Field(m.d), c), Field(m.d));
    EXPECT_EQ(step_imex(m.d, Field(m.d), c, c.linear_solver), Field(m.d));
    EXPECT_EQ(step_backward_euler(m.d, Field(m.d), c, c.linear_solver), Field(m.d));
    EXPECT_EQ(step_etd(m.s, Field(m.d), c), Field(m.d));
  }
}

TEST(Steppers, RenormalizedOutputHasUnitNorm) {
  const Modes m = modes(63);
  FlowConfig c = base_config();
  RandomFieldGenerator gen(m.s, 4);
  const Field u = gen.draw(FieldPopulation::low_pass, 1.0);
  EXPECT_NEAR(l2_norm(m.d, step_imex(m.d, u, c, c.linear_solver)), 1.0, 1e-14);
  EXPECT_NEAR(l2_norm(m.d, step_etd(m.s, u, c)), 1.0, 1e-14);
  EXPECT_NEAR(l2_norm(m.d, step_projected_euler(m.d, u, c)), 1.0, 1e-14);
  c.dt = 1e3;
  c.T = 1e4;
  const Field big = step_backward_euler(m.d, u, c, c.linear_solver);
  EXPECT_TRUE(big.all_finite());
  EXPECT_NEAR(l2_norm(m.d, big), 1.0, 1e-14);
}

TEST(Steppers, NormDriftIsSecondOrderPerStep) {
  const Modes m = modes(63);
  const Field u = (1.0 / std::sqrt(2.0)) * (m.e1 + m.e2);
  FlowConfig c = base_config();
  c.renormalize = false;
  double previous = 0.0;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    c.dt = dt;
    const double drift = std::abs(l2_norm(m.d, step_imex(m.d, u, c, c.linear_solver)) - 1.0);
    EXPECT_LT(drift, 10.0 * dt * dt);
    if (previous > 0.0) EXPECT_NEAR(previous / drift, 4.0, 0.4);
    previous = drift;
  }
}

TEST(Steppers, FirstOrderConsistency) {
  const Modes m = modes(63);
  const Field u = mixture(m);
  FlowConfig c = base_config();
  c.renormalize = false;
  const Field r = rhs(m.d, u, c);
  auto error = [&](auto step, double dt) {
    c.dt = dt;
    Field q = step(dt);
    q -= u;
    q *= 1.0 / dt;
    return l2_norm(m.d, q - r);
  };
  const auto imex = [&](double) { return step_imex(m.d, u, c, c.linear_solver); };
  const auto be = [&](double) { return step_backward_euler(m.d, u, c, c.linear_solver); };
  const auto etd = [&](double) { return step_etd(m.s, u, c); };
  for (auto* name : {"imex", "backward_euler", "etd"}) {
    const std::string which = name;
    auto err = [&](double dt) {
      if (which == "imex") return error(imex, dt);
      if (which == "etd") return error(etd, dt);
      return error(be, dt);
    };
    const double e2 = err(1e-3);
    const double e3 = err(1e-4);
    EXPECT_NEAR(e2 / e3, 10.0, 1.5) << which;
  }
}

TEST(Steppers, BackwardEulerAgreesWithImexToSecondOrder) {
  const Modes m = modes(63);
  FlowConfig c = base_config();
  c.p = 4.0;
  double previous = 0.0;
  for (double dt : {1e-3, 5e-4}) {
    c.dt = dt;
    const Field u = mixture(m);
    const double gap = l2_norm(m.d, step_backward_euler(m.d, u, c, c.linear_solver) - step_imex(m.d, u, c, c.linear_solver));
    EXPECT_LT(gap, 50.0 * dt * dt);
    if (previous > 0.0) EXPECT_NEAR(previous / gap, 4.0, 0.5);
    previous = gap;
  }

  RandomFieldGenerator gen(m.s, 8);
  const Field rough = gen.draw(FieldPopulation::low_pass, 1.0);
  previous = 0.0;
  for (double dt : {2.5e-4, 1.25e-4}) {
    c.dt = dt;
    const double gap =
        l2_norm(m.d, step_backward_euler(m.d, rough, c, c.linear_solver) - step_imex(m.d, rough, c, c.linear_solver));
    if (previous > 0.0) EXPECT_NEAR(previous / gap, 4.0, 0.5);
    previous = gap;
  }
}

TEST(Steppers, BackwardEulerFixedPointCap) {
  const Modes m = modes(63);
  FlowConfig c = base_config();
  c.fixed_point_cap = 1;
  c.fixed_point_tol = 1e-15;
  EXPECT_THROW(step_backward_euler(m.d, mixture(m), c, c.linear_solver), ConvergenceError);
}

TEST(Etd, HeatSemigroupWithoutForcing) {
  const Modes m = modes(31);
  RandomFieldGenerator gen(m.s, 6);
  const Field u = gen.draw(FieldPopulation::rough, 1.0);
  const EtdPropagator prop(m.s, 0.01);
  const auto c0 = m.s.to_coefficients(u);
  const auto c1 = m.s.to_coefficients(prop.propagate(u, Field(m.d)));
  const auto lambdas = m.s.eigenvalues();
  for (std::size_t k = 0; k < c0.size(); ++k) {
    EXPECT_NEAR(c1[k], std::exp(-lambdas[k] * 0.01) * c0[k], 1e-13);
  }
}

TEST(RunFlow, StationaryStart) {
  const Modes m = modes(63);
  for (Integrator integ : {Integrator::projected_euler, Integrator::imex, Integrator::backward_euler, Integrator::etd}) {
    FlowConfig c = base_config(integ);
    const RunResult r = run_flow(m.d, m.e1, c, &m.s);
    EXPECT_EQ(r.termination, Termination::horizon);
    EXPECT_LT(l2_norm(m.d, r.final_field - m.e1), 1e-9) << to_string(integ);
    EXPECT_NEAR(r.series.back().energy, r.initial_energy, 1e-12);
    EXPECT_EQ(r.steps_taken, 1000u);
  }
}

TEST(RunFlow, IntegratorsReachTheGroundState) {
  const Modes m = modes(63);
  for (Integrator integ : {Integrator::projected_euler, Integrator::imex, Integrator::backward_euler, Integrator::etd}) {
    FlowConfig c = base_config(integ);
    c.dt = integ == Integrator::projected_euler ? 1e-4 : 1e-2;
    c.T = 12.0;
    c.sample_every = 100;
    const RunResult r = run_flow(m.d, mixture(m), c, &m.s);
    ASSERT_EQ(r.termination, Termination::horizon) << r.failure_message;
    EXPECT_LT(l2_norm(m.d, r.final_field - m.e1), 1e-6) << to_string(integ);
    EXPECT_NEAR(r.series.back().lambda, m.d.lambda1_discrete() + 1.0, 1e-6);
    EXPECT_LE(r.max_energy_increase, 1e-12);
  }
}

TEST(RunFlow, RecordsAndSnapshots) {
  const Modes m = modes(63);
  FlowConfig c = base_config();
  c.T = 5.0;
  c.sample_every = 250;
  const RunResult r = run_flow(m.d, mixture(m), c);
  ASSERT_EQ(r.series.size(), 21u);
  EXPECT_DOUBLE_EQ(r.series[1].t, 0.25);
  EXPECT_EQ(r.series[0].cum_dissipation, 0.0);
  for (const auto& rec : r.series) {
    EXPECT_NEAR(rec.l2_norm, 1.0, 1e-13);
    EXPECT_NEAR(rec.energy, 0.5 * rec.grad_sq + 0.5 * rec.lp_p, 1e-14);
    ASSERT_TRUE(rec.frac_alpha.has_value());
    ASSERT_TRUE(rec.frac_beta.has_value());
  }
  ASSERT_EQ(r.snapshots.size(), 4u);
  EXPECT_DOUBLE_EQ(r.snapshots[0].t, 1.0);
  EXPECT_DOUBLE_EQ(r.snapshots[1].t, 2.0);
  EXPECT_DOUBLE_EQ(r.snapshots[2].t, 4.0);
  EXPECT_DOUBLE_EQ(r.snapshots[3].t, 5.0);
  EXPECT_EQ(r.snapshots.back().field, r.final_field);
}

TEST(RunFlow, EnergyEqualityResidualIsFirstOrder) {
  const Modes m = modes(127);
  FlowConfig c = base_config();
  c.T = 2.0;
  c.sample_every = 1000;
  const RunResult coarse = run_flow(m.d, mixture(m), c, &m.s);
  c.dt = 5e-4;
  c.sample_every = 2000;
  const RunResult fine = run_flow(m.d, mixture(m), c, &m.s);
  const double ratio = coarse.series.back().energy_eq_residual / fine.series.back().energy_eq_residual;
  EXPECT_NEAR(ratio, 2.0, 0.3);
}

TEST(RunFlow, Deterministic) {
  const Modes m = modes(63);
  FlowConfig c = base_config(Integrator::backward_euler);
  c.p = 4.0;
  c.T = 0.5;
  RandomFieldGenerator g1(m.s, 77);
  RandomFieldGenerator g2(m.s, 77);
  const RunResult a = run_flow(m.d, g1.draw(FieldPopulation::rough, 1.0), c);
  const RunResult b = run_flow(m.d, g2.draw(FieldPopulation::rough, 1.0), c);
  EXPECT_EQ(a.final_field, b.final_field);
  ASSERT_EQ(a.series.size(), b.series.size());
  for (std::size_t i = 0; i < a.series.size(); ++i) EXPECT_EQ(a.series[i].energy, b.series[i].energy);
}

TEST(RunFlow, ResidualStop) {
  const Modes m = modes(63);
  FlowConfig c = base_config();
  c.T = 50.0;
  c.dt = 1e-2;
  c.stop_residual = 1e-6;
  const RunResult r = run_flow(m.d, mixture(m), c);
  EXPECT_EQ(r.termination, Termination::residual_stop);
  EXPECT_LE(r.series.back().stat_residual, 1e-6);
  EXPECT_LT(r.steps_taken, 5000u);
}

TEST(RunFlow, SolverFailureIsReported) {
  const Modes m = modes(63);
  FlowConfig c = base_config(Integrator::backward_euler);
  c.fixed_point_cap = 1;
  c.fixed_point_tol = 1e-15;
  const RunResult r = run_flow(m.d, mixture(m), c);
  EXPECT_EQ(r.termination, Termination::solver_failure);
  EXPECT_FALSE(r.failure_message.empty());
  EXPECT_EQ(r.steps_taken, 0u);
}

TEST(RunFlow, ExplicitBlowUpIsCaught) {
  const Modes m = modes(63);
  FlowConfig c = base_config(Integrator::projected_euler);
  c.dt = 1e-2;
  c.renormalize = false;
  const RunResult r = run_flow(m.d, mixture(m), c);
  EXPECT_EQ(r.termination, Termination::solver_failure);
}

TEST(RunFlow, RejectsNonUnitStart) {
  const Modes m = modes(31);
  EXPECT_THROW(run_flow(m.d, 2.0 * m.e1, base_config()), InvalidArgument);
}

TEST(RunFlow, CutoffAboveThresholdMatchesPlainFlow) {
  const Modes m = modes(63);
  const Field u0 = mixture(m);
  FlowConfig plain = base_config();
  plain.T = 2.0;
  FlowConfig cut = plain;
  cut.cutoff = CutoffParams{.K = 2.0 * energy(m.d, u0, 2.0), .p = 2.0, .lambda1 = m.d.lambda1_discrete()};
  const RunResult a = run_flow(m.d, u0, plain);
  const RunResult b = run_flow(m.d, u0, cut);
  ASSERT_EQ(a.series.size(), b.series.size());
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    EXPECT_NEAR(a.series[i].energy, b.series[i].energy, 1e-9);
    EXPECT_NEAR(a.series[i].lambda, b.series[i].lambda, 1e-9);
  }
  EXPECT_LT(l2_norm(m.d, a.final_field - b.final_field), 1e-9);
}

TEST(RunFlow, ClosedFormMultiplierIsUnstableOffTheSphere) {
  const Modes m = modes(63);
  FlowConfig c = base_config();
  c.T = 5.0;
  c.renormalize = false;
  c.multiplier = MultiplierForm::closed_form;
  const RunResult closed = run_flow(m.d, mixture(m), c);
  c.multiplier = MultiplierForm::projected;
  const RunResult projected = run_flow(m.d, mixture(m), c);
  EXPECT_GT(std::abs(closed.series.back().l2_norm - 1.0), 100.0 * std::abs(projected.series.back().l2_norm - 1.0));
  EXPECT_LT(std::abs(projected.series.back().l2_norm - 1.0), 1e-2);
}

TEST(RunFlow, CutoffBelowThresholdDissipatesNorm) {
  const Modes m = modes(63);
  FlowConfig c = base_config();
  c.T = 2.0;
  c.renormalize = false;
  c.sample_every = 10;
  c.cutoff = CutoffParams{.K = 0.5, .p = 2.0, .lambda1 = m.d.lambda1_discrete()};
  const RunResult r = run_flow(m.d, mixture(m), c);
  for (std::size_t i = 1; i < r.series.size(); ++i) EXPECT_LT(r.series[i].l2_norm, r.series[i - 1].l2_norm);
}

TEST(RunFlow, YosidaModeConvergesAsMuGrows) {
  const Modes m = modes(63);
  FlowConfig plain = base_config();
  plain.p = 4.0;
  const Field reference = run_flow(m.d, mixture(m), plain).final_field;
  double previous = 1e300;
  for (double mu : {10.0, 100.0, 1000.0}) {
    FlowConfig c = plain;
    c.yosida_mu = mu;
    const double gap = l2_norm(m.d, run_flow(m.d, mixture(m), c).final_field - reference);
    EXPECT_LT(gap, previous);
    previous = gap;
  }
  EXPECT_LT(previous, 1e-2);
}

TEST(EvaluateState, MatchesFunctionals) {
  const Modes m = modes(63);
  const Field u = mixture(m);
  const DiagnosticsRecord r = evaluate_state(m.d, u, 4.0, &m.s, 0.5, 1.0);
  EXPECT_NEAR(r.energy, energy(m.d, u, 4.0), 1e-13);
  EXPECT_NEAR(r.lambda, multiplier(m.d, u, 4.0), 1e-13);
  EXPECT_NEAR(r.stat_residual, l2_norm(m.d, constrained_gradient(m.d, u, 4.0)), 1e-12);
  EXPECT_NEAR(*r.frac_alpha * *r.frac_alpha, r.grad_sq, 1e-11);
  EXPECT_NEAR(*r.frac_beta, l2_norm(m.d, apply_A(m.d, u)), 1e-10);
  EXPECT_GE(r.lap_nonlinearity, 0.0);
  EXPECT_FALSE(evaluate_state(m.d, u, 4.0).frac_alpha.has_value());
}

}  // namespace
}  // namespace sphereflow
