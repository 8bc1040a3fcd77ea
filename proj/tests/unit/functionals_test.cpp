#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sphereflow/errors.hpp"
#include "sphereflow/functionals.hpp"
#include "sphereflow/random_fields.hpp"
#include "sphereflow/spectrum.hpp"

namespace sphereflow {
namespace {

using testing::interval;
constexpr double kPi = std::numbers::pi;

Field sine_profile(const Domain& d) {
  return sample(d, [](std::span<const double> x) { return std::sqrt(2.0 / kPi) * std::sin(x[0]); });
}

TEST(Nonlinearity, PointwiseValues) {
  const Domain d = interval(1.0, 3);
  const Field u(d, {-2.0, 0.5, 0.0});
  EXPECT_EQ(nonlinearity(u, 2.0), u);
  const Field n4 = nonlinearity(u, 4.0);
  EXPECT_DOUBLE_EQ(n4[0], -8.0);
  EXPECT_DOUBLE_EQ(n4[1], 0.125);
  EXPECT_DOUBLE_EQ(nonlinearity(u, 3.0)[0], -4.0);
  EXPECT_EQ(nonlinearity(u, 3.0)[2], 0.0);
  EXPECT_THROW(nonlinearity(u, 1.5), InvalidArgument);
}

TEST(Energy, SineProfile) {
  const Domain d = interval(kPi, 255);
  const Field u = sine_profile(d);
  EXPECT_NEAR(energy(d, u, 2.0), 1.0, 1e-4);
  EXPECT_NEAR(energy(d, u, 4.0), 0.5 + 3.0 / (8.0 * kPi), 1e-4);
  EXPECT_EQ(energy(d, Field(d), 4.0), 0.0);
  EXPECT_NEAR(multiplier(d, u, 2.0), 2.0, 1e-4);
  EXPECT_NEAR(multiplier(d, u, 4.0), 1.0 + 3.0 / (2.0 * kPi), 1e-4);
  EXPECT_EQ(multiplier(d, Field(d), 2.0), 0.0);
}

TEST(Energy, GroundModeClosedForm) {
  const Domain d = interval(kPi, 255);
  const Field e1 = compute_spectrum(d).ground_mode();
  EXPECT_NEAR(energy(d, e1, 2.0), 0.5 * d.lambda1_discrete() + 0.5, 1e-13);
  EXPECT_NEAR(multiplier(d, e1, 2.0), d.lambda1_discrete() + 1.0, 1e-13);
}

TEST(Energy, DirectionalDerivativeMatchesGradient) {
  const Domain d = interval(kPi, 63);
  const Spectrum s = compute_spectrum(d);
  RandomFieldGenerator gen(s, 9);
  for (double p : {2.0, 3.0, 4.0, 6.0}) {
    const Field u = gen.draw(FieldPopulation::low_pass, 1.0);
    const Field v = gen.draw(FieldPopulation::rough, 1.0);
    Field grad = apply_A(d, u);
    grad += nonlinearity(u, p);
    const double analytic = inner(d, grad, v);
    const double eps = 1e-5;
    const double fd = (energy(d, u + eps * v, p) - energy(d, u - (eps * v), p)) / (2.0 * eps);
    EXPECT_NEAR(fd, analytic, 1e-6 * std::max(1.0, std::abs(analytic))) << "p = " << p;
  }
}

TEST(TangentProject, Properties) {
  const Domain d = interval(kPi, 31);
  const Spectrum s = compute_spectrum(d);
  const std::size_t k1[] = {1};
  const std::size_t k2[] = {2};
  const Field u = s.mode(k1);
  const Field v = s.mode(k2);
  EXPECT_LT(l2_norm(d, tangent_project(d, u, u)), 1e-14);
  EXPECT_LT(l2_norm(d, tangent_project(d, u, v) - v), 1e-14);
  EXPECT_LT(l2_norm(d, tangent_project(d, u, 2.5 * u + v) - v), 1e-13);
  RandomFieldGenerator gen(s, 1);
  const Field w = gen.draw(FieldPopulation::rough, 4.0);
  EXPECT_NEAR(inner(d, tangent_project(d, u, w), u), 0.0, 1e-13);
  EXPECT_THROW(tangent_project(d, 2.0 * u, w), InvalidArgument);
}

TEST(ConstrainedGradient, StationaryAtGroundMode) {
  const Domain d = interval(kPi, 127);
  const Spectrum s = compute_spectrum(d);
  EXPECT_LT(l2_norm(d, constrained_gradient(d, s.ground_mode(), 2.0)), 1e-10);
}

TEST(ConstrainedGradient, TwoModeMixture) {
  const Domain d = interval(kPi, 127);
  const Spectrum s = compute_spectrum(d);
  const std::size_t k1[] = {1};
  const std::size_t k2[] = {2};
  const Field e1 = s.mode(k1);
  const Field e2 = s.mode(k2);
  const Field u = (1.0 / std::sqrt(2.0)) * (e1 + e2);
  const Field g = constrained_gradient(d, u, 2.0);
  const double l1 = d.axis_eigenvalue(0, 1);
  const double l2 = d.axis_eigenvalue(0, 2);
  const Field expected = ((l1 - l2) / (2.0 * std::sqrt(2.0))) * (e1 - e2);
  EXPECT_LT(l2_norm(d, g - expected), 1e-10);
  EXPECT_NEAR(l2_norm(d, g), (l2 - l1) / 2.0, 1e-10);
  EXPECT_NEAR(inner(d, g, u), 0.0, 1e-12);
  EXPECT_THROW(constrained_gradient(d, 2.0 * u, 2.0), InvalidArgument);
}

TEST(Cutoff, Branches) {
  const Domain d = interval(kPi, 63);
  const Spectrum s = compute_spectrum(d);
  const Field e1 = s.ground_mode();
  // S(c e1) = c^2 (lambda1h + 1) for p = 2.
  const double c = std::sqrt(2.0 / (d.lambda1_discrete() + 1.0));
  const Field u = c * e1;
  ASSERT_NEAR(multiplier(d, u, 2.0), 2.0, 1e-12);
  EXPECT_LT(l2_norm(d, cutoff_g(d, u, {.K = 5.0, .p = 2.0, .lambda1 = 1.0}) - 2.0 * u), 1e-12);
  EXPECT_LT(l2_norm(d, cutoff_g(d, u, {.K = 1.0, .p = 2.0, .lambda1 = 1.0}) - 0.5 * u), 1e-12);
  EXPECT_EQ(cutoff_g(d, Field(d), {.K = 1.0, .p = 2.0, .lambda1 = 1.0}), Field(d));
}

TEST(ModifiedOperator, BelowAndAboveCutoff) {
  const Domain d = interval(kPi, 63);
  const Spectrum s = compute_spectrum(d);
  const CutoffParams big{.K = 100.0, .p = 2.0, .lambda1 = 1.0};
  EXPECT_LT(l2_norm(d, modified_operator(d, s.ground_mode(), big)), 1e-10);
  EXPECT_EQ(modified_operator(d, Field(d), big), Field(d));

  RandomFieldGenerator gen(s, 21);
  const CutoffParams small{.K = 0.5, .p = 4.0, .lambda1 = 1.0};
  const Field u = gen.draw(FieldPopulation::rough, 3.0);
  double S = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) S += std::pow(std::abs(u[i]), 4.0);
  S = S * d.cell_volume() + inner(d, apply_A(d, u), u);
  ASSERT_GT(S, small.K);
  Field expected = apply_A(d, u);
  for (std::size_t i = 0; i < u.size(); ++i) expected[i] += u[i] * u[i] * u[i] - small.K * small.K / S * u[i];
  EXPECT_LT(l2_norm(d, modified_operator(d, u, small) - expected), 1e-10 * l2_norm(d, expected));
}

TEST(MonotonicityConstant, ClosedForm) {
  EXPECT_DOUBLE_EQ(monotonicity_constant({.K = 1.0, .p = 2.0, .lambda1 = 1.0}), 11.0);
  EXPECT_DOUBLE_EQ(monotonicity_constant({.K = 2.0, .p = 2.0, .lambda1 = 1.0}), 42.0);
  EXPECT_DOUBLE_EQ(monotonicity_constant({.K = 1.0, .p = 4.0, .lambda1 = 2.0}), (1.0 + (2.0 + 16.0 * 32.0) / 2.0) * 1.0);
  for (double K : {0.01, 1.0, 7.0}) {
    for (double p : {2.0, 3.0, 6.0}) EXPECT_GT(monotonicity_constant({.K = K, .p = p, .lambda1 = 0.3}), K);
  }
  EXPECT_THROW(monotonicity_constant({.K = 1.0, .p = 600.0, .lambda1 = 1.0}), InvalidArgument);
  EXPECT_THROW(monotonicity_constant({.K = 0.0, .p = 2.0, .lambda1 = 1.0}), InvalidArgument);
  EXPECT_THROW(monotonicity_constant({.K = 1.0, .p = 2.0, .lambda1 = -1.0}), InvalidArgument);
}

TEST(ConstraintValue, Values) {
  const Domain d = interval(kPi, 31);
  const Field e1 = compute_spectrum(d).ground_mode();
  EXPECT_NEAR(constraint_value(d, e1), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(constraint_value(d, Field(d)), -0.5);
  EXPECT_NEAR(constraint_value(d, 2.0 * e1), 1.5, 1e-12);
}

}  // namespace
}  // namespace sphereflow
