#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sphereflow/errors.hpp"
#include "sphereflow/random_fields.hpp"
#include "sphereflow/resolvent.hpp"
#include "sphereflow/spectrum.hpp"

namespace sphereflow {
namespace {

using testing::box;
using testing::interval;
constexpr double kPi = std::numbers::pi;
const CgSettings kTight{.rel_tol = 1e-13, .max_iterations = 0};

TEST(SolveShifted, MatchesDenseSolve) {
  const Domain d = box({1.0, 2.0}, {9, 7});
  const Spectrum s = compute_spectrum(d);
  RandomFieldGenerator gen(s, 2);
  const Field rhs = gen.draw(FieldPopulation::rough, 1.0);
  for (double shift : {0.0, 0.3, 50.0}) {
    const Eigen::MatrixXd M = testing::dense_laplacian(d) + shift * Eigen::MatrixXd::Identity(63, 63);
    const Field oracle = testing::from_eigen(d, M.ldlt().solve(testing::to_eigen(rhs)));
    CgStats stats;
    const Field x = solve_shifted(d, shift, rhs, kTight, nullptr, &stats);
    EXPECT_LT(l2_norm(d, x - oracle), 1e-11 * l2_norm(d, oracle));
    EXPECT_GT(stats.iterations, 0u);
    EXPECT_LE(stats.relative_residual, 1e-13);
  }
}

TEST(SolveShifted, ZeroRightHandSideAndErrors) {
  const Domain d = interval(kPi, 31);
  EXPECT_EQ(solve_shifted(d, 1.0, Field(d), kTight), Field(d));
  const Spectrum s = compute_spectrum(d);
  RandomFieldGenerator gen(s, 2);
  const Field rhs = gen.draw(FieldPopulation::rough, 1.0);
  EXPECT_THROW(solve_shifted(d, -1.0, rhs, kTight), InvalidArgument);
  EXPECT_THROW(solve_shifted(d, 0.0, rhs, {.rel_tol = 1e-14, .max_iterations = 2}), ConvergenceError);
  try {
    solve_shifted(d, 0.0, rhs, {.rel_tol = 1e-14, .max_iterations = 2});
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 2u);
    EXPECT_GT(e.residual(), 1e-14);
  }
  EXPECT_THROW(CgSettings({.rel_tol = 0.0}).validate(), InvalidArgument);
}

TEST(Resolvent, GroundModeSpectralIdentity) {
  const Domain d = interval(kPi, 127);
  const Spectrum s = compute_spectrum(d);
  const Field e1 = s.ground_mode();
  const double l1 = d.lambda1_discrete();
  EXPECT_LT(l2_norm(d, resolvent_solve(d, 1.0, e1, kTight) - (1.0 / (1.0 + l1)) * e1), 1e-11);
  const Field via_phi = apply_phi_of_A(s, [](double l) { return 1.0 / (1.0 + l); }, e1);
  EXPECT_LT(l2_norm(d, resolvent_solve(d, 1.0, e1, kTight) - via_phi), 1e-11);
  EXPECT_EQ(resolvent_solve(d, 1.0, Field(d), kTight), Field(d));
  EXPECT_THROW(resolvent_solve(d, 0.0, e1, kTight), InvalidArgument);
}

TEST(Resolvent, NormBoundOnRandomData) {
  const Domain d = interval(kPi, 63);
  const Spectrum s = compute_spectrum(d);
  RandomFieldGenerator gen(s, 17);
  for (int t = 0; t < 20; ++t) {
    const Field f = gen.draw(t % 2 ? FieldPopulation::rough : FieldPopulation::low_pass, 5.0);
    EXPECT_LE(l2_norm(d, resolvent_solve(d, 1000.0, f, kTight)), 5.0 / 1000.0);
  }
}

TEST(Yosida, ApproachesIdentity) {
  const Domain d = interval(kPi, 63);
  const Spectrum s = compute_spectrum(d);
  const Field e1 = s.ground_mode();
  const double l1 = d.lambda1_discrete();
  EXPECT_LT(l2_norm(d, yosida(d, 1.0, e1, kTight) - (1.0 / (1.0 + l1)) * e1), 1e-11);
  EXPECT_LE(l2_norm(d, yosida(d, 1e6, e1, kTight) - e1), l1 / 1e6 * (1.0 + 1e-9));
  EXPECT_EQ(yosida(d, 3.0, Field(d), kTight), Field(d));
}

TEST(OperatorNorm, IdentityAndResolvent) {
  const Domain d = interval(kPi, 63);
  const LinearMap id = [](const Field& x) { return x; };
  const NormEstimate one = operator_norm_estimate(id, d, 50, 1);
  EXPECT_NEAR(one.value, 1.0, 1e-14);
  EXPECT_TRUE(one.converged);

  const LinearMap r = [&](const Field& x) { return resolvent_solve(d, 4.0, x, kTight); };
  const NormEstimate est = operator_norm_estimate(r, d, 63, 7);
  EXPECT_NEAR(est.value, 1.0 / (4.0 + d.lambda1_discrete()), 1e-12);
  EXPECT_LT(est.value, 0.25);

  const double mu = 10.0;
  const LinearMap defect = [&](const Field& x) { return x - mu * resolvent_solve(d, mu, x, kTight); };
  const Spectrum s = compute_spectrum(d);
  const NormEstimate def = operator_norm_estimate(defect, d, 63, 3);
  EXPECT_NEAR(def.value, s.lambda_max() / (mu + s.lambda_max()), 1e-9);
  EXPECT_LE(def.value, 1.0);
}

TEST(OperatorNorm, MatchesDenseSingularValue) {
  const Domain d = box({1.0, 1.0}, {6, 5});
  const Eigen::MatrixXd A = testing::dense_laplacian(d);
  const Eigen::MatrixXd M = (A + 2.0 * Eigen::MatrixXd::Identity(30, 30)).inverse() * A;
  const LinearMap op = [&](const Field& x) { return testing::from_eigen(d, M * testing::to_eigen(x)); };
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  EXPECT_NEAR(operator_norm_estimate(op, d, 30, 5).value, svd.singularValues()(0), 1e-10);
}

TEST(InversePower, AgreesWithClosedForm) {
  for (const Domain& d : {interval(kPi, 255), box({kPi, 2.0}, {31, 17}), box({1.0, 1.0, 1.0}, {9, 9, 9})}) {
    EXPECT_NEAR(lambda1_inverse_power(d), d.lambda1_discrete(), 1e-10 * d.lambda1_discrete());
  }
}

}  // namespace
}  // namespace sphereflow
