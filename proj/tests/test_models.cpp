#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "adaptnet/models/model.hpp"
#include "adaptnet/models/noise_fit.hpp"
#include "adaptnet/models/regularity.hpp"
#include "adaptnet/rng.hpp"

using namespace adaptnet;
using namespace adaptnet::models;

namespace {

AgentModel scalar_lms(double r, double minimizer, double noise_var) {
  std::vector<Eigen::MatrixXd> rs{Eigen::MatrixXd::Constant(1, 1, r)};
  std::vector<Eigen::VectorXd> ws{Eigen::VectorXd::Constant(1, minimizer)};
  return make_quadratic_model(rs, ws, {noise_var});
}

AgentModel pair_lms() {
  Eigen::MatrixXd r1(2, 2), r2(2, 2);
  r1 << 1.0, 0.2, 0.2, 0.5;
  r2 << 0.8, 0.0, 0.0, 1.5;
  Eigen::VectorXd w1(2), w2(2);
  w1 << 1.0, -1.0;
  w2 << 0.0, 2.0;
  return make_quadratic_model({r1, r2}, {w1, w2}, {0.1, 0.3});
}

}  // namespace

TEST_CASE("quadratic models validate their inputs") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.3, 0.1, 1.0;
  CHECK_THROWS_AS(make_quadratic_model({asym}, {Eigen::VectorXd::Zero(2)}, {0.1}),
                  validation_error);

  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(make_quadratic_model({indef}, {Eigen::VectorXd::Zero(2)}, {0.1}),
                  validation_error);

  CHECK_THROWS_AS(make_quadratic_model({Eigen::MatrixXd::Identity(2, 2)},
                                       {Eigen::VectorXd::Zero(3)}, {0.1}),
                  validation_error);
  CHECK_THROWS_AS(scalar_lms(1.0, 0.0, -0.5), validation_error);
}

TEST_CASE("the exact update is the covariance times the offset") {
  AgentModel m = pair_lms();
  Eigen::VectorXd w(2);
  w << 2.0, 1.0;
  // agent 0: R (w - w0) with R = [[1,.2],[.2,.5]], w0 = (1,-1)
  Eigen::VectorXd expect(2);
  expect << 1.0 * 1.0 + 0.2 * 2.0, 0.2 * 1.0 + 0.5 * 2.0;
  CHECK((true_update(m, 0, w) - expect).cwiseAbs().maxCoeff() < 1e-15);

  // at the minimizer the update vanishes identically
  CHECK(true_update(m, 1, m.agents[1].minimizer).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the square root factor reproduces the covariance") {
  AgentModel m = pair_lms();
  for (const Agent& a : m.agents)
    CHECK((a.sqrt_r * a.sqrt_r - a.r_u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("streamed updates are conditionally unbiased") {
  // scalar, R = 1, sigma_n^2 = 1, offset c = 1.5: the streamed update has
  // mean c and variance E[u^4] c^2 - c^2 + sigma_n^2 E[u^2] = 2 c^2 + 1.
  AgentModel m = scalar_lms(1.0, 0.0, 1.0);
  const double c = 1.5;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(1, c);

  RngStream stream = RngStream::derive(99, tag::trial, 0);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = stochastic_update(m, 0, w, stream)(0);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  const double oracle_var = 2.0 * c * c + 1.0;
  const double se = std::sqrt(oracle_var / n);
  CHECK(std::abs(mean - c) < 5.0 * se);
  // variance of the sample variance for this fourth-moment-finite draw is
  // close to (E v^4 - var^2)/n; a 5 percent relative tolerance is ~6 sigma here
  CHECK(std::abs(var / oracle_var - 1.0) < 0.05);
}

TEST_CASE("vector streamed updates match the excess-variance oracle") {
  // M = 2, R = I, sigma_n^2 = 0.5, offset norm^2 = 2:
  // E ||shat - s||^2 = ||c||^2 (M + 1) + sigma_n^2 tr(R) = 3 ||c||^2 + 1.
  std::vector<Eigen::MatrixXd> rs{Eigen::MatrixXd::Identity(2, 2)};
  std::vector<Eigen::VectorXd> ws{Eigen::VectorXd::Zero(2)};
  AgentModel m = make_quadratic_model(rs, ws, {0.5});

  Eigen::VectorXd w(2);
  w << 1.0, -1.0;
  Eigen::VectorXd s = true_update(m, 0, w);
  RngStream stream = RngStream::derive(7, tag::trial, 1);
  const int n = 200000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    acc += (stochastic_update(m, 0, w, stream) - s).squaredNorm();
  const double oracle = 3.0 * 2.0 + 1.0;
  CHECK(std::abs(acc / n / oracle - 1.0) < 0.05);
}

TEST_CASE("streamed updates consume a fixed number of draws") {
  AgentModel m = pair_lms();
  RngStream a = RngStream::derive(5, tag::trial, 0);
  RngStream b = RngStream::derive(5, tag::trial, 0);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(2);
  (void)stochastic_update(m, 0, w, a);
  // dim + 1 draws: advancing b by hand must leave both streams aligned
  for (int i = 0; i < 3; ++i) (void)b.gauss();
  CHECK(a.gauss() == b.gauss());
}

TEST_CASE("custom models refuse to stream data") {
  Eigen::MatrixXd map = Eigen::MatrixXd::Constant(1, 1, 0.5);
  AgentModel m = make_custom_model({map}, {Eigen::VectorXd::Zero(1)});
  RngStream s = RngStream::derive(1, tag::trial, 0);
  CHECK_THROWS_AS(stochastic_update(m, 0, Eigen::VectorXd::Ones(1), s),
                  validation_error);
}

TEST_CASE("noise fitting brackets a scalar model from above") {
  // oracle for R = 1, sigma_n^2 = 1, minimizer 0: excess = 2 |w|^2 + 1,
  // so any valid envelope needs alpha >= 2 and sigma_v^2 >= 1.
  AgentModel m = scalar_lms(1.0, 0.0, 1.0);
  NoiseConstants fit = estimate_noise_constants(m, 20000, 8.0);
  CHECK(fit.alpha >= 2.0);
  CHECK(fit.sigma_v2 >= 1.0);
  // the 1.5x safety factor should not balloon the constants
  CHECK(fit.alpha < 2.0 * 1.5 * 1.5);
  CHECK(fit.sigma_v2 < 1.0 * 1.5 * 1.5);
}

TEST_CASE("noise fitting is exact for noiseless flat models") {
  std::vector<Eigen::MatrixXd> rs{Eigen::MatrixXd::Zero(1, 1)};
  std::vector<Eigen::VectorXd> ws{Eigen::VectorXd::Zero(1)};
  AgentModel m = make_quadratic_model(rs, ws, {0.0});
  NoiseConstants fit = estimate_noise_constants(m, 2000, 4.0);
  CHECK(fit.alpha == 0.0);
  CHECK(fit.sigma_v2 == 0.0);
}

TEST_CASE("widening the probe radius never shrinks the fitted slope") {
  AgentModel m = pair_lms();
  NoiseConstants narrow = estimate_noise_constants(m, 4000, 2.0);
  NoiseConstants wide = estimate_noise_constants(m, 4000, 16.0);
  CHECK(wide.alpha >= narrow.alpha);
  CHECK(wide.sigma_v2 == narrow.sigma_v2);  // baseline fit is radius-independent
}

TEST_CASE("noise fitting rejects starvation budgets") {
  AgentModel m = pair_lms();
  CHECK_THROWS_AS(estimate_noise_constants(m, 999, 4.0), validation_error);
  CHECK_THROWS_AS(estimate_noise_constants(m, 4000, 0.0), validation_error);
}

TEST_CASE("fresh probes stay under the fitted envelope") {
  AgentModel m = pair_lms();
  NoiseConstants fit = estimate_noise_constants(m, 20000, 6.0);
  RngStream probe = RngStream::derive(0xABCD, tag::property, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd w(2);
    w << 4.0 * probe.gauss(), 4.0 * probe.gauss();
    if (w.norm() > 6.0) w *= 6.0 / w.norm();
    int agent = trial % 2;
    Eigen::VectorXd s = true_update(m, agent, w);
    double acc = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i)
      acc += (stochastic_update(m, agent, w, probe) - s).squaredNorm();
    // envelope distances are measured from the probed agent's own minimizer
    Eigen::VectorXd delta = w - m.agents[agent].minimizer;
    CHECK(acc / n <= fit.alpha * delta.squaredNorm() + fit.sigma_v2);
  }
}

TEST_CASE("regularity constants match hand-computable spectra") {
  // diagonal covariances: the Lipschitz constant is the largest covariance
  // eigenvalue, the monotonicity constant the smallest eigenvalue of the
  // p-weighted sum.
  Eigen::MatrixXd r1 = Eigen::Vector2d(1.0, 3.0).asDiagonal();
  Eigen::MatrixXd r2 = Eigen::Vector2d(2.0, 0.5).asDiagonal();
  AgentModel m = make_quadratic_model(
      {r1, r2}, {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)}, {0.1, 0.1});
  Eigen::VectorXd p(2);
  p << 0.25, 0.75;

  NoiseFitOptions opt;
  opt.sample_budget = 1000;
  RegularityConstants c = regularity_constants(m, p, opt);
  CHECK(std::abs(c.lambda_u - 3.0) < 1e-12);
  // weighted sum: diag(0.25*1 + 0.75*2, 0.25*3 + 0.75*0.5) = diag(1.75, 1.125)
  CHECK(std::abs(c.lambda_l - 1.125) < 1e-12);
  CHECK(c.lambda_h == 0.0);
  CHECK(std::isinf(c.r_h));
  CHECK(c.lambda_u * p.lpNorm<1>() >= c.lambda_l);
}

TEST_CASE("rank-deficient weighted sums are rejected as unobservable") {
  Eigen::MatrixXd r1 = Eigen::Vector2d(1.0, 0.0).asDiagonal();
  Eigen::MatrixXd r2 = Eigen::Vector2d(0.0, 1.0).asDiagonal();
  AgentModel m = make_quadratic_model(
      {r1, r2}, {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)}, {0.1, 0.1});
  Eigen::VectorXd p(2);
  p << 1.0, 0.0;  // agent 1 never contributes: the sum is singular
  NoiseFitOptions opt;
  opt.sample_budget = 1000;
  CHECK_THROWS_WITH(regularity_constants(m, p, opt),
                    Catch::Matchers::ContainsSubstring("observable"));

  p << 0.5, 0.5;  // both contribute: now fine
  CHECK_NOTHROW(regularity_constants(m, p, opt));
}

TEST_CASE("sampled increments respect the global constants") {
  AgentModel m = pair_lms();
  Eigen::VectorXd p(2);
  p << 0.4, 0.6;
  NoiseFitOptions opt;
  opt.sample_budget = 1000;
  RegularityConstants c = regularity_constants(m, p, opt);

  RngStream s = RngStream::derive(31, tag::property, 7);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x(2), y(2);
    x << 3.0 * s.gauss(), 3.0 * s.gauss();
    y << 3.0 * s.gauss(), 3.0 * s.gauss();
    Eigen::VectorXd diff = x - y;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
    for (int k = 0; k < 2; ++k) {
      Eigen::VectorXd dk = true_update(m, k, x) - true_update(m, k, y);
      CHECK(dk.norm() <= c.lambda_u * diff.norm() + 1e-12);
      sum += p(k) * dk;
    }
    CHECK(diff.dot(sum) >= c.lambda_l * diff.squaredNorm() - 1e-12);
  }
}

TEST_CASE("the weighted curvature bundle is consistent") {
  AgentModel m = pair_lms();
  Eigen::VectorXd p(2);
  p << 0.4, 0.6;
  HessianBundle h = hessian_bundle(m, p);
  Eigen::MatrixXd expect = 0.4 * m.agents[0].r_u + 0.6 * m.agents[1].r_u;
  CHECK((h.h_c - expect).cwiseAbs().maxCoeff() < 1e-15);

  NoiseFitOptions opt;
  opt.sample_budget = 1000;
  RegularityConstants c = regularity_constants(m, p, opt);
  CHECK(h.min_sym_eig >= c.lambda_l - 1e-10);
}
