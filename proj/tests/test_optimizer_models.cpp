#include <cmath>
#include <random>

#include "doctest.h"
#include "stabcert/optimizer_models.hpp"

using namespace stabcert;

TEST_CASE("theta_of") {
  CHECK(theta_of(1.0) == 0.0);
  CHECK(theta_of(4.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(theta_of(100.0) == doctest::Approx(9.0 / 11.0).epsilon(1e-15));
  CHECK_THROWS_AS(theta_of(0.5), std::invalid_argument);
  double prev = -1.0;
  for (double k = 1.0; k < 1e6; k *= 1.7) {
    const double th = theta_of(k);
    CHECK(th >= 0.0);
    CHECK(th < 1.0);
    CHECK(th > prev);
    prev = th;
  }
}

TEST_CASE("SectorBounds validation") {
  CHECK_NOTHROW(SectorBounds::make(1.0, 1.0, 1.0));
  CHECK_THROWS_AS(SectorBounds::make(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SectorBounds::make(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SectorBounds::make(1.0, 2.0, 0.0), std::invalid_argument);
  CHECK(SectorBounds::make(0.1, 1.0).kappa() == doctest::Approx(10.0));
}

TEST_CASE("sgd_step") {
  auto s = OptimizerState::zeros(1, false);
  const double zero[] = {0.0};
  CHECK(sgd_step(s, zero, 0.1).w[0] == 0.0);

  s.w = {1.0};
  const double two[] = {2.0};
  auto next = sgd_step(s, two, 0.1);
  CHECK(next.w[0] == doctest::Approx(0.8));
  CHECK(next.t == 1);

  // One exact step on 0.5 beta w^2 with eta = 1/beta lands on the minimizer.
  const double beta = 7.0;
  const double g[] = {beta * 1.0};
  CHECK(sgd_step(s, g, 1.0 / beta).w[0] == doctest::Approx(0.0));
}

TEST_CASE("nag_step") {
  auto unit_quadratic = [](std::span<const double> w) { return std::vector<double>(w.begin(), w.end()); };

  auto s = OptimizerState::zeros(1, true);
  auto still = nag_step(s, unit_quadratic, 0.1, 0.9);
  CHECK(still.w[0] == 0.0);
  CHECK((*still.v)[0] == 0.0);

  s.w = {1.0};
  auto next = nag_step(s, unit_quadratic, 0.1, 0.9);
  CHECK((*next.v)[0] == doctest::Approx(-0.1));
  CHECK(next.w[0] == doctest::Approx(0.9));
}

TEST_CASE("nag_step with mu = 0 equals sgd_step bit-for-bit") {
  Rng rng(11);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    OptimizerState s = OptimizerState::zeros(3, true);
    for (auto& x : s.w) x = n(rng);
    for (auto& x : *s.v) x = n(rng);
    const SymMatrix q = random_sector_matrix(3, 0.1, 2.0, rng);
    auto grad = [&](std::span<const double> w) { return q.matrix() * w; };
    const double eta = std::abs(n(rng)) + 1e-3;
    const auto a = nag_step(s, grad, eta, 0.0);
    const auto g = grad(s.w);
    const auto b = sgd_step(s, g, eta);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(a.w[i] == b.w[i]);
  }
}

TEST_CASE("nag_sq_step") {
  const auto bounds = SectorBounds::make(0.25, 1.0);  // kappa = 4, theta = 1/3
  OptimizerState s = OptimizerState::zeros(1, true);
  s.w = {2.0};
  *s.v = {2.0};
  const double zero[] = {0.0};
  auto fixed = nag_sq_step(s, zero, bounds);
  CHECK(fixed.w[0] == doctest::Approx(2.0));
  CHECK((*fixed.v)[0] == doctest::Approx(2.0));

  // f = 0.5 beta w^2 at w = 1: v1 = 0, w1 = -theta.
  s.w = {1.0};
  *s.v = {1.0};
  const double g[] = {bounds.beta * 1.0};
  auto next = nag_sq_step(s, g, bounds);
  CHECK((*next.v)[0] == doctest::Approx(0.0));
  CHECK(next.w[0] == doctest::Approx(-1.0 / 3.0));

  // kappa = 1 collapses to a 1/beta gradient step.
  const auto flat = SectorBounds::make(2.0, 2.0);
  s.w = {3.0};
  *s.v = {-5.0};
  const double g2[] = {0.7};
  CHECK(nag_sq_step(s, g2, flat).w[0] == doctest::Approx(3.0 - 0.7 / 2.0));
}

TEST_CASE("nag_sq_step difference dynamics follow a_alpha") {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double kappa : {1.0, 4.0, 25.0, 1e4}) {
    const auto bounds = SectorBounds::make(1.0 / kappa, 1.0);
    const double theta = theta_of(kappa);
    std::uniform_real_distribution<double> lam_dist(bounds.gamma, bounds.beta);
    for (int trial = 0; trial < 50; ++trial) {
      const double lam = lam_dist(rng);
      const Matrix a = a_alpha(theta, 1.0 - lam / bounds.beta);
      OptimizerState s = OptimizerState::zeros(1, true), sp = s;
      s.w = {u(rng)};
      *s.v = {u(rng)};
      sp.w = {u(rng)};
      *sp.v = {u(rng)};
      for (int t = 0; t < 20; ++t) {
        const double x[] = {s.w[0] - sp.w[0], (*s.v)[0] - (*sp.v)[0]};
        const auto predicted = a * std::span<const double>(x);
        const double g[] = {lam * s.w[0]};
        const double gp[] = {lam * sp.w[0]};
        s = nag_sq_step(s, g, bounds);
        sp = nag_sq_step(sp, gp, bounds);
        const double scale = std::max(1.0, std::abs(x[0]) + std::abs(x[1]));
        CHECK(std::abs((s.w[0] - sp.w[0]) - predicted[0]) <= 1e-13 * scale);
        CHECK(std::abs(((*s.v)[0] - (*sp.v)[0]) - predicted[1]) <= 1e-13 * scale);
      }
    }
  }
}

TEST_CASE("lure_of matrices") {
  const auto bounds = SectorBounds::make(0.25, 1.0);
  const auto nag = lure_of(NagSmoothQuadratic{}, bounds);
  CHECK(nag.a()(0, 0) == doctest::Approx(4.0 / 3.0));
  CHECK(nag.a()(0, 1) == doctest::Approx(-1.0 / 3.0));
  CHECK(nag.a()(1, 0) == 1.0);
  CHECK(nag.a()(1, 1) == 0.0);
  CHECK(nag.b()(0, 0) == -1.0);
  CHECK(nag.b()(1, 0) == 0.0);
  CHECK(nag.c()(0, 0) == doctest::Approx(4.0 / 3.0));
  CHECK(nag.c()(0, 1) == doctest::Approx(-1.0 / 3.0));
  CHECK(nag.d()(0, 0) == 0.0);

  const auto sgd = lure_of(Sgd{0.1}, bounds);
  CHECK(sgd.a() == Matrix{{1.0}});
  CHECK(sgd.b() == Matrix{{-0.1}});
  CHECK(sgd.c() == Matrix{{1.0}});
  CHECK(sgd.d() == Matrix{{0.0}});

  const auto hb = lure_of(HeavyBall{0.1, 0.0}, bounds);
  CHECK(hb.a() == Matrix{{1.0, 0.0}, {1.0, 0.0}});
  CHECK(hb.b() == Matrix{{-0.1}, {0.0}});
  CHECK(hb.c() == Matrix{{1.0, 0.0}});

  CHECK_THROWS_AS(lure_of(NagStandard{0.01, 0.9}, bounds), std::invalid_argument);
  CHECK_THROWS_AS(LureSystem(Matrix{{1.0}}, Matrix{{1.0}, {2.0}}, Matrix{{1.0}}, Matrix{{0.0}}),
                  std::invalid_argument);
}

TEST_CASE("a_alpha") {
  const double th = 1.0 / 3.0;
  CHECK(a_alpha(th, 0.0) == Matrix{{0.0, -th}, {0.0, 0.0}});
  const auto m = a_alpha(th, 0.75);
  CHECK(m(0, 0) == doctest::Approx(1.0));
  CHECK(m(0, 1) == doctest::Approx(-1.0 / 3.0));
  CHECK(m(1, 0) == 0.75);
  CHECK(a_alpha(0.0, 1.0) == Matrix{{1.0, 0.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(a_alpha(th, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(a_alpha(th, -0.1), std::invalid_argument);
}

TEST_CASE("verify_gradient_difference") {
  const auto bounds = SectorBounds::make(0.1, 1.0);
  const auto report = verify_gradient_difference(bounds, 2000, 42);
  CHECK(report.all_hessians_in_sector);
  CHECK(report.max_identity_violation <= 1e-12);
  CHECK(report.max_smoothness_ratio <= 1.0 + 1e-12);
  CHECK(report.max_monotonicity_violation <= 1e-12);

  // Q = gamma I is isotropic: ||dg|| = gamma ||dw||.
  const double dw[] = {0.3, -1.2};
  const auto g_iso = (bounds.gamma * SymMatrix::identity(2)).matrix() * std::span<const double>(dw);
  CHECK(norm2(g_iso) == doctest::Approx(bounds.gamma * norm2(dw)));

  // Q = diag(gamma, beta), dw = e2: the smoothness bound is tight.
  const double diag[] = {bounds.gamma, bounds.beta};
  const double e2[] = {0.0, 1.0};
  const auto g_tight = SymMatrix::diagonal(diag).matrix() * std::span<const double>(e2);
  CHECK(norm2(g_tight) == doctest::Approx(bounds.beta * norm2(e2)));
}

TEST_CASE("Lur'e recursion reproduces nag_sq_step on scalar quadratics") {
  Rng rng(2024);
  const auto bounds = SectorBounds::make(0.1, 1.0);
  const auto sys = lure_of(NagSmoothQuadratic{}, bounds);
  std::uniform_real_distribution<double> lam_dist(bounds.gamma, bounds.beta);
  std::uniform_real_distribution<double> init(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double lam = lam_dist(rng);
    const double w0 = init(rng);
    OptimizerState s = OptimizerState::zeros(1, true);
    s.w = {w0};
    *s.v = {w0};
    std::vector<double> zeta = {w0, w0};
    for (int t = 0; t < 100; ++t) {
      const double y = (sys.c() * std::span<const double>(zeta))[0];
      const double u = lam * y;
      worst = std::max(worst, std::abs(y - s.w[0]));
      std::vector<double> next = sys.a() * std::span<const double>(zeta);
      next[0] += sys.b()(0, 0) * u;
      next[1] += sys.b()(1, 0) * u;
      zeta = next;
      const double g[] = {lam * s.w[0]};
      s = nag_sq_step(s, g, bounds);
      worst = std::max(worst, std::abs(zeta[0] - (*s.v)[0]));
    }
  }
  CHECK(worst <= 1e-10);
}
