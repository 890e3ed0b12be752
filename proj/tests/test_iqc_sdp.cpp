#include <cmath>
#include <random>

#include "doctest.h"
#include "stabcert/iqc_sdp.hpp"

using namespace stabcert;

namespace {

double iqc_form(const SymMatrix& pi, double dy, double du) {
  const double xi[] = {dy, du};
  return pi.quadratic_form(xi);
}

}  // namespace

TEST_CASE("sector_multipliers") {
  const auto unit = sector_multipliers(SectorBounds::make(1.0, 1.0));
  CHECK(unit.pi1 == SymMatrix{{-1.0, 0.5}, {0.5, 0.0}});
  CHECK(unit.pi2 == SymMatrix{{0.0, 0.5}, {0.5, -1.0}});
  CHECK(iqc_form(unit.pi1, 1.0, 1.0) == 0.0);
  CHECK(iqc_form(unit.pi2, 1.0, 1.0) == 0.0);

  const auto m = sector_multipliers(SectorBounds::make(1.0, 10.0));
  CHECK(iqc_form(m.pi1, 1.0, 5.0) == doctest::Approx(4.0));
  CHECK(iqc_form(m.pi2, 1.0, 5.0) == doctest::Approx(2.5));
  CHECK(iqc_form(m.pi2, 1.0, 20.0) == doctest::Approx(-20.0));
}

TEST_CASE("iqc_holds_for_gradient") {
  const auto b = SectorBounds::make(0.5, 4.0);
  const double w[] = {1.0, -2.0};
  const double wp[] = {0.3, 0.4};
  const auto low = iqc_holds_for_gradient(b, b.gamma * SymMatrix::identity(2), w, wp);
  CHECK(low.v1 == doctest::Approx(0.0));
  CHECK(low.v2 > 0.0);
  const auto high = iqc_holds_for_gradient(b, b.beta * SymMatrix::identity(2), w, wp);
  CHECK(high.v2 == doctest::Approx(0.0));
  CHECK(high.v1 > 0.0);

  CHECK_THROWS_AS(iqc_holds_for_gradient(b, 5.0 * SymMatrix::identity(2), w, wp),
                  std::invalid_argument);
  CHECK_THROWS_AS(iqc_holds_for_gradient(b, 0.1 * SymMatrix::identity(2), w, wp),
                  std::invalid_argument);

  Rng rng(101);
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t d = dim(rng);
    const SymMatrix q = random_sector_matrix(d, b.gamma, b.beta, rng);
    std::vector<double> x(d), y(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = n(rng);
      y[i] = n(rng);
    }
    const auto v = iqc_holds_for_gradient(b, q, x, y);
    worst = std::min({worst, v.v1, v.v2});
  }
  CHECK(worst >= -1e-12);
}

TEST_CASE("assemble_lmi structure") {
  const auto b = SectorBounds::make(0.25, 1.0);
  const auto mult = sector_multipliers(b);

  // Zero multipliers and B = 0 leave the discrete Lyapunov block.
  const LureSystem plain(Matrix{{0.5, 0.1}, {0.0, 0.3}}, Matrix{{0.0}, {0.0}}, Matrix{{1.0, 0.0}},
                         Matrix{{0.0}});
  const SymMatrix p{{2.0, 0.3}, {0.3, 1.0}};
  const auto l0 = assemble_lmi(plain, p, 0.0, 0.0, 0.0, mult);
  const SymMatrix lyap(plain.a().transpose() * p.matrix() * plain.a() - p.matrix());
  REQUIRE(l0.dim() == 3);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) CHECK(l0(i, j) == doctest::Approx(lyap(i, j)));
    CHECK(l0(i, 2) == 0.0);
  }
  CHECK(l0(2, 2) == 0.0);

  const auto nag = lure_of(NagSmoothQuadratic{}, b);
  CHECK(assemble_lmi(nag, SymMatrix::identity(2), 0.1, 1.0, 1.0, mult).dim() == 3);
  CHECK_THROWS_AS(assemble_lmi(nag, SymMatrix::identity(3), 0.1, 1.0, 1.0, mult),
                  std::invalid_argument);
}

TEST_CASE("assemble_lmi matches the SGD hand assembly") {
  const auto b = SectorBounds::make(0.2, 3.0);
  const double eta = 0.3, pp = 1.7, lambda = 0.05, t1 = 0.8, t2 = 1.3;
  const auto l = assemble_lmi(lure_of(Sgd{eta}, b), SymMatrix{{pp}}, lambda, t1, t2,
                              sector_multipliers(b));
  CHECK(l(0, 0) == doctest::Approx(lambda - t1 * b.gamma).epsilon(1e-14));
  CHECK(l(0, 1) == doctest::Approx(-eta * pp + (t1 + t2) / 2).epsilon(1e-14));
  CHECK(l(1, 1) == doctest::Approx(eta * eta * pp - t2 / b.beta).epsilon(1e-14));

  const auto r = assemble_lmi(lure_of(Sgd{eta}, b), SymMatrix{{pp}}, lambda, t1, t2,
                              sector_multipliers(b), LmiForm{0.25});
  CHECK(r(0, 0) == doctest::Approx(pp - 0.75 * pp - t1 * b.gamma).epsilon(1e-14));
}

TEST_CASE("assemble_lmi is affine in the decision variables") {
  const auto b = SectorBounds::make(0.1, 1.0);
  const auto nag = lure_of(NagSmoothQuadratic{}, b);
  const auto mult = sector_multipliers(b);
  Rng rng(55);
  std::uniform_real_distribution<double> u(-1.0, 1.0), unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const SymMatrix p1{{u(rng), u(rng)}, {0.0, u(rng)}}, p2{{u(rng), u(rng)}, {0.0, u(rng)}};
    const double l1 = u(rng), l2 = u(rng), a1 = u(rng), a2 = u(rng), c1 = u(rng), c2 = u(rng);
    const double t = unit(rng);
    const auto mix = assemble_lmi(nag, t * p1 + (1 - t) * p2, t * l1 + (1 - t) * l2,
                                  t * a1 + (1 - t) * a2, t * c1 + (1 - t) * c2, mult);
    const auto sep = t * assemble_lmi(nag, p1, l1, a1, c1, mult) +
                     (1 - t) * assemble_lmi(nag, p2, l2, a2, c2, mult);
    worst = std::max(worst, (mix - sep).matrix().max_abs());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("solve_feasibility on known fixtures") {
  const auto b10 = SectorBounds::make(0.1, 1.0);

  const auto sgd = lure_of(Sgd{1.0 / b10.beta}, b10);
  const auto cert = solve_feasibility(sgd, b10);
  REQUIRE(cert.status == SdpStatus::Feasible);
  CHECK(cert.lambda >= 1e-6);
  CHECK(cert.lmi_max_eig <= -1e-8);
  CHECK(cert.p_min_eig >= 1e-8);
  CHECK(verify_certificate(cert, sgd, b10));

  const auto divergent = lure_of(Sgd{3.0 / b10.beta}, b10);
  CHECK(solve_feasibility(divergent, b10).status != SdpStatus::Feasible);

  const auto b4 = SectorBounds::make(0.25, 1.0);
  const auto nag4 = lure_of(NagSmoothQuadratic{}, b4);
  const auto nag_cert = solve_feasibility(nag4, b4);
  REQUIRE(nag_cert.status == SdpStatus::Feasible);
  CHECK(verify_certificate(nag_cert, nag4, b4));

  // With the two separate sector multipliers the NAG LMI loses feasibility
  // between kappa = 5 and kappa = 6.
  const auto nag10 = lure_of(NagSmoothQuadratic{}, b10);
  SdpOptions quick;
  quick.restarts = 4;
  CHECK(solve_feasibility(nag10, b10, quick).status != SdpStatus::Feasible);
}

TEST_CASE("solve_feasibility is deterministic for a seed") {
  const auto b = SectorBounds::make(0.2, 1.0);
  const auto nag = lure_of(NagSmoothQuadratic{}, b);
  SdpOptions opt;
  opt.seed = 1234;
  const auto a = solve_feasibility(nag, b, opt);
  const auto c = solve_feasibility(nag, b, opt);
  CHECK(a.status == c.status);
  CHECK(a.p == c.p);
  CHECK(a.lambda == c.lambda);
  CHECK(a.tau1 == c.tau1);
  CHECK(a.tau2 == c.tau2);
  CHECK(a.restart == c.restart);
}

TEST_CASE("verify_certificate") {
  const auto b = SectorBounds::make(0.25, 1.0);
  const auto nag = lure_of(NagSmoothQuadratic{}, b);
  const auto cert = solve_feasibility(nag, b);
  REQUIRE(cert.status == SdpStatus::Feasible);
  CHECK(verify_certificate(cert, nag, b));

  auto negated = cert;
  negated.tau1 = -std::max(cert.tau1, 1e-3);
  CHECK_FALSE(verify_certificate(negated, nag, b));

  auto scaled = cert;
  scaled.p = 10.0 * cert.p;
  scaled.lambda *= 10.0;
  scaled.tau1 *= 10.0;
  scaled.tau2 *= 10.0;
  CHECK(verify_certificate(scaled, nag, b));

  auto tiny_lambda = cert;
  tiny_lambda.lambda = 0.0;
  CHECK_FALSE(verify_certificate(tiny_lambda, nag, b));

  CHECK_FALSE(verify_certificate(cert, lure_of(Sgd{1.0}, b), b));
}

TEST_CASE("s_lemma_cross_check") {
  const auto b = SectorBounds::make(0.25, 1.0);
  const auto nag = lure_of(NagSmoothQuadratic{}, b);
  const auto cert = solve_feasibility(nag, b);
  REQUIRE(cert.status == SdpStatus::Feasible);

  const auto inside = s_lemma_cross_check(cert, nag, b, 100000, 9);
  CHECK(inside.samples == 100000);
  CHECK(inside.violations == 0);
  CHECK(inside.max_violation <= 1e-9);

  const auto outside =
      s_lemma_cross_check(cert, nag, b, 10000, 9, std::pair{2.0 * b.beta, 3.0 * b.beta});
  CHECK(outside.violations > 0);
  CHECK(outside.max_violation > 1e-9);

  // At the origin the decrement is zero: z = 0 gives z^T L z = 0.
  const auto lmi = assemble_lmi(nag, cert.p, cert.lambda, cert.tau1, cert.tau2, sector_multipliers(b));
  const double zero[] = {0.0, 0.0, 0.0};
  CHECK(lmi.quadratic_form(zero) == 0.0);
}

TEST_CASE("certify_rate") {
  const auto b = SectorBounds::make(0.1, 1.0);
  SdpOptions opt;
  opt.restarts = 4;

  // For this multiplier family the SGD rate is eta gamma (2 - eta beta).
  const auto sgd = certify_rate(lure_of(Sgd{1.0}, b), b, 0.0, 0.5, 1e-3, opt);
  REQUIRE(sgd.feasible_at_range);
  CHECK(sgd.rho_star <= 0.1 + 1e-9);
  CHECK(sgd.rho_star >= 0.09);
  REQUIRE(sgd.certificate.rho);
  CHECK(*sgd.certificate.rho == sgd.rho_star);
  CHECK(verify_certificate(sgd.certificate, lure_of(Sgd{1.0}, b), b, opt));

  const auto half = certify_rate(lure_of(Sgd{0.5}, b), b, 0.0, 0.5, 1e-3, opt);
  CHECK(half.rho_star == doctest::Approx(0.075).epsilon(0.1));
  CHECK(half.rho_star <= 0.075 + 1e-9);

  const auto b4 = SectorBounds::make(0.25, 1.0);
  const auto nag = certify_rate(lure_of(NagSmoothQuadratic{}, b4), b4, 0.0, 0.5, 1e-3, opt);
  REQUIRE(nag.feasible_at_range);
  CHECK(nag.rho_star > 0.08);
  CHECK(nag.rho_star < 0.0930);

  const auto slow = certify_rate(lure_of(Sgd{0.01}, b), b, 0.99, 0.999, 1e-3, opt);
  CHECK_FALSE(slow.feasible_at_range);
  CHECK(slow.certificate.status != SdpStatus::Feasible);

  CHECK_THROWS_AS(certify_rate(lure_of(Sgd{1.0}, b), b, 0.5, 0.4, 1e-3, opt), std::invalid_argument);
}
