#include "stabcert/optimizer_models.hpp"

#include <cmath>
#include <stdexcept>

namespace stabcert {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

}  // namespace

SectorBounds SectorBounds::make(double gamma, double beta, double grad_bound) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("SectorBounds: gamma must be positive");
  if (!(beta >= gamma) || !std::isfinite(beta))
    throw std::invalid_argument("SectorBounds: beta must be >= gamma");
  if (!(grad_bound > 0.0) || !std::isfinite(grad_bound))
    throw std::invalid_argument("SectorBounds: grad_bound must be positive");
  return SectorBounds{gamma, beta, grad_bound};
}

std::string optimizer_name(const OptimizerSpec& spec) {
  return std::visit(Overloaded{[](const Sgd&) { return std::string("sgd"); },
                               [](const HeavyBall&) { return std::string("heavy-ball"); },
                               [](const NagStandard&) { return std::string("nag-standard"); },
                               [](const NagSmoothQuadratic&) { return std::string("nag"); }},
                    spec);
}

bool has_momentum(const OptimizerSpec& spec) { return !std::holds_alternative<Sgd>(spec); }

void validate(const OptimizerSpec& spec) {
  auto check_eta = [](double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
  };
  auto check_mu = [](double mu) {
    if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in [0, 1)");
  };
  std::visit(Overloaded{[&](const Sgd& s) { check_eta(s.eta); },
                        [&](const HeavyBall& h) {
                          check_eta(h.eta);
                          check_mu(h.mu);
                        },
                        [&](const NagStandard& n) {
                          check_eta(n.eta);
                          check_mu(n.mu);
                        },
                        [](const NagSmoothQuadratic&) {}},
             spec);
}

LureSystem::LureSystem(Matrix a, Matrix b, Matrix c, Matrix d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const std::size_t s = a_.rows();
  if (s == 0 || a_.cols() != s) throw std::invalid_argument("LureSystem: A must be square");
  if (b_.rows() != s) throw std::invalid_argument("LureSystem: B must have s rows");
  if (c_.cols() != s) throw std::invalid_argument("LureSystem: C must have s columns");
  if (d_.rows() != c_.rows() || d_.cols() != b_.cols())
    throw std::invalid_argument("LureSystem: D must be p x m");
  if (!a_.all_finite() || !b_.all_finite() || !c_.all_finite() || !d_.all_finite())
    throw std::invalid_argument("LureSystem: non-finite entry");
}

OptimizerState OptimizerState::zeros(std::size_t dim, bool with_velocity) {
  OptimizerState s;
  s.w.assign(dim, 0.0);
  if (with_velocity) s.v = std::vector<double>(dim, 0.0);
  return s;
}

double theta_of(double kappa) {
  if (!(kappa >= 1.0)) throw std::invalid_argument("theta_of: kappa must be >= 1");
  const double s = std::sqrt(kappa);
  return (s - 1.0) / (s + 1.0);
}

OptimizerState sgd_step(const OptimizerState& state, std::span<const double> grad, double eta) {
  if (grad.size() != state.w.size()) throw std::invalid_argument("sgd_step: dimension mismatch");
  OptimizerState next = state;
  for (std::size_t i = 0; i < grad.size(); ++i) next.w[i] = state.w[i] - eta * grad[i];
  ++next.t;
  return next;
}

OptimizerState heavy_ball_step(const OptimizerState& state, std::span<const double> grad,
                               double eta, double mu) {
  if (!state.v) throw std::invalid_argument("heavy_ball_step: state has no velocity");
  if (grad.size() != state.w.size())
    throw std::invalid_argument("heavy_ball_step: dimension mismatch");
  OptimizerState next = state;
  auto& v = *next.v;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    v[i] = mu * (*state.v)[i] - eta * grad[i];
    next.w[i] = state.w[i] + v[i];
  }
  ++next.t;
  return next;
}

OptimizerState nag_step(const OptimizerState& state, const GradientFn& grad_at, double eta,
                        double mu) {
  if (!state.v) throw std::invalid_argument("nag_step: state has no velocity");
  const std::size_t d = state.w.size();
  std::vector<double> lookahead(d);
  for (std::size_t i = 0; i < d; ++i) lookahead[i] = state.w[i] + mu * (*state.v)[i];
  const std::vector<double> g = grad_at(lookahead);
  if (g.size() != d) throw std::invalid_argument("nag_step: gradient dimension mismatch");
  require_finite(g, "nag_step");

  OptimizerState next = state;
  auto& v = *next.v;
  for (std::size_t i = 0; i < d; ++i) {
    v[i] = mu * (*state.v)[i] - eta * g[i];
    next.w[i] = state.w[i] + v[i];
  }
  ++next.t;
  return next;
}

OptimizerState nag_sq_step(const OptimizerState& state, std::span<const double> grad,
                           const SectorBounds& bounds) {
  if (!state.v) throw std::invalid_argument("nag_sq_step: state has no v sequence");
  if (grad.size() != state.w.size()) throw std::invalid_argument("nag_sq_step: dimension mismatch");
  const double theta = theta_of(bounds.kappa());
  OptimizerState next = state;
  auto& v = *next.v;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double v_new = state.w[i] - grad[i] / bounds.beta;
    next.w[i] = (1.0 + theta) * v_new - theta * (*state.v)[i];
    v[i] = v_new;
  }
  ++next.t;
  return next;
}

LureSystem lure_of(const OptimizerSpec& spec, const SectorBounds& bounds) {
  validate(spec);
  return std::visit(
      Overloaded{
          [](const Sgd& s) {
            return LureSystem(Matrix{{1.0}}, Matrix{{-s.eta}}, Matrix{{1.0}}, Matrix{{0.0}});
          },
          [](const HeavyBall& h) {
            return LureSystem(Matrix{{1.0 + h.mu, -h.mu}, {1.0, 0.0}}, Matrix{{-h.eta}, {0.0}},
                              Matrix{{1.0, 0.0}}, Matrix{{0.0}});
          },
          [](const NagStandard&) -> LureSystem {
            throw std::invalid_argument(
                "lure_of: no Lur'e form for the look-ahead (eta, mu) NAG variant; use nag");
          },
          [&](const NagSmoothQuadratic&) {
            const double th = theta_of(bounds.kappa());
            const double eta = 1.0 / bounds.beta;
            return LureSystem(Matrix{{1.0 + th, -th}, {1.0, 0.0}}, Matrix{{-eta}, {0.0}},
                              Matrix{{1.0 + th, -th}}, Matrix{{0.0}});
          }},
      spec);
}

Matrix a_alpha(double theta, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("a_alpha: alpha outside [0, 1]");
  if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("a_alpha: theta outside [0, 1)");
  return Matrix{{(1.0 + theta) * alpha, -theta}, {alpha, 0.0}};
}

SymMatrix random_sector_matrix(std::size_t dim, double lo, double hi, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> eig(lo, hi);
  Matrix g(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) g(i, j) = g(j, i) = normal(rng);
  const Matrix v = sym_eigen(SymMatrix(g)).vectors;
  Matrix q(dim, dim);
  std::vector<double> lambdas(dim);
  for (auto& l : lambdas) l = eig(rng);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t k = 0; k < dim; ++k) q(i, j) += v(i, k) * lambdas[k] * v(j, k);
  return SymMatrix(q);
}

GradientDifferenceReport verify_gradient_difference(const SectorBounds& bounds, int trials,
                                                    std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> dim_dist(1, 4);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double tol = 1e-9 * bounds.beta;

  GradientDifferenceReport report;
  report.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t d = dim_dist(rng);
    const SymMatrix q = random_sector_matrix(d, bounds.gamma, bounds.beta, rng);
    const bool lower = loewner_leq(bounds.gamma * SymMatrix::identity(d), q, tol);
    const bool upper = loewner_leq(q, bounds.beta * SymMatrix::identity(d), tol);
    report.all_hessians_in_sector = report.all_hessians_in_sector && lower && upper;

    std::vector<double> w(d), wp(d), dw(d);
    for (std::size_t i = 0; i < d; ++i) {
      w[i] = normal(rng);
      wp[i] = normal(rng);
      dw[i] = w[i] - wp[i];
    }
    const auto g = q.matrix() * std::span<const double>(w);
    const auto gp = q.matrix() * std::span<const double>(wp);
    const auto h_dw = q.matrix() * std::span<const double>(dw);
    std::vector<double> dg(d);
    for (std::size_t i = 0; i < d; ++i) {
      dg[i] = g[i] - gp[i];
      report.max_identity_violation =
          std::max(report.max_identity_violation, std::abs(dg[i] - h_dw[i]));
    }
    const double ndw = norm2(dw);
    if (ndw == 0.0) continue;
    report.max_smoothness_ratio =
        std::max(report.max_smoothness_ratio, norm2(dg) / (bounds.beta * ndw));
    report.max_monotonicity_violation = std::max(
        report.max_monotonicity_violation, (bounds.gamma * ndw * ndw - dot(dg, dw)) / (ndw * ndw));
  }
  return report;
}

}  // namespace stabcert
