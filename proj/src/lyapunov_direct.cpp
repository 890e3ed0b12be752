#include "stabcert/lyapunov_direct.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stabcert {

namespace {

double frobenius(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return std::sqrt(s);
}

double alpha_max_of(const SectorBounds& bounds) { return 1.0 - bounds.gamma / bounds.beta; }

double grid_alpha(double alpha_max, int k, int points) {
  if (points <= 1) return 0.0;
  // Pin the last point to alpha_max exactly.
  return k == points - 1 ? alpha_max : alpha_max * static_cast<double>(k) / (points - 1);
}

void require_rate(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
}

}  // namespace

SymMatrix build_p_eps(double theta, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("build_p_eps: eps must be > 0");
  const double c = -(1.0 + theta);
  return SymMatrix{{1.0, c}, {c, c * c + eps}};
}

SymMatrix assemble_m_alpha(const SymMatrix& p, double theta, double rho, double alpha) {
  if (p.dim() != 2) throw std::invalid_argument("assemble_m_alpha: P must be 2x2");
  const Matrix a = a_alpha(theta, alpha);
  return SymMatrix(a.transpose() * p.matrix() * a - (1.0 - rho) * p.matrix());
}

std::pair<double, double> m_alpha_diagonal_formula(double a, double b, double c, double theta,
                                                   double rho, double alpha) {
  const double s = a * (1.0 + theta) * (1.0 + theta) + 2.0 * c * (1.0 + theta) + b;
  return {alpha * alpha * s - (1.0 - rho) * a, a * theta * theta - (1.0 - rho) * b};
}

double max_eig_sym2(const SymMatrix& m) {
  if (m.dim() != 2) throw std::invalid_argument("max_eig_sym2: not 2x2");
  const double mean = 0.5 * (m(0, 0) + m(1, 1));
  const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
  return mean + std::hypot(half_diff, m(0, 1));
}

LyapunovCertificate verify_contraction(double theta, double eps, double rho,
                                       const SectorBounds& bounds, int grid_points, double tol) {
  if (grid_points < 2) throw std::invalid_argument("verify_contraction: grid_points must be >= 2");
  LyapunovCertificate cert;
  cert.p_eps = build_p_eps(theta, eps);
  cert.theta = theta;
  cert.eps = eps;
  cert.rho = rho;
  cert.c_eps = bound_c_eps(theta, eps);
  cert.alpha_max = alpha_max_of(bounds);
  cert.alpha_grid_size = grid_points;
  cert.tol = tol;

  // With gamma == beta the interval collapses to alpha = 0.
  const int points = cert.alpha_max > 0.0 ? grid_points : 1;
  cert.worst_margin = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const double alpha = grid_alpha(cert.alpha_max, k, points);
    const double m = max_eig_sym2(assemble_m_alpha(cert.p_eps, theta, rho, alpha));
    if (m > cert.worst_margin) {
      cert.worst_margin = m;
      cert.worst_alpha = alpha;
    }
  }
  cert.valid = cert.worst_margin <= tol;
  return cert;
}

FineVerification reverify_fine(const LyapunovCertificate& cert, int factor) {
  if (factor < 1) throw std::invalid_argument("reverify_fine: factor must be >= 1");
  FineVerification out;
  const int points =
      cert.alpha_max > 0.0 ? (cert.alpha_grid_size - 1) * factor + 1 : 1;
  out.max_on_grid = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const double alpha = grid_alpha(cert.alpha_max, k, points);
    out.max_on_grid = std::max(
        out.max_on_grid, max_eig_sym2(assemble_m_alpha(cert.p_eps, cert.theta, cert.rho, alpha)));
  }

  // dM/dalpha = A1^T P A_alpha + A_alpha^T P A1 with A_alpha = A0 + alpha A1, and
  // lambda_max is 1-Lipschitz in the spectral norm (Weyl).
  const Matrix a0{{0.0, -cert.theta}, {0.0, 0.0}};
  const Matrix a1{{1.0 + cert.theta, 0.0}, {1.0, 0.0}};
  const double na1 = frobenius(a1);
  out.lipschitz =
      2.0 * na1 * frobenius(cert.p_eps.matrix()) * (frobenius(a0) + cert.alpha_max * na1);
  const double spacing = points > 1 ? cert.alpha_max / (points - 1) : 0.0;
  out.slack = out.lipschitz * 0.5 * spacing;
  out.certified_margin = out.max_on_grid + out.slack;
  return out;
}

FeasibleRegion find_feasible_region(double theta, const SectorBounds& bounds,
                                    std::span<const double> eps_grid,
                                    std::span<const double> rho_grid, int grid_points,
                                    double tol) {
  if (eps_grid.empty() || rho_grid.empty())
    throw std::invalid_argument("find_feasible_region: empty grid");
  FeasibleRegion region;
  region.closest_margin = std::numeric_limits<double>::infinity();
  for (double eps : eps_grid) {
    if (!(eps > 0.0)) continue;
    for (double rho : rho_grid) {
      if (!(rho > 0.0 && rho < 1.0)) continue;
      ++region.pairs_checked;
      LyapunovCertificate cert = verify_contraction(theta, eps, rho, bounds, grid_points, tol);
      if (cert.worst_margin < region.closest_margin) {
        region.closest_margin = cert.worst_margin;
        region.closest_eps = eps;
        region.closest_rho = rho;
      }
      if (!cert.valid) continue;
      if (!region.best || cert.rho > region.best->rho) region.best = cert;
      region.certificates.push_back(std::move(cert));
    }
  }
  return region;
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    out[static_cast<std::size_t>(k)] =
        count == 1 ? lo : (k == count - 1 ? hi : lo + (hi - lo) * k / (count - 1));
  return out;
}

ContractionRate contraction_rate(double kappa) {
  if (!(kappa >= 1.0) || !std::isfinite(kappa))
    throw std::invalid_argument("contraction_rate: kappa must be >= 1");
  ContractionRate out;
  out.kappa = kappa;
  out.theta = theta_of(kappa);
  out.alpha = 1.0 - 1.0 / kappa;
  out.gamma_matrix = Matrix{{0.0, -out.theta}, {out.alpha, (1.0 + out.theta) * out.alpha}};
  out.trace = (1.0 + out.theta) * out.alpha;
  out.det = out.theta * out.alpha;
  out.eigen = eig2_general(out.trace, out.det);
  out.spectral_radius = out.eigen.spectral_radius;
  out.rho = 1.0 - out.spectral_radius * out.spectral_radius;
  out.asymptotic_rho = 2.0 / std::sqrt(kappa);
  return out;
}

double bound_c_eps(double theta, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("bound_c_eps: eps must be > 0");
  return 1.0 + (1.0 + theta) * (1.0 + theta) / eps;
}

double lyapunov_value(const SymMatrix& p_eps, std::span<const double> delta_w,
                      std::span<const double> delta_v) {
  if (p_eps.dim() != 2) throw std::invalid_argument("lyapunov_value: P must be 2x2");
  if (delta_w.size() != delta_v.size())
    throw std::invalid_argument("lyapunov_value: dimension mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < delta_w.size(); ++i) {
    const double x[] = {delta_w[i], delta_v[i]};
    v += p_eps.quadratic_form(x);
  }
  return v;
}

NagBound nag_stability_bound(const BoundInputs& in) {
  require_rate(in.rho);
  if (in.n < 1 || in.T < 0) throw std::invalid_argument("nag_stability_bound: need n >= 1, T >= 0");
  const auto& b = in.bounds;
  NagBound out;
  out.param_limit =
      4.0 * b.grad_bound * std::pow(b.kappa(), 0.25) / (b.beta * std::sqrt(static_cast<double>(in.n)));
  out.loss_limit = b.grad_bound * out.param_limit;
  const double growth = std::sqrt(1.0 - std::pow(1.0 - in.rho, static_cast<double>(in.T)));
  out.param_bound = out.param_limit * growth;
  out.loss_bound = b.grad_bound * out.param_bound;
  return out;
}

double nag_unabsorbed_param_bound(const BoundInputs& in, double eps) {
  require_rate(in.rho);
  if (in.n < 1 || in.T < 0) throw std::invalid_argument("nag_unabsorbed_param_bound: bad n or T");
  const auto& b = in.bounds;
  const double theta = theta_of(b.kappa());
  const double zeta = (1.0 + theta) * (1.0 + theta) / eps;
  const double g = b.grad_bound;
  const double c = (1.0 + 1.0 / zeta) * 4.0 * g * g * eps / (static_cast<double>(in.n) * b.beta * b.beta);
  return std::sqrt(bound_c_eps(theta, eps) * total_expectation_recurrence(in.rho, c, in.T));
}

double sgd_stability_bound(const SectorBounds& bounds, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("sgd_stability_bound: n must be >= 1");
  return 2.0 * bounds.grad_bound * bounds.grad_bound / (bounds.gamma * static_cast<double>(n));
}

double cjy_limit(const SectorBounds& bounds, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("cjy_limit: n must be >= 1");
  return 4.0 * bounds.beta * bounds.beta / (bounds.gamma * static_cast<double>(n));
}

double cjy_bound(const SectorBounds& bounds, std::int64_t n, std::int64_t T) {
  if (T < 0) throw std::invalid_argument("cjy_bound: T must be >= 0");
  const double decay = std::pow(1.0 - 1.0 / std::sqrt(bounds.kappa()), static_cast<double>(T));
  return cjy_limit(bounds, n) * (1.0 - decay);
}

double total_expectation_recurrence(double rho, double c, std::int64_t T) {
  require_rate(rho);
  if (T < 0) throw std::invalid_argument("total_expectation_recurrence: T must be >= 0");
  return c * (1.0 - std::pow(1.0 - rho, static_cast<double>(T))) / rho;
}

std::vector<double> unroll_recurrence(double rho, double c, std::int64_t T) {
  require_rate(rho);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(T, 0)));
  double delta = 0.0;
  for (std::int64_t t = 0; t < T; ++t) {
    delta = (1.0 - rho) * delta + c;
    out.push_back(delta);
  }
  return out;
}

}  // namespace stabcert
