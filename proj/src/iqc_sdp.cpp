#include "stabcert/iqc_sdp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "stabcert/parallel.hpp"
#include "stabcert/rng.hpp"

namespace stabcert {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const Matrix& m) {
  MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(Eigen::Index(i), Eigen::Index(j)) = m(i, j);
  return e;
}

Matrix from_eigen(const MatrixXd& e) {
  Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(std::size_t(i), std::size_t(j)) = e(i, j);
  return m;
}

void check_square_sector(const LureSystem& lure) {
  if (lure.output_dim() != lure.input_dim())
    throw std::invalid_argument("sector IQC needs matching input and output dimensions");
}

// Decision vector: upper triangle of P (row by row), then lambda (Lyapunov form
// only), tau1, tau2. The LMI is linear in it with no constant term.
struct Layout {
  std::size_t s = 0;
  std::size_t n_p = 0;
  bool with_lambda = true;

  [[nodiscard]] std::size_t size() const { return n_p + (with_lambda ? 3 : 2); }
  [[nodiscard]] std::size_t lambda_index() const { return n_p; }
  [[nodiscard]] std::size_t tau1_index() const { return n_p + (with_lambda ? 1 : 0); }
  [[nodiscard]] std::size_t tau2_index() const { return tau1_index() + 1; }
};

MatrixXd p_of(const Layout& lay, const VectorXd& x) {
  MatrixXd p(lay.s, lay.s);
  std::size_t k = 0;
  for (std::size_t i = 0; i < lay.s; ++i)
    for (std::size_t j = i; j < lay.s; ++j, ++k) p(Eigen::Index(i), Eigen::Index(j)) = p(Eigen::Index(j), Eigen::Index(i)) = x(Eigen::Index(k));
  return p;
}

SdpCertificate certificate_of(const Layout& lay, const VectorXd& x, LmiForm form) {
  SdpCertificate c;
  c.p = SymMatrix(from_eigen(p_of(lay, x)));
  c.lambda = lay.with_lambda ? x(Eigen::Index(lay.lambda_index())) : 0.0;
  c.tau1 = x(Eigen::Index(lay.tau1_index()));
  c.tau2 = x(Eigen::Index(lay.tau2_index()));
  c.rho = form.rho;
  return c;
}

struct Problem {
  Layout lay;
  std::vector<MatrixXd> lmi_basis;  // dLMI/dx_i
  std::vector<MatrixXd> p_basis;    // dP/dx_i for the P coordinates
  SdpOptions opt;
  LmiForm form;
};

Problem build_problem(const LureSystem& lure, const SectorBounds& bounds, const SdpOptions& opt,
                      LmiForm form) {
  Problem pr;
  pr.opt = opt;
  pr.form = form;
  pr.lay.s = lure.state_dim();
  pr.lay.n_p = pr.lay.s * (pr.lay.s + 1) / 2;
  pr.lay.with_lambda = !form.is_rate();
  const auto mult = sector_multipliers(bounds);
  const std::size_t n = pr.lay.size();
  for (std::size_t i = 0; i < n; ++i) {
    VectorXd e = VectorXd::Zero(Eigen::Index(n));
    e(Eigen::Index(i)) = 1.0;
    const SdpCertificate c = certificate_of(pr.lay, e, form);
    pr.lmi_basis.push_back(to_eigen(assemble_lmi(lure, c.p, c.lambda, c.tau1, c.tau2, mult, form).matrix()));
    if (i < pr.lay.n_p) pr.p_basis.push_back(to_eigen(c.p.matrix()));
  }
  return pr;
}

struct Evaluation {
  double f = 0.0;
  VectorXd grad;
};

Evaluation evaluate(const Problem& pr, const VectorXd& x) {
  const auto& lay = pr.lay;
  const std::size_t n = lay.size();
  MatrixXd lmi = MatrixXd::Zero(pr.lmi_basis[0].rows(), pr.lmi_basis[0].cols());
  for (std::size_t i = 0; i < n; ++i) lmi += x(Eigen::Index(i)) * pr.lmi_basis[i];
  const Eigen::SelfAdjointEigenSolver<MatrixXd> lmi_eig(lmi);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> p_eig(p_of(lay, x));

  Evaluation ev;
  ev.grad = VectorXd::Zero(Eigen::Index(n));
  const double t_lmi = lmi_eig.eigenvalues()(lmi.rows() - 1) + pr.opt.feas_margin;
  const double t_p = pr.opt.p_tol - p_eig.eigenvalues()(0);
  const double t_tau1 = -x(Eigen::Index(lay.tau1_index()));
  const double t_tau2 = -x(Eigen::Index(lay.tau2_index()));
  const double t_lambda =
      lay.with_lambda ? pr.opt.lambda_min - x(Eigen::Index(lay.lambda_index())) : -std::numeric_limits<double>::infinity();
  ev.f = std::max({t_lmi, t_p, t_tau1, t_tau2, t_lambda});

  if (ev.f == t_lmi) {
    const VectorXd v = lmi_eig.eigenvectors().col(lmi.rows() - 1);
    for (std::size_t i = 0; i < n; ++i) ev.grad(Eigen::Index(i)) = v.dot(pr.lmi_basis[i] * v);
  } else if (ev.f == t_p) {
    const VectorXd u = p_eig.eigenvectors().col(0);
    for (std::size_t i = 0; i < lay.n_p; ++i) ev.grad(Eigen::Index(i)) = -u.dot(pr.p_basis[i] * u);
  } else if (ev.f == t_tau1) {
    ev.grad(Eigen::Index(lay.tau1_index())) = -1.0;
  } else if (ev.f == t_tau2) {
    ev.grad(Eigen::Index(lay.tau2_index())) = -1.0;
  } else {
    ev.grad(Eigen::Index(lay.lambda_index())) = -1.0;
  }
  return ev;
}

// trace(P) = 1, lambda in [lambda_min, box], taus in [0, box]. The two parts
// act on disjoint coordinates, so the composite projection is exact.
void project(const Problem& pr, VectorXd& x) {
  const auto& lay = pr.lay;
  double trace = 0.0;
  std::vector<std::size_t> diag;
  std::size_t k = 0;
  for (std::size_t i = 0; i < lay.s; ++i)
    for (std::size_t j = i; j < lay.s; ++j, ++k)
      if (i == j) {
        diag.push_back(k);
        trace += x(Eigen::Index(k));
      }
  const double shift = (trace - 1.0) / static_cast<double>(lay.s);
  for (std::size_t d : diag) x(Eigen::Index(d)) -= shift;
  if (lay.with_lambda)
    x(Eigen::Index(lay.lambda_index())) = std::clamp(x(Eigen::Index(lay.lambda_index())), pr.opt.lambda_min, pr.opt.box);
  for (std::size_t t : {lay.tau1_index(), lay.tau2_index()})
    x(Eigen::Index(t)) = std::clamp(x(Eigen::Index(t)), 0.0, pr.opt.box);
}

VectorXd initial_point(const Problem& pr, int restart, std::uint64_t seed) {
  const auto& lay = pr.lay;
  VectorXd x = VectorXd::Zero(Eigen::Index(lay.size()));
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  MatrixXd p = MatrixXd::Identity(Eigen::Index(lay.s), Eigen::Index(lay.s));
  if (restart > 0) {
    MatrixXd g(lay.s, lay.s);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = normal(rng);
    p = g.transpose() * g + 0.1 * MatrixXd::Identity(g.rows(), g.cols());
  }
  p /= p.trace();
  std::size_t k = 0;
  for (std::size_t i = 0; i < lay.s; ++i)
    for (std::size_t j = i; j < lay.s; ++j, ++k) x(Eigen::Index(k)) = p(Eigen::Index(i), Eigen::Index(j));
  if (lay.with_lambda) x(Eigen::Index(lay.lambda_index())) = restart > 0 ? 0.1 * unit(rng) : 0.0;
  x(Eigen::Index(lay.tau1_index())) = restart > 0 ? unit(rng) : 1.0;
  x(Eigen::Index(lay.tau2_index())) = restart > 0 ? unit(rng) : 1.0;
  project(pr, x);
  return x;
}

struct RestartOutcome {
  VectorXd x_best;
  double f_best = std::numeric_limits<double>::infinity();
  std::int64_t iterations = 0;
  bool success = false;
  bool aborted = false;
};

// Polyak steps toward a target below the best value seen; the gap to the
// target halves whenever progress stalls.
RestartOutcome run_restart(const Problem& pr, int restart, std::uint64_t seed,
                           const std::atomic<int>& lowest_success) {
  RestartOutcome out;
  VectorXd x = initial_point(pr, restart, seed);
  out.x_best = x;
  double delta = 0.1;
  int stall = 0;
  constexpr int kStallLimit = 50;
  for (std::int64_t it = 0; it < pr.opt.max_iters; ++it) {
    if ((it & 255) == 0 && lowest_success.load() < restart) {
      out.aborted = true;
      break;
    }
    const Evaluation ev = evaluate(pr, x);
    out.iterations = it + 1;
    if (ev.f < out.f_best) {
      const bool real_progress = ev.f < out.f_best - 1e-3 * delta;
      out.f_best = ev.f;
      out.x_best = x;
      stall = real_progress ? 0 : stall + 1;
    } else {
      ++stall;
    }
    if (out.f_best < 0.0) {
      out.success = true;
      break;
    }
    if (stall >= kStallLimit) {
      delta = std::max(0.5 * delta, 1e-12);
      stall = 0;
      x = out.x_best;
      continue;
    }
    const double g2 = ev.grad.squaredNorm();
    if (g2 == 0.0) break;
    const double target = std::min(0.0, out.f_best) - delta;
    x -= ((ev.f - target) / g2) * ev.grad;
    project(pr, x);
  }
  return out;
}

double lmi_max_eig_of(const SdpCertificate& c, const LureSystem& lure, const SectorBounds& bounds) {
  const LmiForm form{c.rho};
  return max_eigenvalue(assemble_lmi(lure, c.p, c.lambda, c.tau1, c.tau2, sector_multipliers(bounds), form));
}

}  // namespace

IqcMultipliers sector_multipliers(const SectorBounds& bounds) {
  return IqcMultipliers{SymMatrix{{-bounds.gamma, 0.5}, {0.5, 0.0}},
                        SymMatrix{{0.0, 0.5}, {0.5, -1.0 / bounds.beta}}};
}

IqcValues iqc_holds_for_gradient(const SectorBounds& bounds, const SymMatrix& q,
                                 std::span<const double> w, std::span<const double> w_prime) {
  const std::size_t d = q.dim();
  if (w.size() != d || w_prime.size() != d)
    throw std::invalid_argument("iqc_holds_for_gradient: dimension mismatch");
  const double tol = 1e-9 * bounds.beta;
  if (!loewner_leq(bounds.gamma * SymMatrix::identity(d), q, tol) ||
      !loewner_leq(q, bounds.beta * SymMatrix::identity(d), tol))
    throw std::invalid_argument("iqc_holds_for_gradient: Q is outside the sector");
  std::vector<double> dy(d);
  for (std::size_t i = 0; i < d; ++i) dy[i] = w[i] - w_prime[i];
  const auto du = q.matrix() * std::span<const double>(dy);
  const double yu = dot(dy, du);
  return IqcValues{yu - bounds.gamma * dot(dy, dy), yu - dot(du, du) / bounds.beta};
}

SymMatrix assemble_lmi(const LureSystem& lure, const SymMatrix& p, double lambda, double tau1,
                       double tau2, const IqcMultipliers& mult, LmiForm form) {
  check_square_sector(lure);
  const std::size_t s = lure.state_dim();
  const std::size_t m = lure.input_dim();
  if (p.dim() != s) throw std::invalid_argument("assemble_lmi: P does not match the state dimension");

  const Matrix& a = lure.a();
  const Matrix& b = lure.b();
  const Matrix& pm = p.matrix();
  const Matrix at = a.transpose();
  const Matrix bt = b.transpose();
  const double decay = form.is_rate() ? 1.0 - *form.rho : 1.0;

  Matrix tl = at * pm * a - decay * pm;
  if (!form.is_rate())
    for (std::size_t i = 0; i < s; ++i) tl(i, i) += lambda;
  const Matrix tr = at * pm * b;
  Matrix lyap = block2x2(tl, tr, tr.transpose(), bt * pm * b);

  // J = [[C, D], [0, I]] maps z = (x, u) to xi = (y, u).
  const Matrix j = block2x2(lure.c(), lure.d(), Matrix(m, s), Matrix::identity(m));
  const SymMatrix pi = tau1 * mult.pi1 + tau2 * mult.pi2;
  Matrix pi_full(2 * m, 2 * m);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t k = 0; k < m; ++k) pi_full(r * m + k, c * m + k) = pi(r, c);
  lyap += j.transpose() * pi_full * j;
  return SymMatrix(lyap);
}

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Feasible: return "feasible";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

bool verify_certificate(const SdpCertificate& cert, const LureSystem& lure,
                        const SectorBounds& bounds, const SdpOptions& options, double tol) {
  if (cert.p.dim() != lure.state_dim()) return false;
  if (!(cert.tau1 >= 0.0) || !(cert.tau2 >= 0.0)) return false;
  if (!cert.rho && !(cert.lambda >= options.lambda_min)) return false;
  if (!(min_eigenvalue(cert.p) >= options.p_tol)) return false;
  return lmi_max_eig_of(cert, lure, bounds) <= -options.feas_margin + tol;
}

SLemmaReport s_lemma_cross_check(const SdpCertificate& cert, const LureSystem& lure,
                                 const SectorBounds& bounds, int samples, std::uint64_t seed,
                                 std::optional<std::pair<double, double>> h_range, double tol) {
  check_square_sector(lure);
  const auto [h_lo, h_hi] = h_range.value_or(std::pair{bounds.gamma, bounds.beta});
  const std::size_t s = lure.state_dim();
  const std::size_t m = lure.input_dim();
  const MatrixXd a = to_eigen(lure.a()), b = to_eigen(lure.b()), c = to_eigen(lure.c()),
                 d = to_eigen(lure.d()), p = to_eigen(cert.p.matrix());
  const double decay = cert.rho ? 1.0 - *cert.rho : 1.0;
  const double lambda = cert.rho ? 0.0 : cert.lambda;

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> slope(h_lo, h_hi);

  SLemmaReport report;
  report.samples = samples;
  report.tol = tol;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    VectorXd x(static_cast<Eigen::Index>(s));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
    if (x.norm() == 0.0) continue;
    x /= x.norm();
    VectorXd h(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = slope(rng);
    // u = H (C x + D u)  =>  (I - H D) u = H C x
    const MatrixXd hd = h.asDiagonal() * d;
    const VectorXd u = (MatrixXd::Identity(hd.rows(), hd.cols()) - hd).partialPivLu().solve(h.asDiagonal() * (c * x));
    const VectorXd next = a * x + b * u;
    const double dv = next.dot(p * next) - decay * x.dot(p * x);
    const double val = dv + lambda * x.squaredNorm();
    report.max_violation = std::max(report.max_violation, val);
    if (val > tol) ++report.violations;
  }
  return report;
}

SdpCertificate solve_feasibility(const LureSystem& lure, const SectorBounds& bounds,
                                 const SdpOptions& options, LmiForm form) {
  check_square_sector(lure);
  if (form.is_rate() && !(*form.rho >= 0.0 && *form.rho < 1.0))
    throw std::invalid_argument("solve_feasibility: rho must lie in [0, 1)");
  const Problem pr = build_problem(lure, bounds, options, form);
  const int restarts = std::max(1, options.restarts);

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
  std::atomic<int> lowest_success{restarts};
  parallel_for(outcomes.size(), [&](std::size_t r) {
    const int idx = static_cast<int>(r);
    const std::uint64_t seed = derive_seed({options.seed, r});
    RestartOutcome out = run_restart(pr, idx, seed, lowest_success);
    if (out.success) {
      SdpCertificate c = certificate_of(pr.lay, out.x_best, form);
      const bool ok = verify_certificate(c, lure, bounds, options) &&
                      s_lemma_cross_check(c, lure, bounds, options.s_lemma_samples,
                                          derive_seed({seed, 0x5eedULL}))
                              .violations == 0;
      out.success = ok;
      if (ok) {
        int cur = lowest_success.load();
        while (idx < cur && !lowest_success.compare_exchange_weak(cur, idx)) {
        }
      }
    }
    outcomes[r] = std::move(out);
  });

  SdpCertificate cert;
  std::int64_t total_iters = 0;
  double best = std::numeric_limits<double>::infinity();
  int best_idx = 0;
  for (int r = 0; r < restarts; ++r) {
    const auto& o = outcomes[static_cast<std::size_t>(r)];
    total_iters += o.iterations;
    if (o.f_best < best) {
      best = o.f_best;
      best_idx = r;
    }
  }
  const int chosen = lowest_success.load() < restarts ? lowest_success.load() : best_idx;
  cert = certificate_of(pr.lay, outcomes[static_cast<std::size_t>(chosen)].x_best, form);
  cert.restart = chosen;
  cert.solver_seed = options.seed;
  cert.iterations = total_iters;
  cert.best_objective = best;
  cert.lmi_max_eig = lmi_max_eig_of(cert, lure, bounds);
  cert.p_min_eig = min_eigenvalue(cert.p);
  if (lowest_success.load() < restarts)
    cert.status = SdpStatus::Feasible;
  else
    cert.status = best >= options.infeasible_gap ? SdpStatus::Infeasible : SdpStatus::Inconclusive;
  return cert;
}

RateResult certify_rate(const LureSystem& lure, const SectorBounds& bounds, double rho_lo,
                        double rho_hi, double bisect_tol, const SdpOptions& options) {
  if (!(rho_lo < rho_hi) || rho_lo < 0.0 || rho_hi >= 1.0)
    throw std::invalid_argument("certify_rate: need 0 <= rho_lo < rho_hi < 1");
  if (!(bisect_tol > 0.0)) throw std::invalid_argument("certify_rate: bisect_tol must be > 0");
  RateResult result;
  auto solve = [&](double rho) {
    ++result.solves;
    return solve_feasibility(lure, bounds, options, LmiForm{rho});
  };

  SdpCertificate lo_cert = solve(rho_lo);
  if (lo_cert.status != SdpStatus::Feasible) {
    result.certificate = lo_cert;
    return result;
  }
  result.feasible_at_range = true;
  SdpCertificate hi_cert = solve(rho_hi);
  if (hi_cert.status == SdpStatus::Feasible) {
    result.rho_star = rho_hi;
    result.certificate = hi_cert;
    return result;
  }
  double lo = rho_lo, hi = rho_hi;
  while (hi - lo > bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    SdpCertificate c = solve(mid);
    if (c.status == SdpStatus::Feasible) {
      lo = mid;
      lo_cert = std::move(c);
    } else {
      hi = mid;
    }
  }
  result.rho_star = lo;
  result.certificate = lo_cert;
  return result;
}

}  // namespace stabcert
