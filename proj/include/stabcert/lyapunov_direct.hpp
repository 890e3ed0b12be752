#pragma once

// Direct quadratic Lyapunov certificates for NAG in smooth-quadratic form and
// the closed-form stability bounds built on them.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stabcert/linalg.hpp"
#include "stabcert/optimizer_models.hpp"

namespace stabcert {

inline constexpr int kDefaultAlphaGrid = 258;  // 256 interior points plus both endpoints
inline constexpr double kDefaultContractionTol = 1e-9;

struct LyapunovCertificate {
  SymMatrix p_eps;
  double theta = 0.0;
  double eps = 0.0;
  double rho = 0.0;
  double c_eps = 1.0;
  /// max over the alpha grid of lambda_max(M_alpha)
  double worst_margin = 0.0;
  double worst_alpha = 0.0;
  double alpha_max = 0.0;
  int alpha_grid_size = 0;
  double tol = kDefaultContractionTol;
  bool valid = false;
};

struct BoundInputs {
  SectorBounds bounds;
  std::int64_t n = 1;
  std::int64_t T = 1;
  double rho = 0.5;
};

/// [[1, -(1+theta)], [-(1+theta), (1+theta)^2 + eps]]; det = eps.
SymMatrix build_p_eps(double theta, double eps);

/// A_alpha^T P A_alpha - (1 - rho) P by explicit products.
SymMatrix assemble_m_alpha(const SymMatrix& p, double theta, double rho, double alpha);

/// Diagonal entries of M_alpha from the expanded formulas, for a P given by
/// a = P(0,0), b = P(1,1), c = P(0,1). Kept only as a cross-check.
std::pair<double, double> m_alpha_diagonal_formula(double a, double b, double c, double theta,
                                                   double rho, double alpha);

/// Largest eigenvalue of a symmetric 2x2 matrix in closed form.
double max_eig_sym2(const SymMatrix& m);

/// Sweeps lambda_max(M_alpha) on a uniform grid over alpha in [0, 1 - gamma/beta].
LyapunovCertificate verify_contraction(double theta, double eps, double rho,
                                       const SectorBounds& bounds,
                                       int grid_points = kDefaultAlphaGrid,
                                       double tol = kDefaultContractionTol);

struct FineVerification {
  double max_on_grid = 0.0;  ///< max lambda_max(M_alpha) on the finer grid
  double lipschitz = 0.0;    ///< bound on |d lambda_max / d alpha|
  double slack = 0.0;        ///< lipschitz * half grid spacing
  /// max_on_grid + slack: an upper bound on lambda_max(M_alpha) over the whole interval.
  double certified_margin = 0.0;
};

/// Re-checks a certificate on a grid `factor` times finer and adds a
/// Lipschitz-in-alpha slack so the result bounds the continuous interval.
FineVerification reverify_fine(const LyapunovCertificate& cert, int factor = 10);

struct FeasibleRegion {
  std::vector<LyapunovCertificate> certificates;  ///< valid ones only
  std::optional<LyapunovCertificate> best;        ///< valid pair with the largest rho
  std::size_t pairs_checked = 0;
  /// Smallest worst_margin seen over all pairs, valid or not.
  double closest_margin = 0.0;
  double closest_eps = 0.0;
  double closest_rho = 0.0;

  [[nodiscard]] bool empty() const noexcept { return certificates.empty(); }
};

/// Pairs with rho outside (0, 1) are skipped by construction.
FeasibleRegion find_feasible_region(double theta, const SectorBounds& bounds,
                                    std::span<const double> eps_grid,
                                    std::span<const double> rho_grid,
                                    int grid_points = kDefaultAlphaGrid,
                                    double tol = kDefaultContractionTol);

/// Uniform grid of `count` points over [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

struct ContractionRate {
  double kappa = 1.0;
  double theta = 0.0;
  double alpha = 0.0;
  Matrix gamma_matrix;  ///< [[0, -theta], [alpha, (1+theta) alpha]]
  double trace = 0.0;
  double det = 0.0;
  Eig2General eigen;
  double spectral_radius = 0.0;
  double rho = 0.0;             ///< 1 - r^2
  double asymptotic_rho = 0.0;  ///< 2 / sqrt(kappa)
};

/// Rate of the worst eigen-direction alpha = 1 - 1/kappa.
ContractionRate contraction_rate(double kappa);

/// 1 + (1+theta)^2 / eps.
double bound_c_eps(double theta, double eps);

/// sum over coordinates of (dw_i, dv_i) P (dw_i, dv_i)^T.
double lyapunov_value(const SymMatrix& p_eps, std::span<const double> delta_w,
                      std::span<const double> delta_v);

struct NagBound {
  double param_bound = 0.0;  ///< 4 G kappa^{1/4} / (beta sqrt n) * sqrt(1 - (1-rho)^T)
  double loss_bound = 0.0;   ///< G * param_bound
  double param_limit = 0.0;  ///< T -> infinity
  double loss_limit = 0.0;
};

NagBound nag_stability_bound(const BoundInputs& in);

/// Square root of C_eps (1 + 1/zeta) (4 G^2 eps) / (n beta^2) (1 - (1-rho)^T) / rho
/// with zeta = (1+theta)^2 / eps: the parameter bound before constants are absorbed.
double nag_unabsorbed_param_bound(const BoundInputs& in, double eps);

/// 2 G^2 / (gamma n).
double sgd_stability_bound(const SectorBounds& bounds, std::int64_t n);

/// (4 beta^2 / (gamma n)) [1 - (1 - 1/sqrt(kappa))^T].
double cjy_bound(const SectorBounds& bounds, std::int64_t n, std::int64_t T);
double cjy_limit(const SectorBounds& bounds, std::int64_t n);

/// delta_T for delta_{t+1} = (1-rho) delta_t + C, delta_0 = 0.
double total_expectation_recurrence(double rho, double c, std::int64_t T);
/// delta_1 .. delta_T by direct iteration.
std::vector<double> unroll_recurrence(double rho, double c, std::int64_t T);

}  // namespace stabcert
