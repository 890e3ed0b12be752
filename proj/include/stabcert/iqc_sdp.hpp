#pragma once

// Sector IQC multipliers, the lifted (x, u) LMI they produce, a small
// feasibility solver for it, and solver-independent certificate checks.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "stabcert/linalg.hpp"
#include "stabcert/optimizer_models.hpp"

namespace stabcert {

struct IqcMultipliers {
  SymMatrix pi1;  ///< [[-gamma, 1/2], [1/2, 0]]: strong monotonicity
  SymMatrix pi2;  ///< [[0, 1/2], [1/2, -1/beta]]: co-coercivity
};

IqcMultipliers sector_multipliers(const SectorBounds& bounds);

struct IqcValues {
  double v1 = 0.0;  ///< <dy, du> - gamma |dy|^2
  double v2 = 0.0;  ///< <dy, du> - |du|^2 / beta
};

/// dy = w - w', du = Q dy. Throws if Q is outside [gamma I, beta I].
IqcValues iqc_holds_for_gradient(const SectorBounds& bounds, const SymMatrix& q,
                                 std::span<const double> w, std::span<const double> w_prime);

/// Lyapunov form: -P + lambda I in the top-left block. Rate form: -(1-rho) P
/// and no lambda term.
struct LmiForm {
  std::optional<double> rho;

  [[nodiscard]] bool is_rate() const noexcept { return rho.has_value(); }
};

/// [[A^T P A - P + lambda I, A^T P B], [B^T P A, B^T P B]] + J^T (tau1 Pi1 + tau2 Pi2) J,
/// J = [[C, D], [0, I]]; multipliers act blockwise on (y, u).
SymMatrix assemble_lmi(const LureSystem& lure, const SymMatrix& p, double lambda, double tau1,
                       double tau2, const IqcMultipliers& mult, LmiForm form = {});

enum class SdpStatus { Feasible, Infeasible, Inconclusive };

std::string to_string(SdpStatus status);

struct SdpCertificate {
  SymMatrix p;
  double lambda = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  std::optional<double> rho;  ///< set for rate-form certificates
  double lmi_max_eig = 0.0;
  double p_min_eig = 0.0;
  SdpStatus status = SdpStatus::Inconclusive;
  std::uint64_t solver_seed = 0;
  /// Smallest solver objective reached over all restarts; < 0 means feasible.
  double best_objective = 0.0;
  int restart = -1;
  std::int64_t iterations = 0;
};

struct SdpOptions {
  double lambda_min = 1e-6;
  double p_tol = 1e-8;
  double feas_margin = 1e-8;
  std::int64_t max_iters = 50000;
  int restarts = 16;
  std::uint64_t seed = 0;
  /// Bound on lambda and the taus under the trace(P) = 1 normalization.
  double box = 1e3;
  /// Best objective at or above this, across all restarts, reports Infeasible
  /// rather than Inconclusive.
  double infeasible_gap = 1e-3;
  int s_lemma_samples = 10000;
};

/// Projected subgradient search for a strictly feasible (P, lambda, tau1, tau2).
/// A Feasible result has passed verify_certificate and s_lemma_cross_check.
SdpCertificate solve_feasibility(const LureSystem& lure, const SectorBounds& bounds,
                                 const SdpOptions& options = {}, LmiForm form = {});

/// Recomputes the LMI from the certificate's variables alone.
bool verify_certificate(const SdpCertificate& cert, const LureSystem& lure,
                        const SectorBounds& bounds, const SdpOptions& options = {},
                        double tol = 1e-12);

struct SLemmaReport {
  int samples = 0;
  /// max over samples of dV + lambda |x|^2 with |x| = 1
  double max_violation = 0.0;
  int violations = 0;  ///< samples above tol
  double tol = 1e-9;
};

/// Samples unit x and per-coordinate slopes h in [h_lo, h_hi] (default
/// [gamma, beta]), sets u = h y, and evaluates the Lyapunov decrement.
SLemmaReport s_lemma_cross_check(const SdpCertificate& cert, const LureSystem& lure,
                                 const SectorBounds& bounds, int samples, std::uint64_t seed,
                                 std::optional<std::pair<double, double>> h_range = {},
                                 double tol = 1e-9);

struct RateResult {
  bool feasible_at_range = false;
  double rho_star = 0.0;
  SdpCertificate certificate;  ///< at rho_star, or the failed attempt at rho_lo
  int solves = 0;
};

/// Largest rho in [rho_lo, rho_hi] (within bisect_tol) with a verified rate-form
/// certificate.
RateResult certify_rate(const LureSystem& lure, const SectorBounds& bounds, double rho_lo,
                        double rho_hi, double bisect_tol, const SdpOptions& options = {});

}  // namespace stabcert
