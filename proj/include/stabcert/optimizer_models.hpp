#pragma once

// First-order optimizer step kernels and their Lur'e (linear system in
// feedback with the gradient) representations.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "stabcert/linalg.hpp"
#include "stabcert/rng.hpp"

namespace stabcert {

/// Convexity regime: gamma-strongly convex, beta-smooth, gradients bounded by G.
struct SectorBounds {
  double gamma = 1.0;
  double beta = 1.0;
  double grad_bound = 1.0;

  /// Validating constructor; throws std::invalid_argument.
  static SectorBounds make(double gamma, double beta, double grad_bound = 1.0);

  [[nodiscard]] double kappa() const noexcept { return beta / gamma; }
};

struct Sgd {
  double eta = 0.01;
};
struct HeavyBall {
  double eta = 0.01;
  double mu = 0.9;
};
/// Look-ahead form: v' = mu v - eta grad(w + mu v), w' = w + v'.
struct NagStandard {
  double eta = 0.01;
  double mu = 0.9;
};
/// Strongly convex form with theta derived from the condition number and a
/// fixed 1/beta step: v' = w - grad(w)/beta, w' = (1+theta) v' - theta v.
struct NagSmoothQuadratic {};

using OptimizerSpec = std::variant<Sgd, HeavyBall, NagStandard, NagSmoothQuadratic>;

std::string optimizer_name(const OptimizerSpec& spec);
bool has_momentum(const OptimizerSpec& spec);
/// Throws std::invalid_argument if eta <= 0 or mu outside [0, 1).
void validate(const OptimizerSpec& spec);

/// zeta' = A zeta + B u, y = C zeta + D u, u = grad(y).
class LureSystem {
 public:
  LureSystem(Matrix a, Matrix b, Matrix c, Matrix d);

  [[nodiscard]] const Matrix& a() const noexcept { return a_; }
  [[nodiscard]] const Matrix& b() const noexcept { return b_; }
  [[nodiscard]] const Matrix& c() const noexcept { return c_; }
  [[nodiscard]] const Matrix& d() const noexcept { return d_; }

  [[nodiscard]] std::size_t state_dim() const noexcept { return a_.rows(); }
  [[nodiscard]] std::size_t input_dim() const noexcept { return b_.cols(); }
  [[nodiscard]] std::size_t output_dim() const noexcept { return c_.rows(); }

 private:
  Matrix a_, b_, c_, d_;
};

struct OptimizerState {
  std::vector<double> w;
  std::optional<std::vector<double>> v;
  std::int64_t t = 0;

  static OptimizerState zeros(std::size_t dim, bool with_velocity);
};

using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

/// (sqrt(kappa) - 1) / (sqrt(kappa) + 1).
double theta_of(double kappa);

OptimizerState sgd_step(const OptimizerState& state, std::span<const double> grad, double eta);

/// Heavy-ball: v' = mu v - eta grad(w), w' = w + v'. grad is taken at w.
OptimizerState heavy_ball_step(const OptimizerState& state, std::span<const double> grad,
                               double eta, double mu);

/// Gradient is evaluated at the look-ahead point w + mu v.
OptimizerState nag_step(const OptimizerState& state, const GradientFn& grad_at, double eta,
                        double mu);

/// grad must be evaluated at state.w.
OptimizerState nag_sq_step(const OptimizerState& state, std::span<const double> grad,
                           const SectorBounds& bounds);

/// Scalar-coordinate Lur'e form. For NAG the state is (w_t, w_{t-1}) in the
/// sequence that takes gradient steps. Throws for NagStandard.
LureSystem lure_of(const OptimizerSpec& spec, const SectorBounds& bounds);

/// Per-eigen-direction transition of the (delta w, delta v) difference state
/// for NAG in smooth-quadratic form, where alpha = 1 - lambda/beta.
Matrix a_alpha(double theta, double alpha);

struct GradientDifferenceReport {
  int trials = 0;
  /// max |(Q w - Q w') - Q (w - w')|_inf
  double max_identity_violation = 0.0;
  /// max over trials of ||dg|| / (beta ||dw||); must stay <= 1.
  double max_smoothness_ratio = 0.0;
  /// max over trials of (gamma ||dw||^2 - <dg, dw>) / ||dw||^2; must stay <= 0.
  double max_monotonicity_violation = 0.0;
  bool all_hessians_in_sector = true;
};

/// Random quadratic losses 0.5 w^T Q w with gamma I ⪯ Q ⪯ beta I; checks
/// dg = Q dw and the smoothness / monotonicity bounds on random pairs.
GradientDifferenceReport verify_gradient_difference(const SectorBounds& bounds, int trials,
                                                    std::uint64_t seed);

/// Random symmetric matrix with eigenvalues drawn from [lo, hi].
SymMatrix random_sector_matrix(std::size_t dim, double lo, double hi, Rng& rng);

}  // namespace stabcert
