#pragma once

// Coupled optimizer runs on neighboring datasets and the empirical stability
// studies built from them.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stabcert/linalg.hpp"
#include "stabcert/optimizer_models.hpp"

namespace stabcert {

/// Raised for unreadable or malformed input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Defaults mirror a 569-row, 30-feature binary table that is roughly 97%
/// linearly separable.
struct SyntheticSource {
  std::size_t dim = 30;
  double separation = 2.0;
};

constexpr std::size_t kDefaultPoolSize = 569;

struct Dataset {
  Matrix features;  ///< n x d
  std::vector<double> labels;
  std::string name;
  /// Set for generated data so neighbors can resample from the same process.
  std::optional<SyntheticSource> source;

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return features.cols(); }
  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return features.data().subspan(i * features.cols(), features.cols());
  }
  /// Rows in the given order.
  [[nodiscard]] Dataset subset(std::span<const std::size_t> rows) const;
};

/// Header row, numeric feature columns, final label column in {0,1} or {-1,+1}.
/// Features are standardized per column (constant columns become zero).
Dataset ingest_csv(const std::string& path);

/// Two unit-variance Gaussian clusters centred at +-separation e_1.
Dataset synthetic_dataset(std::size_t n, std::size_t d, double separation, std::uint64_t seed);

enum class Perturbation { ReplaceWithResample, FlipLabel };

struct NeighborPair {
  Dataset original;
  Dataset perturbed;
  std::size_t j = 0;
};

/// `pool` supplies replacement rows for ingested data; when empty the
/// dataset itself is used (another row, chosen uniformly).
NeighborPair make_neighbor(const Dataset& dataset, std::size_t j, Perturbation mode,
                           std::uint64_t seed, const Dataset* pool = nullptr);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

/// log(1 + exp(-y <w,x>)) + (lambda_reg / 2) |w|^2 and its gradient.
LossGrad reg_logistic_grad(std::span<const double> w, std::span<const double> x, double y,
                           double lambda_reg);
double reg_logistic_loss(std::span<const double> w, std::span<const double> x, double y,
                         double lambda_reg);

struct SectorEstimate {
  SectorBounds bounds;
  bool grad_bound_is_estimate = true;
};

/// gamma = lambda_reg, beta = lambda_reg + max |x_i|^2 / 4, G from a probe grid.
SectorEstimate effective_sector(const Dataset& dataset, double lambda_reg, std::uint64_t seed = 0);

/// Per-sample losses indexed 0..size-1.
class Objective {
 public:
  virtual ~Objective() = default;
  [[nodiscard]] virtual std::size_t size() const = 0;
  [[nodiscard]] virtual std::size_t dim() const = 0;
  [[nodiscard]] virtual double loss(std::span<const double> w, std::size_t i) const = 0;
  virtual void gradient(std::span<const double> w, std::size_t i, std::span<double> out) const = 0;
};

class LogisticObjective final : public Objective {
 public:
  LogisticObjective(const Dataset& data, double lambda_reg) : data_(&data), lambda_(lambda_reg) {}
  [[nodiscard]] std::size_t size() const override { return data_->size(); }
  [[nodiscard]] std::size_t dim() const override { return data_->dim(); }
  [[nodiscard]] double loss(std::span<const double> w, std::size_t i) const override;
  void gradient(std::span<const double> w, std::size_t i, std::span<double> out) const override;

 private:
  const Dataset* data_;
  double lambda_;
};

/// 0.5 (w - a_i)^T Q_i (w - a_i).
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(std::vector<SymMatrix> q, std::vector<std::vector<double>> a);
  [[nodiscard]] std::size_t size() const override { return q_.size(); }
  [[nodiscard]] std::size_t dim() const override { return q_.front().dim(); }
  [[nodiscard]] double loss(std::span<const double> w, std::size_t i) const override;
  void gradient(std::span<const double> w, std::size_t i, std::span<double> out) const override;

  [[nodiscard]] const SymMatrix& q(std::size_t i) const { return q_[i]; }
  [[nodiscard]] const std::vector<double>& a(std::size_t i) const { return a_[i]; }

 private:
  std::vector<SymMatrix> q_;
  std::vector<std::vector<double>> a_;
};

enum class StabilityMetric { ParamDiff, LossGap };

std::string to_string(StabilityMetric m);
std::string to_string(Perturbation p);

struct ExperimentConfig {
  OptimizerSpec optimizer = NagStandard{0.01, 0.9};
  std::int64_t T = 2000;
  double lambda_reg = 1e-3;
  int trials = 25;
  std::uint64_t master_seed = 7;
  std::vector<std::size_t> subset_sizes = {50, 100, 200, 400};
  std::vector<std::int64_t> checkpoints = {10, 50, 250, 1250};
  StabilityMetric metric = StabilityMetric::ParamDiff;
  Perturbation perturbation = Perturbation::ReplaceWithResample;
  int probe_points = 32;
  /// Sector used by NagSmoothQuadratic; estimated from the data when unset.
  std::optional<SectorBounds> bounds;
};

struct CoupledTrace {
  std::vector<double> dw_norm;    ///< |w_t - w'_t| for t = 0..T
  std::vector<double> loss_gap;   ///< |l(w_t, z_i) - l(w'_t, z'_i)| on the sampled index, t = 0..T-1
  std::vector<std::uint8_t> hit;  ///< i_t == j
  std::vector<double> w_final;
  std::vector<double> w_prime_final;
  /// Largest per-sample gradient norm evaluated in either run.
  double max_grad_norm = 0.0;
};

/// Both runs share the index sequence drawn from trial_seed and start at zero.
CoupledTrace coupled_run(const Objective& s, const Objective& s_prime, std::size_t j,
                         const OptimizerSpec& optimizer, std::int64_t T, std::uint64_t trial_seed,
                         const std::optional<SectorBounds>& bounds = {});

CoupledTrace coupled_run(const NeighborPair& pair, const ExperimentConfig& config,
                         std::uint64_t trial_seed);

struct Summary {
  double mean = 0.0;
  double max = 0.0;
};

/// Mean and max of non-negative per-trial values; throws when empty.
Summary empirical_stability(std::span<const double> values);

/// max over probe points of |l(w, z) - l(w', z)|.
double loss_gap(std::span<const double> w, std::span<const double> w_prime, const Dataset& probes,
                double lambda_reg);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// OLS on (log x, log y); needs >= 3 points with positive coordinates.
LogLogFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct SaturatingFit {
  double c = 0.0;
  double rho = 0.0;
  double r_squared = 0.0;
};

/// Least squares c for y ~ c sqrt(1 - (1-rho)^T).
SaturatingFit fit_saturating(std::span<const double> T, std::span<const double> y, double rho);

/// Worst per-direction contraction of the simulated optimizer over curvatures
/// h in [gamma, beta]: rho = 1 - r^2 with r the largest spectral radius.
double simulated_rate(const OptimizerSpec& optimizer, const SectorBounds& bounds);

struct TrialResult {
  std::size_t n = 0;
  int trial = 0;
  std::size_t j = 0;
  double param_diff = 0.0;
  double loss_gap = 0.0;
  double max_grad_norm = 0.0;
  /// Lipschitz constant of the loss on the segment [w_T, w'_T] over the probes.
  double loss_lipschitz = 0.0;
  std::vector<double> checkpoint_param_diff;  ///< aligned with config.checkpoints
};

struct SizeRecord {
  std::size_t n = 0;
  std::vector<double> values;  ///< chosen metric, per trial
  Summary summary;
};

struct CheckpointRecord {
  std::int64_t T = 0;
  std::vector<double> values;  ///< pooled over sizes and trials
  Summary summary;
};

struct StabilityReport {
  std::vector<TrialResult> trials;
  std::vector<SizeRecord> sizes;
  std::optional<LogLogFit> fit;  ///< vs-n: mean metric against n
  SectorEstimate sector;         ///< estimated on the whole pool

  // vs-T only
  std::vector<CheckpointRecord> checkpoints;
  double rho = 0.0;
  double t_half = 0.0;
  std::vector<std::int64_t> fit_checkpoints;  ///< pre-plateau subset used for the slope
  bool plateau_fallback = false;              ///< fewer than 3 pre-plateau points
  std::optional<LogLogFit> t_fit;
  std::optional<SaturatingFit> saturating;
  bool envelope_nondecreasing = true;
};

/// Fresh seeded subset and neighbor index per trial.
StabilityReport stability_vs_n(const ExperimentConfig& config, const Dataset& pool);

/// Same trials, recording |w_t - w'_t| at each checkpoint (T = last checkpoint).
StabilityReport stability_vs_t(const ExperimentConfig& config, const Dataset& pool);

}  // namespace stabcert
