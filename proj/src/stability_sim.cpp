#include "stabcert/stability_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "stabcert/lyapunov_direct.hpp"
#include "stabcert/parallel.hpp"
#include "stabcert/rng.hpp"

namespace stabcert {

namespace {

constexpr double kVarianceFloor = 1e-12;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV record; quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
  fields.push_back(trim(cur));
  return fields;
}

double parse_number(const std::string& field, std::size_t line_no, std::size_t col) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw DataError("line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                    ": not a finite number: '" + field + "'");
  return v;
}

void draw_synthetic_row(const SyntheticSource& src, Rng& rng, std::span<double> x, double& y) {
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal(0.0, 1.0);
  y = coin(rng) ? 1.0 : -1.0;
  for (auto& v : x) v = normal(rng);
  x[0] += y * src.separation;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-z)) without overflow.
double softplus_neg(double z) {
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double max_row_norm(const Dataset& d) {
  double m = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) m = std::max(m, norm2(d.row(i)));
  return m;
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.name = name;
  out.source = source;
  out.features = Matrix(rows.size(), dim());
  out.labels.resize(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= size()) throw std::out_of_range("Dataset::subset: row index out of range");
    const auto r = row(rows[k]);
    for (std::size_t c = 0; c < dim(); ++c) out.features(k, c) = r[c];
    out.labels[k] = labels[rows[k]];
  }
  return out;
}

Dataset ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv(line, line_no);
      break;
    }
  }
  if (header.size() < 2) throw DataError(path + ": need a header with at least one feature and a label");
  const std::size_t cols = header.size();

  std::vector<double> values;
  std::vector<double> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line, line_no);
    if (fields.size() != cols)
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                      " fields, found " + std::to_string(fields.size()));
    for (std::size_t c = 0; c + 1 < cols; ++c) values.push_back(parse_number(fields[c], line_no, c));
    const double y = parse_number(fields.back(), line_no, cols - 1);
    if (y == 1.0)
      labels.push_back(1.0);
    else if (y == 0.0 || y == -1.0)
      labels.push_back(-1.0);
    else
      throw DataError("line " + std::to_string(line_no) + ": label must be 0/1 or -1/+1");
  }
  const std::size_t n = labels.size();
  if (n < 2) throw DataError(path + ": need at least 2 data rows");
  const bool has_pos = std::find(labels.begin(), labels.end(), 1.0) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), -1.0) != labels.end();
  if (!has_pos || !has_neg) throw DataError(path + ": labels contain a single class");

  const std::size_t d = cols - 1;
  Dataset out;
  out.name = path;
  out.labels = std::move(labels);
  out.features = Matrix(n, d);
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += values[i * d + c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (values[i * d + c] - mean) * (values[i * d + c] - mean);
    var /= static_cast<double>(n);
    const double scale = var < kVarianceFloor ? 0.0 : 1.0 / std::sqrt(var);
    for (std::size_t i = 0; i < n; ++i) out.features(i, c) = (values[i * d + c] - mean) * scale;
  }
  return out;
}

Dataset synthetic_dataset(std::size_t n, std::size_t d, double separation, std::uint64_t seed) {
  if (n < 2 || d < 1) throw std::invalid_argument("synthetic_dataset: need n >= 2 and d >= 1");
  Dataset out;
  out.name = "synthetic";
  out.source = SyntheticSource{d, separation};
  out.features = Matrix(n, d);
  out.labels.resize(n);
  Rng rng(seed);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    draw_synthetic_row(*out.source, rng, x, out.labels[i]);
    for (std::size_t c = 0; c < d; ++c) out.features(i, c) = x[c];
  }
  return out;
}

NeighborPair make_neighbor(const Dataset& dataset, std::size_t j, Perturbation mode,
                           std::uint64_t seed, const Dataset* pool) {
  const std::size_t n = dataset.size();
  if (n < 2) throw std::invalid_argument("make_neighbor: need at least 2 rows");
  if (j >= n) throw std::invalid_argument("make_neighbor: index out of range");
  NeighborPair pair{dataset, dataset, j};
  Rng rng(seed);
  const std::size_t d = dataset.dim();

  if (mode == Perturbation::FlipLabel) {
    pair.perturbed.labels[j] = -pair.perturbed.labels[j];
    return pair;
  }
  std::vector<double> x(d);
  double y = 0.0;
  if (dataset.source) {
    draw_synthetic_row(*dataset.source, rng, x, y);
  } else if (pool && pool->size() > 0) {
    std::uniform_int_distribution<std::size_t> pick(0, pool->size() - 1);
    const std::size_t k = pick(rng);
    const auto r = pool->row(k);
    std::copy(r.begin(), r.end(), x.begin());
    y = pool->labels[k];
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 2);
    std::size_t k = pick(rng);
    if (k >= j) ++k;
    const auto r = dataset.row(k);
    std::copy(r.begin(), r.end(), x.begin());
    y = dataset.labels[k];
  }
  for (std::size_t c = 0; c < d; ++c) pair.perturbed.features(j, c) = x[c];
  pair.perturbed.labels[j] = y;
  return pair;
}

LossGrad reg_logistic_grad(std::span<const double> w, std::span<const double> x, double y,
                           double lambda_reg) {
  const double z = y * dot(w, x);
  LossGrad out;
  out.loss = softplus_neg(z) + 0.5 * lambda_reg * dot(w, w);
  const double s = sigmoid(-z);
  out.grad.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out.grad[i] = -y * s * x[i] + lambda_reg * w[i];
  return out;
}

double reg_logistic_loss(std::span<const double> w, std::span<const double> x, double y,
                         double lambda_reg) {
  return softplus_neg(y * dot(w, x)) + 0.5 * lambda_reg * dot(w, w);
}

SectorEstimate effective_sector(const Dataset& dataset, double lambda_reg, std::uint64_t seed) {
  if (!(lambda_reg > 0.0)) throw std::invalid_argument("effective_sector: lambda_reg must be > 0");
  const double xmax = max_row_norm(dataset);
  const double beta = lambda_reg + 0.25 * xmax * xmax;

  // Probe points: the origin plus random directions at a few radii.
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = dataset.dim();
  std::vector<std::vector<double>> probes{std::vector<double>(d, 0.0)};
  for (double radius : {0.1, 1.0, 10.0}) {
    for (int k = 0; k < 8; ++k) {
      std::vector<double> w(d);
      for (auto& v : w) v = normal(rng);
      const double nw = norm2(w);
      for (auto& v : w) v *= radius / nw;
      probes.push_back(std::move(w));
    }
  }
  double g = 0.0;
  for (const auto& w : probes)
    for (std::size_t i = 0; i < dataset.size(); ++i)
      g = std::max(g, norm2(reg_logistic_grad(w, dataset.row(i), dataset.labels[i], lambda_reg).grad));
  return SectorEstimate{SectorBounds::make(lambda_reg, beta, std::max(g, 1e-12)), true};
}

double LogisticObjective::loss(std::span<const double> w, std::size_t i) const {
  return reg_logistic_loss(w, data_->row(i), data_->labels[i], lambda_);
}

void LogisticObjective::gradient(std::span<const double> w, std::size_t i,
                                 std::span<double> out) const {
  const auto x = data_->row(i);
  const double y = data_->labels[i];
  const double s = sigmoid(-y * dot(w, x));
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = -y * s * x[k] + lambda_ * w[k];
}

QuadraticObjective::QuadraticObjective(std::vector<SymMatrix> q, std::vector<std::vector<double>> a)
    : q_(std::move(q)), a_(std::move(a)) {
  if (q_.empty() || q_.size() != a_.size())
    throw std::invalid_argument("QuadraticObjective: need matching, non-empty Q and a lists");
  for (std::size_t i = 0; i < q_.size(); ++i)
    if (q_[i].dim() != q_.front().dim() || a_[i].size() != q_.front().dim())
      throw std::invalid_argument("QuadraticObjective: dimension mismatch");
}

double QuadraticObjective::loss(std::span<const double> w, std::size_t i) const {
  std::vector<double> r(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) r[k] = w[k] - a_[i][k];
  return 0.5 * q_[i].quadratic_form(r);
}

void QuadraticObjective::gradient(std::span<const double> w, std::size_t i,
                                  std::span<double> out) const {
  const auto& q = q_[i].matrix();
  for (std::size_t r = 0; r < w.size(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) s += q(r, c) * (w[c] - a_[i][c]);
    out[r] = s;
  }
}

std::string to_string(StabilityMetric m) {
  return m == StabilityMetric::ParamDiff ? "param_diff" : "loss_gap";
}

std::string to_string(Perturbation p) {
  return p == Perturbation::ReplaceWithResample ? "replace" : "flip";
}

CoupledTrace coupled_run(const Objective& s, const Objective& s_prime, std::size_t j,
                         const OptimizerSpec& optimizer, std::int64_t T, std::uint64_t trial_seed,
                         const std::optional<SectorBounds>& bounds) {
  if (s.size() != s_prime.size() || s.dim() != s_prime.dim())
    throw std::invalid_argument("coupled_run: datasets differ in shape");
  if (j >= s.size()) throw std::invalid_argument("coupled_run: differing index out of range");
  if (T < 0) throw std::invalid_argument("coupled_run: T must be >= 0");
  validate(optimizer);
  const bool sq = std::holds_alternative<NagSmoothQuadratic>(optimizer);
  if (sq && !bounds) throw std::invalid_argument("coupled_run: nag needs sector bounds");

  const std::size_t d = s.dim();
  CoupledTrace trace;
  trace.dw_norm.reserve(static_cast<std::size_t>(T) + 1);
  trace.loss_gap.reserve(static_cast<std::size_t>(T));
  trace.hit.reserve(static_cast<std::size_t>(T));

  Rng rng(trial_seed);
  std::uniform_int_distribution<std::size_t> index(0, s.size() - 1);
  OptimizerState a = OptimizerState::zeros(d, has_momentum(optimizer));
  OptimizerState b = a;
  std::vector<double> g(d);

  auto grad_fn = [&](const Objective& obj, std::size_t i) {
    return [&obj, i, &trace](std::span<const double> w) {
      std::vector<double> out(w.size());
      obj.gradient(w, i, out);
      trace.max_grad_norm = std::max(trace.max_grad_norm, norm2(out));
      return out;
    };
  };
  auto step = [&](const OptimizerState& st, const Objective& obj, std::size_t i) {
    auto fn = grad_fn(obj, i);
    return std::visit(
        [&](const auto& opt) -> OptimizerState {
          using T_ = std::decay_t<decltype(opt)>;
          if constexpr (std::is_same_v<T_, Sgd>) {
            return sgd_step(st, fn(st.w), opt.eta);
          } else if constexpr (std::is_same_v<T_, HeavyBall>) {
            return heavy_ball_step(st, fn(st.w), opt.eta, opt.mu);
          } else if constexpr (std::is_same_v<T_, NagStandard>) {
            return nag_step(st, fn, opt.eta, opt.mu);
          } else {
            return nag_sq_step(st, fn(st.w), *bounds);
          }
        },
        optimizer);
  };
  auto diff_norm = [&] {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += (a.w[k] - b.w[k]) * (a.w[k] - b.w[k]);
    return std::sqrt(acc);
  };

  trace.dw_norm.push_back(diff_norm());
  for (std::int64_t t = 0; t < T; ++t) {
    const std::size_t i = index(rng);
    trace.hit.push_back(i == j ? 1 : 0);
    trace.loss_gap.push_back(std::abs(s.loss(a.w, i) - s_prime.loss(b.w, i)));
    a = step(a, s, i);
    b = step(b, s_prime, i);
    trace.dw_norm.push_back(diff_norm());
  }
  trace.w_final = a.w;
  trace.w_prime_final = b.w;
  return trace;
}

CoupledTrace coupled_run(const NeighborPair& pair, const ExperimentConfig& config,
                         std::uint64_t trial_seed) {
  const LogisticObjective s(pair.original, config.lambda_reg);
  const LogisticObjective sp(pair.perturbed, config.lambda_reg);
  std::optional<SectorBounds> bounds = config.bounds;
  if (!bounds && std::holds_alternative<NagSmoothQuadratic>(config.optimizer))
    bounds = effective_sector(pair.original, config.lambda_reg).bounds;
  return coupled_run(s, sp, pair.j, config.optimizer, config.T, trial_seed, bounds);
}

Summary empirical_stability(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empirical_stability: no trials");
  Summary out;
  for (double v : values) {
    if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("empirical_stability: bad value");
    out.mean += v;
    out.max = std::max(out.max, v);
  }
  out.mean /= static_cast<double>(values.size());
  return out;
}

double loss_gap(std::span<const double> w, std::span<const double> w_prime, const Dataset& probes,
                double lambda_reg) {
  double gap = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto x = probes.row(i);
    const double y = probes.labels[i];
    gap = std::max(gap, std::abs(reg_logistic_loss(w, x, y, lambda_reg) -
                                 reg_logistic_loss(w_prime, x, y, lambda_reg)));
  }
  return gap;
}

LogLogFit fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog_slope: size mismatch");
  if (x.size() < 3) throw std::invalid_argument("fit_loglog_slope: need at least 3 points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_loglog_slope: coordinates must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog_slope: x values are all equal");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

SaturatingFit fit_saturating(std::span<const double> T, std::span<const double> y, double rho) {
  if (T.size() != y.size() || T.empty()) throw std::invalid_argument("fit_saturating: bad input");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("fit_saturating: rho must lie in (0, 1]");
  std::vector<double> f(T.size());
  double sff = 0.0, syf = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    f[i] = std::sqrt(1.0 - std::pow(1.0 - rho, T[i]));
    sff += f[i] * f[i];
    syf += y[i] * f[i];
  }
  if (sff == 0.0) throw std::invalid_argument("fit_saturating: envelope is identically zero");
  SaturatingFit fit;
  fit.rho = rho;
  fit.c = syf / sff;
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    ss_res += (y[i] - fit.c * f[i]) * (y[i] - fit.c * f[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  fit.r_squared = ss_tot == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  return fit;
}

double simulated_rate(const OptimizerSpec& optimizer, const SectorBounds& bounds) {
  validate(optimizer);
  if (std::holds_alternative<NagSmoothQuadratic>(optimizer)) return contraction_rate(bounds.kappa()).rho;

  constexpr int kSweep = 2001;
  double r = 0.0;
  for (int k = 0; k < kSweep; ++k) {
    const double h = bounds.gamma + (bounds.beta - bounds.gamma) * k / (kSweep - 1);
    r = std::max(r, std::visit(
                        [h](const auto& opt) -> double {
                          using T_ = std::decay_t<decltype(opt)>;
                          if constexpr (std::is_same_v<T_, Sgd>) {
                            return std::abs(1.0 - opt.eta * h);
                          } else if constexpr (std::is_same_v<T_, HeavyBall>) {
                            const double a = 1.0 - opt.eta * h;
                            return spectral_radius_2x2(Matrix{{a, opt.mu}, {-opt.eta * h, opt.mu}});
                          } else if constexpr (std::is_same_v<T_, NagStandard>) {
                            // (w, v) difference map with the gradient at w + mu v.
                            const double a = 1.0 - opt.eta * h;
                            return spectral_radius_2x2(Matrix{{a, opt.mu * a}, {-opt.eta * h, opt.mu * a}});
                          } else {
                            return 0.0;
                          }
                        },
                        optimizer));
  }
  return std::clamp(1.0 - r * r, 0.0, 1.0);
}

namespace {

struct TrialJob {
  std::size_t n = 0;
  int trial = 0;
};

TrialResult run_trial(const ExperimentConfig& config, const Dataset& pool, const TrialJob& job,
                      std::int64_t T, const std::vector<std::int64_t>& checkpoints) {
  const std::uint64_t seed = derive_seed({config.master_seed, job.n, static_cast<std::uint64_t>(job.trial)});
  Rng rng(seed);

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::span<const std::size_t> chosen(order.data(), job.n);
  const std::span<const std::size_t> rest(order.data() + job.n, order.size() - job.n);
  const Dataset train = pool.subset(chosen);
  const Dataset held_out = pool.subset(rest);

  std::uniform_int_distribution<std::size_t> pick(0, job.n - 1);
  const std::size_t j = pick(rng);
  const NeighborPair pair = make_neighbor(train, j, config.perturbation, rng(), &held_out);

  // Probe points for the loss gap: held-out rows when there are enough, else
  // fresh draws from the generator, else the training rows themselves.
  const std::size_t want = static_cast<std::size_t>(std::max(1, config.probe_points));
  Dataset probes;
  if (held_out.size() >= want) {
    std::vector<std::size_t> idx(want);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    probes = held_out.subset(idx);
  } else if (pool.source) {
    probes = synthetic_dataset(std::max<std::size_t>(want, 2), pool.dim(), pool.source->separation, rng());
  } else {
    probes = train;
  }

  ExperimentConfig run_config = config;
  run_config.T = T;
  if (!run_config.bounds && std::holds_alternative<NagSmoothQuadratic>(config.optimizer))
    run_config.bounds = effective_sector(train, config.lambda_reg).bounds;
  const CoupledTrace trace = coupled_run(pair, run_config, rng());

  TrialResult r;
  r.n = job.n;
  r.trial = job.trial;
  r.j = j;
  r.param_diff = trace.dw_norm.back();
  r.loss_gap = loss_gap(trace.w_final, trace.w_prime_final, probes, config.lambda_reg);
  r.max_grad_norm = trace.max_grad_norm;
  const double wmax = std::max(norm2(trace.w_final), norm2(trace.w_prime_final));
  r.loss_lipschitz = max_row_norm(probes) + config.lambda_reg * wmax;
  for (std::int64_t c : checkpoints)
    r.checkpoint_param_diff.push_back(trace.dw_norm[static_cast<std::size_t>(std::min(c, T))]);
  return r;
}

StabilityReport run_study(const ExperimentConfig& config, const Dataset& pool, std::int64_t T,
                          const std::vector<std::int64_t>& checkpoints) {
  if (config.trials < 1) throw std::invalid_argument("need at least one trial");
  if (config.subset_sizes.empty()) throw std::invalid_argument("need at least one subset size");
  if (!(config.lambda_reg > 0.0)) throw std::invalid_argument("lambda_reg must be > 0");
  for (std::size_t n : config.subset_sizes)
    if (n < 2 || n > pool.size())
      throw std::invalid_argument("subset size " + std::to_string(n) + " outside [2, " +
                                  std::to_string(pool.size()) + "]");

  std::vector<TrialJob> jobs;
  for (std::size_t n : config.subset_sizes)
    for (int t = 0; t < config.trials; ++t) jobs.push_back({n, t});

  StabilityReport report;
  report.trials.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t k) {
    report.trials[k] = run_trial(config, pool, jobs[k], T, checkpoints);
  });
  report.sector = effective_sector(pool, config.lambda_reg, config.master_seed);

  std::size_t k = 0;
  for (std::size_t n : config.subset_sizes) {
    SizeRecord rec;
    rec.n = n;
    for (int t = 0; t < config.trials; ++t, ++k) {
      const auto& tr = report.trials[k];
      rec.values.push_back(config.metric == StabilityMetric::ParamDiff ? tr.param_diff : tr.loss_gap);
    }
    rec.summary = empirical_stability(rec.values);
    report.sizes.push_back(std::move(rec));
  }
  return report;
}

}  // namespace

StabilityReport stability_vs_n(const ExperimentConfig& config, const Dataset& pool) {
  StabilityReport report = run_study(config, pool, config.T, {});
  if (report.sizes.size() >= 3) {
    std::vector<double> x, y;
    for (const auto& s : report.sizes) {
      x.push_back(static_cast<double>(s.n));
      y.push_back(s.summary.mean);
    }
    if (std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; }))
      report.fit = fit_loglog_slope(x, y);
  }
  return report;
}

StabilityReport stability_vs_t(const ExperimentConfig& config, const Dataset& pool) {
  if (config.checkpoints.empty()) throw std::invalid_argument("need at least one checkpoint");
  std::vector<std::int64_t> cps = config.checkpoints;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (cps.front() < 1) throw std::invalid_argument("checkpoints must be >= 1");
  const std::int64_t T = cps.back();

  StabilityReport report = run_study(config, pool, T, cps);
  for (std::size_t c = 0; c < cps.size(); ++c) {
    CheckpointRecord rec;
    rec.T = cps[c];
    for (const auto& tr : report.trials) rec.values.push_back(tr.checkpoint_param_diff[c]);
    rec.summary = empirical_stability(rec.values);
    report.checkpoints.push_back(std::move(rec));
  }

  const SectorBounds bounds = config.bounds.value_or(report.sector.bounds);
  report.rho = simulated_rate(config.optimizer, bounds);
  report.t_half = report.rho >= 1.0 ? 1.0
                  : report.rho <= 0.0 ? std::numeric_limits<double>::infinity()
                                      : std::log(0.5) / std::log1p(-report.rho);

  std::vector<double> tx, ty, all_t, all_y;
  for (const auto& rec : report.checkpoints) {
    all_t.push_back(static_cast<double>(rec.T));
    all_y.push_back(rec.summary.mean);
    if (static_cast<double>(rec.T) <= report.t_half) {
      report.fit_checkpoints.push_back(rec.T);
      tx.push_back(static_cast<double>(rec.T));
      ty.push_back(rec.summary.mean);
    }
  }
  if (tx.size() < 3) {
    report.plateau_fallback = true;
    report.fit_checkpoints.clear();
    for (const auto& rec : report.checkpoints) report.fit_checkpoints.push_back(rec.T);
    tx = all_t;
    ty = all_y;
  }
  if (tx.size() >= 3 && std::all_of(ty.begin(), ty.end(), [](double v) { return v > 0.0; }))
    report.t_fit = fit_loglog_slope(tx, ty);
  if (report.rho > 0.0) {
    report.saturating = fit_saturating(all_t, all_y, report.rho);
    double prev = -1.0;
    for (double t : all_t) {
      const double env = report.saturating->c * std::sqrt(1.0 - std::pow(1.0 - report.rho, t));
      if (env < prev) report.envelope_nondecreasing = false;
      prev = env;
    }
  }
  return report;
}

}  // namespace stabcert
