#include "stabcert/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "stabcert/iqc_sdp.hpp"
#include "stabcert/lyapunov_direct.hpp"
#include "stabcert/report_io.hpp"
#include "stabcert/stability_sim.hpp"

namespace stabcert::cli {

namespace {

using nlohmann::json;

/// Flag combinations CLI11 cannot express; maps to exit 64.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string num(double v) { return fmt("%.6g", v); }

std::string pad(const std::string& s, int width, bool left = false) {
  char buf[128];
  std::snprintf(buf, sizeof buf, left ? "%-*s" : "%*s", width, s.c_str());
  return buf;
}

void print_matrix(std::ostream& out, const std::string& indent, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << indent << '[';
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "  " : "") << fmt("%12.6g", m(r, c));
    out << " ]\n";
  }
}

SectorBounds sector_from_flags(double gamma, double beta, double g = 1.0) {
  if (!(gamma > 0.0) || !(beta > 0.0) || !std::isfinite(gamma) || !std::isfinite(beta))
    throw UsageError("--gamma and --beta must be positive");
  if (gamma > beta) throw UsageError("--gamma must not exceed --beta");
  if (!(g > 0.0) || !std::isfinite(g)) throw UsageError("--G must be positive");
  return SectorBounds::make(gamma, beta, g);
}

std::filesystem::path out_path(const std::string& dir, const char* name) {
  return std::filesystem::path(dir) / name;
}

// ---------------------------------------------------------------- certify

struct CertifyArgs {
  std::string optimizer = "nag";
  double gamma = 0.0;
  double beta = 0.0;
  std::optional<double> eta;
  double mu = 0.9;
  bool rate = false;
  double rho_lo = 0.0;
  double rho_hi = 0.99;
  double bisect_tol = 1e-4;
  std::uint64_t seed = 0;
  int restarts = SdpOptions{}.restarts;
  std::int64_t max_iters = SdpOptions{}.max_iters;
  std::string out_dir = ".";
};

int cmd_certify(const CertifyArgs& a, std::ostream& out) {
  const SectorBounds bounds = sector_from_flags(a.gamma, a.beta);
  if (a.eta && !(*a.eta > 0.0)) throw UsageError("--eta must be positive");
  const double eta = a.eta.value_or(1.0 / bounds.beta);
  OptimizerSpec spec;
  if (a.optimizer == "sgd")
    spec = Sgd{eta};
  else if (a.optimizer == "heavy-ball")
    spec = HeavyBall{eta, a.mu};
  else
    spec = NagSmoothQuadratic{};
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.rate && !(a.rho_lo >= 0.0 && a.rho_lo < a.rho_hi && a.rho_hi < 1.0))
    throw UsageError("need 0 <= --rho-lo < --rho-hi < 1");
  if (a.restarts < 1 || a.max_iters < 1) throw UsageError("--restarts and --max-iters must be >= 1");

  SdpOptions opts;
  opts.seed = a.seed;
  opts.restarts = a.restarts;
  opts.max_iters = a.max_iters;
  const LureSystem lure = lure_of(spec, bounds);

  SdpCertificate cert;
  std::optional<RateResult> rate;
  if (a.rate) {
    rate = certify_rate(lure, bounds, a.rho_lo, a.rho_hi, a.bisect_tol, opts);
    cert = rate->certificate;
  } else {
    cert = solve_feasibility(lure, bounds, opts);
  }
  const bool ok = cert.status == SdpStatus::Feasible && (!rate || rate->feasible_at_range);

  json doc = certificate_json(cert, optimizer_name(spec), bounds);
  write_file(out_path(a.out_dir, "certificate.json"), doc.dump(2) + "\n");

  out << "certify " << optimizer_name(spec) << "  gamma=" << num(bounds.gamma)
      << "  beta=" << num(bounds.beta) << "  kappa=" << num(bounds.kappa()) << '\n';
  if (!std::holds_alternative<NagSmoothQuadratic>(spec)) out << "  eta           " << num(eta) << '\n';
  out << "  status        " << to_string(cert.status) << '\n';
  if (rate) {
    out << "  rate          " << (rate->feasible_at_range ? "rho* = " + num(rate->rho_star) : "none in range")
        << "  (" << rate->solves << " solves)\n";
  }
  if (ok) {
    out << "  P =\n";
    print_matrix(out, "    ", cert.p.matrix());
    out << "  lambda        " << num(cert.lambda) << '\n'
        << "  tau1, tau2    " << num(cert.tau1) << ", " << num(cert.tau2) << '\n'
        << "  lmi max eig   " << num(cert.lmi_max_eig) << '\n'
        << "  P min eig     " << num(cert.p_min_eig) << '\n';
  } else {
    out << "  best solver objective " << num(cert.best_objective) << '\n';
  }
  out << "  wrote " << out_path(a.out_dir, "certificate.json").string() << '\n';
  return ok ? kOk : kInfeasible;
}

// ---------------------------------------------------------------- lyapunov

struct LyapunovArgs {
  double gamma = 0.0;
  double beta = 0.0;
  std::optional<double> eps;
  std::optional<double> rho;
  int grid = kDefaultAlphaGrid;
  int eps_points = 41;
  int rho_points = 40;
  double rho_max = 0.99;
  std::string out_dir = ".";
};

json lyapunov_cert_json(const LyapunovCertificate& c) {
  return {{"eps", c.eps},           {"rho", c.rho},
          {"P", matrix_json(c.p_eps.matrix())},
          {"c_eps", c.c_eps},       {"worst_margin", c.worst_margin},
          {"worst_alpha", c.worst_alpha},
          {"valid", c.valid}};
}

int cmd_lyapunov(const LyapunovArgs& a, std::ostream& out) {
  const SectorBounds bounds = sector_from_flags(a.gamma, a.beta);
  if (a.eps && !(*a.eps > 0.0)) throw UsageError("--eps must be positive");
  if (a.rho && !(*a.rho > 0.0 && *a.rho < 1.0)) throw UsageError("--rho must lie in (0, 1)");
  if (a.grid < 2 || a.eps_points < 1 || a.rho_points < 1) throw UsageError("grid sizes must be positive");
  if (!(a.rho_max > 0.0 && a.rho_max < 1.0)) throw UsageError("--rho-max must lie in (0, 1)");

  const double kappa = bounds.kappa();
  const double theta = theta_of(kappa);
  const double eps_lo = std::max(theta * theta, 1e-6);
  const double eps_hi = 4.0 * (1.0 + theta) * (1.0 + theta);
  const auto eps_grid = a.eps ? std::vector<double>{*a.eps} : linspace(eps_lo, eps_hi, a.eps_points);
  const auto rho_grid = a.rho ? std::vector<double>{*a.rho}
                              : linspace(a.rho_max / a.rho_points, a.rho_max, a.rho_points);
  const FeasibleRegion region = find_feasible_region(theta, bounds, eps_grid, rho_grid, a.grid);
  const ContractionRate rate = contraction_rate(kappa);

  json doc;
  doc["gamma"] = bounds.gamma;
  doc["beta"] = bounds.beta;
  doc["kappa"] = kappa;
  doc["theta"] = theta;
  doc["alpha_grid"] = a.grid;
  doc["pairs_checked"] = region.pairs_checked;
  doc["valid_pairs"] = region.certificates.size();
  doc["contraction_rate"] = {{"alpha", rate.alpha},
                             {"trace", rate.trace},
                             {"det", rate.det},
                             {"spectral_radius", rate.spectral_radius},
                             {"rho", rate.rho},
                             {"asymptotic_rho", rate.asymptotic_rho}};

  out << "lyapunov  gamma=" << num(bounds.gamma) << "  beta=" << num(bounds.beta)
      << "  kappa=" << num(kappa) << "  theta=" << num(theta) << '\n';
  out << "  searched      " << eps_grid.size() << " eps x " << rho_grid.size() << " rho, alpha grid "
      << a.grid << '\n';
  out << "  valid pairs   " << region.certificates.size() << " of " << region.pairs_checked << '\n';

  // Where the single requested pair fails, name the offending alpha; alpha = 0
  // fails exactly when eps < theta^2 / (1 - rho).
  const LyapunovCertificate shown =
      region.best ? *region.best
                  : verify_contraction(theta, region.closest_eps, region.closest_rho, bounds, a.grid);
  const double margin0 = max_eig_sym2(assemble_m_alpha(shown.p_eps, theta, shown.rho, 0.0));
  const bool alpha0_fails = margin0 > shown.tol;
  doc["alpha0_margin"] = margin0;
  if (region.best) {
    doc["best"] = lyapunov_cert_json(*region.best);
    const auto fine = reverify_fine(*region.best);
    doc["best"]["fine_certified_margin"] = fine.certified_margin;
    out << "  max-rho pair  eps=" << num(shown.eps) << "  rho=" << num(shown.rho)
        << "  worst margin " << num(shown.worst_margin) << " at alpha=" << num(shown.worst_alpha) << '\n';
  } else {
    doc["best"] = nullptr;
    doc["closest"] = lyapunov_cert_json(shown);
    out << "  no valid pair; closest eps=" << num(shown.eps) << "  rho=" << num(shown.rho)
        << "  worst margin " << num(shown.worst_margin) << " at alpha=" << num(shown.worst_alpha) << '\n';
    if (alpha0_fails)
      out << "  violator      alpha=0 (determinant condition: eps < theta^2/(1-rho) = "
          << num(theta * theta / (1.0 - shown.rho)) << ")\n";
  }
  out << "  P_eps =\n";
  print_matrix(out, "    ", shown.p_eps.matrix());
  out << "  contraction   r=" << num(rate.spectral_radius) << "  rho=1-r^2=" << num(rate.rho)
      << "  (2/sqrt(kappa)=" << num(rate.asymptotic_rho) << ")\n";

  write_file(out_path(a.out_dir, "lyapunov.json"), doc.dump(2) + "\n");
  out << "  wrote " << out_path(a.out_dir, "lyapunov.json").string() << '\n';
  return region.best ? kOk : kInfeasible;
}

// ---------------------------------------------------------------- bound

struct BoundArgs {
  double g = 1.0;
  double gamma = 0.0;
  double beta = 0.0;
  std::int64_t n = 0;
  std::int64_t T = 0;
  std::optional<double> rho;
  std::string out_dir = ".";
};

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  const SectorBounds bounds = sector_from_flags(a.gamma, a.beta, a.g);
  if (a.n < 1) throw UsageError("--n must be >= 1");
  if (a.T < 0) throw UsageError("--T must be >= 0");
  if (a.rho && !(*a.rho > 0.0 && *a.rho <= 1.0)) throw UsageError("--rho must lie in (0, 1]");
  double rho = a.rho.value_or(contraction_rate(bounds.kappa()).rho);
  // kappa = 1 gives r = 0 and rho = 1: every step contracts fully.
  rho = std::clamp(rho, std::numeric_limits<double>::min(), 1.0);
  const BoundTable t = make_bound_table(bounds, a.n, a.T, rho);

  out << "bound  G=" << num(a.g) << "  gamma=" << num(bounds.gamma) << "  beta=" << num(bounds.beta)
      << "  n=" << a.n << "  T=" << a.T << "  rho=" << num(rho) << '\n';
  out << "  " << pad("", 22) << pad("at T", 16) << pad("T -> inf", 16) << '\n';
  auto row = [&](const char* name, double at_t, double limit) {
    out << "  " << pad(name, 22, true) << fmt("%16.6g", at_t) << fmt("%16.6g", limit) << '\n';
  };
  row("NAG (param)", t.nag.param_bound, t.nag.param_limit);
  row("NAG (loss)", t.nag.loss_bound, t.nag.loss_limit);
  row("SGD (loss)", t.sgd, t.sgd);
  row("CJY (loss)", t.cjy, t.cjy_limit);

  const json doc = bound_table_json(t);
  CsvWriter csv({"bound", "form", "at_T", "limit"});
  csv.add_row({"nag", "param", format_double(t.nag.param_bound), format_double(t.nag.param_limit)});
  csv.add_row({"nag", "loss", format_double(t.nag.loss_bound), format_double(t.nag.loss_limit)});
  csv.add_row({"sgd", "loss", format_double(t.sgd), format_double(t.sgd)});
  csv.add_row({"cjy", "loss", format_double(t.cjy), format_double(t.cjy_limit)});
  write_file(out_path(a.out_dir, "bounds.json"), doc.dump(2) + "\n");
  write_file(out_path(a.out_dir, "bounds.csv"), csv.str());
  out << "  wrote " << out_path(a.out_dir, "bounds.json").string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string mode;
  std::string data;
  bool synthetic = false;
  std::size_t pool_size = kDefaultPoolSize;
  std::size_t dim = SyntheticSource{}.dim;
  double separation = SyntheticSource{}.separation;
  std::vector<std::size_t> sizes = ExperimentConfig{}.subset_sizes;
  std::vector<std::int64_t> checkpoints = ExperimentConfig{}.checkpoints;
  int trials = ExperimentConfig{}.trials;
  std::uint64_t seed = ExperimentConfig{}.master_seed;
  std::int64_t T = ExperimentConfig{}.T;
  std::string optimizer = "nag-standard";
  double eta = 0.01;
  double mu = 0.9;
  double lambda_reg = ExperimentConfig{}.lambda_reg;
  std::string metric = "param_diff";
  std::string perturbation = "replace";
  int probes = ExperimentConfig{}.probe_points;
  std::string out_dir = ".";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (!a.data.empty() && a.synthetic) throw UsageError("--data and --synthetic are mutually exclusive");
  if (a.trials < 1) throw UsageError("--trials must be >= 1");
  if (a.T < 1) throw UsageError("--T must be >= 1");
  if (!(a.lambda_reg > 0.0)) throw UsageError("--lambda must be positive");
  if (a.probes < 1) throw UsageError("--probes must be >= 1");
  if (a.sizes.empty()) throw UsageError("--sizes must not be empty");
  if (a.checkpoints.empty()) throw UsageError("--checkpoints must not be empty");
  for (auto c : a.checkpoints)
    if (c < 1) throw UsageError("--checkpoints must be >= 1");
  if (a.data.empty() && (a.pool_size < 2 || a.dim < 1)) throw UsageError("--pool-size >= 2, --dim >= 1");

  ExperimentConfig cfg;
  if (a.optimizer == "sgd")
    cfg.optimizer = Sgd{a.eta};
  else if (a.optimizer == "heavy-ball")
    cfg.optimizer = HeavyBall{a.eta, a.mu};
  else if (a.optimizer == "nag")
    cfg.optimizer = NagSmoothQuadratic{};
  else
    cfg.optimizer = NagStandard{a.eta, a.mu};
  try {
    validate(cfg.optimizer);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.T = a.T;
  cfg.lambda_reg = a.lambda_reg;
  cfg.trials = a.trials;
  cfg.master_seed = a.seed;
  cfg.subset_sizes = a.sizes;
  cfg.checkpoints = a.checkpoints;
  cfg.metric = a.metric == "loss_gap" ? StabilityMetric::LossGap : StabilityMetric::ParamDiff;
  cfg.perturbation = a.perturbation == "flip" ? Perturbation::FlipLabel : Perturbation::ReplaceWithResample;
  cfg.probe_points = a.probes;
  const SimulationMode mode = a.mode == "vs-n" ? SimulationMode::VsN : SimulationMode::VsT;

  const Dataset pool = a.data.empty() ? synthetic_dataset(a.pool_size, a.dim, a.separation, a.seed)
                                      : ingest_csv(a.data);
  for (auto n : cfg.subset_sizes)
    if (n < 2 || n > pool.size())
      throw UsageError("subset size " + std::to_string(n) + " outside [2, " + std::to_string(pool.size()) + "]");

  const StabilityReport report = mode == SimulationMode::VsN ? stability_vs_n(cfg, pool) : stability_vs_t(cfg, pool);
  const std::string id = config_id(cfg, mode);
  const std::string data_name =
      a.data.empty() ? "synthetic(n=" + std::to_string(a.pool_size) + ",d=" + std::to_string(a.dim) +
                           ",separation=" + format_double(a.separation) + ")"
                     : a.data;
  write_file(out_path(a.out_dir, "report.csv"), report_csv(report, cfg, mode, id));
  write_file(out_path(a.out_dir, "summary.json"),
             summary_json(report, cfg, mode, id, data_name).dump(2) + "\n");

  out << "simulate " << to_string(mode) << "  " << optimizer_name(cfg.optimizer) << "  data=" << data_name
      << "  trials=" << cfg.trials << "  seed=" << cfg.master_seed << '\n';
  if (mode == SimulationMode::VsN) {
    out << "  " << pad("n", 8) << pad("mean", 14) << pad("max", 14) << '\n';
    for (const auto& s : report.sizes)
      out << "  " << fmt("%8.0f", static_cast<double>(s.n)) << fmt("%14.6g", s.summary.mean)
          << fmt("%14.6g", s.summary.max) << '\n';
    if (report.fit)
      out << "  log-log slope " << num(report.fit->slope) << "  (r^2 " << num(report.fit->r_squared) << ")\n";
  } else {
    out << "  " << pad("T", 8) << pad("mean", 14) << pad("max", 14) << '\n';
    for (const auto& c : report.checkpoints)
      out << "  " << fmt("%8.0f", static_cast<double>(c.T)) << fmt("%14.6g", c.summary.mean)
          << fmt("%14.6g", c.summary.max) << '\n';
    out << "  rho=" << num(report.rho) << "  T_half=" << num(report.t_half)
        << (report.plateau_fallback ? "  (fewer than 3 pre-plateau checkpoints; fit uses all)" : "") << '\n';
    if (report.t_fit)
      out << "  log-log slope " << num(report.t_fit->slope) << "  (r^2 " << num(report.t_fit->r_squared) << ")\n";
    if (report.saturating)
      out << "  saturating fit c=" << num(report.saturating->c) << "  r^2 " << num(report.saturating->r_squared)
          << '\n';
  }
  out << "  wrote " << out_path(a.out_dir, "report.csv").string() << ", "
      << out_path(a.out_dir, "summary.json").string() << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability certificates and experiments for first-order optimizers", "stabcert"};
  app.require_subcommand(1);

  CertifyArgs ca;
  auto* certify = app.add_subcommand("certify", "Search for an IQC/LMI certificate");
  certify->add_option("--optimizer", ca.optimizer, "sgd | nag | heavy-ball")
      ->check(CLI::IsMember({"sgd", "nag", "heavy-ball"}))
      ->capture_default_str();
  certify->add_option("--gamma", ca.gamma, "Strong convexity")->required();
  certify->add_option("--beta", ca.beta, "Smoothness")->required();
  certify->add_option("--eta", ca.eta, "Step size for sgd / heavy-ball (default 1/beta)");
  certify->add_option("--mu", ca.mu, "Momentum for heavy-ball")->capture_default_str();
  certify->add_flag("--rate", ca.rate, "Bisect for the largest certified rate");
  certify->add_option("--rho-lo", ca.rho_lo)->capture_default_str();
  certify->add_option("--rho-hi", ca.rho_hi)->capture_default_str();
  certify->add_option("--bisect-tol", ca.bisect_tol)->capture_default_str();
  certify->add_option("--seed", ca.seed)->capture_default_str();
  certify->add_option("--restarts", ca.restarts)->capture_default_str();
  certify->add_option("--max-iters", ca.max_iters)->capture_default_str();
  certify->add_option("--out-dir", ca.out_dir)->capture_default_str();

  LyapunovArgs la;
  auto* lyap = app.add_subcommand("lyapunov", "Check the direct quadratic Lyapunov construction");
  lyap->add_option("--gamma", la.gamma)->required();
  lyap->add_option("--beta", la.beta)->required();
  lyap->add_option("--eps", la.eps, "Check a single eps instead of a grid");
  lyap->add_option("--rho", la.rho, "Check a single rho instead of a grid");
  lyap->add_option("--grid", la.grid, "alpha grid points")->capture_default_str();
  lyap->add_option("--eps-points", la.eps_points)->capture_default_str();
  lyap->add_option("--rho-points", la.rho_points)->capture_default_str();
  lyap->add_option("--rho-max", la.rho_max)->capture_default_str();
  lyap->add_option("--out-dir", la.out_dir)->capture_default_str();

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "Compare NAG, SGD and CJY stability bounds");
  bound->add_option("--G", ba.g, "Gradient bound")->capture_default_str();
  bound->add_option("--gamma", ba.gamma)->required();
  bound->add_option("--beta", ba.beta)->required();
  bound->add_option("--n", ba.n)->required();
  bound->add_option("--T", ba.T)->required();
  bound->add_option("--rho", ba.rho, "Contraction rate (default from kappa)");
  bound->add_option("--out-dir", ba.out_dir)->capture_default_str();

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Coupled-run stability experiments");
  sim->add_option("mode", sa.mode, "vs-n | vs-t")->required()->check(CLI::IsMember({"vs-n", "vs-t"}));
  sim->add_option("--data", sa.data, "CSV file (header, features, label)");
  sim->add_flag("--synthetic", sa.synthetic, "Use generated data (the default)");
  sim->add_option("--pool-size", sa.pool_size)->capture_default_str();
  sim->add_option("--dim", sa.dim)->capture_default_str();
  sim->add_option("--separation", sa.separation)->capture_default_str();
  sim->add_option("--sizes", sa.sizes)->delimiter(',')->capture_default_str();
  sim->add_option("--checkpoints", sa.checkpoints)->delimiter(',')->capture_default_str();
  sim->add_option("--trials", sa.trials)->capture_default_str();
  sim->add_option("--seed", sa.seed)->capture_default_str();
  sim->add_option("--T", sa.T, "Iterations for vs-n")->capture_default_str();
  sim->add_option("--optimizer", sa.optimizer)
      ->check(CLI::IsMember({"nag-standard", "nag", "sgd", "heavy-ball"}))
      ->capture_default_str();
  sim->add_option("--eta", sa.eta)->capture_default_str();
  sim->add_option("--mu", sa.mu)->capture_default_str();
  sim->add_option("--lambda", sa.lambda_reg)->capture_default_str();
  sim->add_option("--metric", sa.metric)->check(CLI::IsMember({"param_diff", "loss_gap"}))->capture_default_str();
  sim->add_option("--perturbation", sa.perturbation)
      ->check(CLI::IsMember({"replace", "flip"}))
      ->capture_default_str();
  sim->add_option("--probes", sa.probes)->capture_default_str();
  sim->add_option("--out-dir", sa.out_dir)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*certify) return cmd_certify(ca, out);
    if (*lyap) return cmd_lyapunov(la, out);
    if (*bound) return cmd_bound(ba, out);
    return cmd_simulate(sa, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace stabcert::cli
