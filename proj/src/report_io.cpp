#include "stabcert/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "stabcert/rng.hpp"

namespace stabcert {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { add_row(header); }

void CsvWriter::add_row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::invalid_argument("CsvWriter: wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    out_ += csv_field(fields[i]);
  }
  out_ += '\n';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json certificate_json(const SdpCertificate& cert, const std::string& optimizer,
                      const SectorBounds& bounds) {
  json j;
  j["optimizer"] = optimizer;
  j["gamma"] = bounds.gamma;
  j["beta"] = bounds.beta;
  j["P"] = matrix_json(cert.p.matrix());
  j["lambda"] = cert.lambda;
  j["tau1"] = cert.tau1;
  j["tau2"] = cert.tau2;
  j["lmi_max_eig"] = cert.lmi_max_eig;
  j["p_min_eig"] = cert.p_min_eig;
  j["status"] = to_string(cert.status);
  j["solver_seed"] = cert.solver_seed;
  if (cert.rho) j["rho"] = *cert.rho;
  return j;
}

BoundTable make_bound_table(const SectorBounds& bounds, std::int64_t n, std::int64_t T, double rho) {
  BoundTable t;
  t.bounds = bounds;
  t.n = n;
  t.T = T;
  t.rho = rho;
  t.nag = nag_stability_bound(BoundInputs{bounds, n, T, rho});
  t.sgd = sgd_stability_bound(bounds, n);
  t.cjy = cjy_bound(bounds, n, T);
  t.cjy_limit = cjy_limit(bounds, n);
  return t;
}

json bound_table_json(const BoundTable& t) {
  json j;
  j["G"] = t.bounds.grad_bound;
  j["gamma"] = t.bounds.gamma;
  j["beta"] = t.bounds.beta;
  j["kappa"] = t.bounds.kappa();
  j["n"] = t.n;
  j["T"] = t.T;
  j["rho"] = t.rho;
  j["nag"] = {{"param", t.nag.param_bound},
              {"loss", t.nag.loss_bound},
              {"param_limit", t.nag.param_limit},
              {"loss_limit", t.nag.loss_limit}};
  j["sgd"] = {{"loss", t.sgd}, {"loss_limit", t.sgd}};
  j["cjy"] = {{"loss", t.cjy}, {"loss_limit", t.cjy_limit}};
  return j;
}

std::string to_string(SimulationMode mode) { return mode == SimulationMode::VsN ? "vs-n" : "vs-t"; }

std::string report_csv(const StabilityReport& report, const ExperimentConfig& config,
                       SimulationMode mode, const std::string& id) {
  CsvWriter csv({"config_id", "n", "T", "trial", "metric", "value"});
  if (mode == SimulationMode::VsN) {
    const std::string t = std::to_string(config.T);
    for (const auto& tr : report.trials) {
      const std::string n = std::to_string(tr.n);
      const std::string trial = std::to_string(tr.trial);
      csv.add_row({id, n, t, trial, to_string(StabilityMetric::ParamDiff), format_double(tr.param_diff)});
      csv.add_row({id, n, t, trial, to_string(StabilityMetric::LossGap), format_double(tr.loss_gap)});
    }
  } else {
    for (std::size_t c = 0; c < report.checkpoints.size(); ++c) {
      const std::string t = std::to_string(report.checkpoints[c].T);
      for (const auto& tr : report.trials)
        csv.add_row({id, std::to_string(tr.n), t, std::to_string(tr.trial),
                     to_string(StabilityMetric::ParamDiff), format_double(tr.checkpoint_param_diff[c])});
    }
  }
  return csv.str();
}

namespace {

json fit_json(const std::optional<LogLogFit>& fit) {
  if (!fit) return nullptr;
  return {{"slope", fit->slope}, {"intercept", fit->intercept}, {"r_squared", fit->r_squared}};
}

json optimizer_json(const OptimizerSpec& spec) {
  json j{{"name", optimizer_name(spec)}};
  std::visit(
      [&j](const auto& opt) {
        using T_ = std::decay_t<decltype(opt)>;
        if constexpr (std::is_same_v<T_, Sgd>) {
          j["eta"] = opt.eta;
        } else if constexpr (!std::is_same_v<T_, NagSmoothQuadratic>) {
          j["eta"] = opt.eta;
          j["mu"] = opt.mu;
        }
      },
      spec);
  return j;
}

}  // namespace

json summary_json(const StabilityReport& report, const ExperimentConfig& config, SimulationMode mode,
                  const std::string& id, const std::string& data_name) {
  const SectorBounds& sector = report.sector.bounds;
  const double theory_rho = contraction_rate(sector.kappa()).rho;

  json j;
  j["config_id"] = id;
  j["mode"] = to_string(mode);
  j["data"] = data_name;
  j["optimizer"] = optimizer_json(config.optimizer);
  j["lambda_reg"] = config.lambda_reg;
  j["trials"] = config.trials;
  j["master_seed"] = config.master_seed;
  j["metric"] = to_string(config.metric);
  j["perturbation"] = to_string(config.perturbation);
  j["sector"] = {{"gamma", sector.gamma},
                 {"beta", sector.beta},
                 {"kappa", sector.kappa()},
                 {"G", sector.grad_bound},
                 {"G_is_estimate", report.sector.grad_bound_is_estimate}};

  const std::int64_t horizon = mode == SimulationMode::VsN ? config.T
                               : report.checkpoints.empty() ? 0
                                                            : report.checkpoints.back().T;
  json sizes = json::array();
  for (const auto& s : report.sizes) {
    const auto table = make_bound_table(sector, static_cast<std::int64_t>(s.n), horizon, theory_rho);
    sizes.push_back({{"n", s.n},
                     {"T", horizon},
                     {"mean", s.summary.mean},
                     {"max", s.summary.max},
                     {"theory", bound_table_json(table)}});
  }
  j["sizes"] = std::move(sizes);

  if (mode == SimulationMode::VsN) {
    j["slope"] = fit_json(report.fit);
  } else {
    json cps = json::array();
    for (const auto& c : report.checkpoints)
      cps.push_back({{"T", c.T}, {"mean", c.summary.mean}, {"max", c.summary.max}});
    j["checkpoints"] = std::move(cps);
    j["rho"] = report.rho;
    j["t_half"] = std::isfinite(report.t_half) ? json(report.t_half) : json(nullptr);
    j["fit_checkpoints"] = report.fit_checkpoints;
    j["plateau_fallback"] = report.plateau_fallback;
    j["slope"] = fit_json(report.t_fit);
    if (report.saturating)
      j["saturating"] = {{"c", report.saturating->c},
                         {"rho", report.saturating->rho},
                         {"r_squared", report.saturating->r_squared}};
    else
      j["saturating"] = nullptr;
    j["envelope_nondecreasing"] = report.envelope_nondecreasing;
  }
  return j;
}

std::string config_id(const ExperimentConfig& config, SimulationMode mode) {
  std::ostringstream key;
  key << to_string(mode) << '|' << optimizer_json(config.optimizer).dump() << '|' << config.T << '|'
      << format_double(config.lambda_reg) << '|' << config.trials << '|' << config.master_seed << '|'
      << to_string(config.metric) << '|' << to_string(config.perturbation) << '|' << config.probe_points;
  for (auto n : config.subset_sizes) key << ',' << n;
  key << '|';
  for (auto c : config.checkpoints) key << ',' << c;

  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : key.str()) h = (h ^ ch) * 0x100000001b3ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mix64(h)));
  return buf;
}

}  // namespace stabcert
