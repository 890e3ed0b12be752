#pragma once

// CSV and JSON emitters shared by the command-line tools. CSV follows RFC 4180
// quoting with LF line endings; doubles are printed with 17 significant digits.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "stabcert/iqc_sdp.hpp"
#include "stabcert/lyapunov_direct.hpp"
#include "stabcert/stability_sim.hpp"

namespace stabcert {

/// "%.17g"; non-finite values print as nan / inf / -inf.
std::string format_double(double v);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& s);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& fields);
  [[nodiscard]] const std::string& str() const noexcept { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

/// Writes bytes verbatim, creating parent directories. Throws std::runtime_error.
void write_file(const std::filesystem::path& path, const std::string& content);

nlohmann::json matrix_json(const Matrix& m);

/// Fields: optimizer, gamma, beta, P (row-major), lambda, tau1, tau2,
/// lmi_max_eig, p_min_eig, status, solver_seed, and rho for rate-form results.
nlohmann::json certificate_json(const SdpCertificate& cert, const std::string& optimizer,
                                const SectorBounds& bounds);

struct BoundTable {
  SectorBounds bounds;
  std::int64_t n = 1;
  std::int64_t T = 0;
  double rho = 0.0;
  NagBound nag;
  double sgd = 0.0;
  double cjy = 0.0;
  double cjy_limit = 0.0;
};

BoundTable make_bound_table(const SectorBounds& bounds, std::int64_t n, std::int64_t T, double rho);
nlohmann::json bound_table_json(const BoundTable& table);

enum class SimulationMode { VsN, VsT };

std::string to_string(SimulationMode mode);

/// Long format: config_id, n, T, trial, metric, value. vs-n rows carry both
/// metrics at the final T; vs-T rows carry param_diff at each checkpoint.
std::string report_csv(const StabilityReport& report, const ExperimentConfig& config,
                       SimulationMode mode, const std::string& config_id);

/// Slopes, fits, sector estimate and the theoretical bounds at each size.
nlohmann::json summary_json(const StabilityReport& report, const ExperimentConfig& config,
                            SimulationMode mode, const std::string& config_id,
                            const std::string& data_name);

/// Short stable identifier for a configuration (hex of a seed-mixed hash).
std::string config_id(const ExperimentConfig& config, SimulationMode mode);

}  // namespace stabcert
