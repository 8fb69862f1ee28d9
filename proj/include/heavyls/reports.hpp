#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "heavyls/envelope.hpp"
#include "heavyls/experiment.hpp"
#include "heavyls/maxineq.hpp"

namespace heavyls {

inline constexpr const char* kVersion = "0.1.0";

/// 17 significant digits: doubles round-trip exactly through the CSVs.
std::string format_real(double v);

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string to_string() const;
  void write(const std::string& path) const;
  static Csv parse_text(const std::string& text);
  static Csv read(const std::string& path);
};

/// Two-column (x, y) data file for `fit`; header row optional on input.
std::pair<std::vector<double>, std::vector<double>> read_xy_csv(
    const std::string& path);

// --- strict JSON (unknown keys rejected with their exact name) ---

ShapeClass shape_from_json(const nlohmann::json& j);
nlohmann::json shape_to_json(const ShapeClass& cls);
Design design_from_json(const nlohmann::json& j);
nlohmann::json design_to_json(const Design& d);
NoiseSpec noise_from_json(const nlohmann::json& j);
nlohmann::json noise_to_json(const NoiseSpec& spec);
ExperimentSpec experiment_from_json(const nlohmann::json& j);
nlohmann::json experiment_to_json(const ExperimentSpec& spec);

// --- report writers ---

Csv rate_summary_csv(const RateReport& r);
Csv rate_raw_csv(const RateReport& r);
nlohmann::json rate_verdict_json(const RateReport& r);

Csv tail_csv(const TailReport& r);
nlohmann::json tail_verdict_json(const TailReport& r);

Csv envelope_profile_csv(const EnvelopeProfile& p);
nlohmann::json envelope_summary_json(const EnvelopeProfile& p);

Csv maxineq_csv(const std::vector<VerifyResult>& results);
nlohmann::json interpolation_json(const InterpolationReport& r);

// --- figure data emitters ---

/// (delta, x, lower, upper) rows: the band f0 -+ F_delta on an x grid.
Csv figure_envelope_band(const ShapeClass& cls, const Center& center,
                         const std::vector<double>& deltas, int grid_m,
                         int x_points, bool use_oracle);

/// (log_n, log_median, fit_line) rows, one per n.
Csv figure_rate_loglog(const RateReport& r);

/// (log_threshold, log_survival, gauss_log_survival) rows.
Csv figure_tail_survival(const TailReport& r);

/// Manifest: config + version + seeds, written next to outputs. Re-running
/// the same command from the manifest reproduces the outputs byte for byte.
void write_manifest(const std::string& dir, const std::string& command,
                    const nlohmann::json& config,
                    const std::vector<std::string>& outputs);

/// Loads a config file that may be either a bare config or a manifest
/// produced by `command` (its embedded config is extracted).
nlohmann::json load_config_file(const std::string& path,
                                const std::string& command);

}  // namespace heavyls
