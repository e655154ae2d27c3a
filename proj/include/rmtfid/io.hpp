#pragma once

#include "rmtfid/experiment.hpp"

#include <optional>
#include <string>

namespace rmtfid {

/// Locale-independent rendering with 17 significant digits (printf %.17g).
std::string format_real(double value);

enum class OutputFormat { csv, json };

OutputFormat output_format_from_string(const std::string& name);

/// JSON keys: n_levels, mode, beta, lambda_par, lambda_perp, tau_min, tau_max,
/// tau_step, n_realizations, master_seed, workers, window_fraction. Missing
/// keys take the ExperimentConfig defaults; unknown keys are a ConfigError.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// The worker count is left out: it is a scheduling hint, and leaving it out
/// keeps exported runs byte-identical across worker counts.
std::string config_to_json(const ExperimentConfig& config);

/// Statistics plus the theory column they are exported with.
struct RunRecord {
  EnsembleStatistics stats;
  TheoryCurve theory;
  std::optional<ExperimentConfig> config;
};

RunRecord make_record(const ExperimentConfig& config, EnsembleStatistics stats);

std::string to_csv(const RunRecord& record);
std::string to_json(const RunRecord& record);
void export_record(const RunRecord& record, const std::string& path, OutputFormat format);

RunRecord record_from_csv(const std::string& text);
RunRecord record_from_json(const std::string& text);
RunRecord import_record(const std::string& path, OutputFormat format);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace rmtfid
