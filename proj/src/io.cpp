#include "rmtfid/io.hpp"

#include "rmtfid/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rmtfid {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kCsvHeader =
    "tau,f_re_mean,f_im_mean,f_re_stderr,f_im_stderr,k_re_mean,k_im_mean,k_re_stderr,"
    "k_im_stderr,theory,n_realizations";

double parse_real(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("malformed number '" + std::string(text) + "'");
  return value;
}

// Smallest-adjustment m2 whose standard error reproduces `standard_error`
// bit-exactly, so CSV round trips re-export identically.
RunningMoments moments_from_stderr(std::int64_t count, double mean, double standard_error) {
  if (count < 2) return {count, mean, 0.0};
  const double n = static_cast<double>(count);
  double m2 = standard_error * standard_error * n * (n - 1.0);
  for (int iter = 0; iter < 64; ++iter) {
    const RunningMoments trial(count, mean, m2);
    const double se = trial.standard_error();
    if (se == standard_error) break;
    m2 = std::nextafter(m2, se < standard_error ? INFINITY : 0.0);
  }
  return {count, mean, m2};
}

std::uint64_t json_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("master_seed must be an integer");
}

json config_json(const ExperimentConfig& c) {
  return {{"n_levels", c.model.n_levels()},
          {"mode", to_string(c.model.mode())},
          {"beta", to_int(c.spec.beta)},
          {"lambda_par", c.spec.lambda_par},
          {"lambda_perp", c.spec.lambda_perp},
          {"tau_min", c.tau_min},
          {"tau_max", c.tau_max},
          {"tau_step", c.tau_step},
          {"n_realizations", c.n_realizations},
          {"master_seed", c.master_seed},
          {"window_fraction", c.window_fraction}};
}

ExperimentConfig config_from(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "n_levels", "mode",           "beta",        "lambda_par", "lambda_perp", "tau_min",
      "tau_max",  "tau_step",       "n_realizations", "master_seed", "workers", "window_fraction"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

  try {
    ExperimentConfig c;
    const int n_levels = j.value("n_levels", c.model.n_levels());
    const std::string mode = j.value("mode", to_string(c.model.mode()));
    c.model = SpectrumModel(n_levels, spectrum_mode_from_string(mode));
    c.spec.beta = beta_from_int(j.value("beta", to_int(c.spec.beta)));
    c.spec.lambda_par = j.value("lambda_par", c.spec.lambda_par);
    c.spec.lambda_perp = j.value("lambda_perp", c.spec.lambda_perp);
    c.tau_min = j.value("tau_min", c.tau_min);
    c.tau_max = j.value("tau_max", c.tau_max);
    c.tau_step = j.value("tau_step", c.tau_step);
    c.n_realizations = j.value("n_realizations", c.n_realizations);
    if (j.contains("master_seed")) c.master_seed = json_seed(j["master_seed"]);
    c.workers = j.value("workers", c.workers);
    c.window_fraction = j.value("window_fraction", c.window_fraction);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc()) throw ConfigError("cannot format number");
  return std::string(buf, ptr);
}

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown format '" + name + "' (expected csv or json)");
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from(j);
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_file(path)); }

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

RunRecord make_record(const ExperimentConfig& config, EnsembleStatistics stats) {
  TheoryCurve theory = make_theory_curve(config.spec, stats.taus());
  return {std::move(stats), std::move(theory), config};
}

std::string to_csv(const RunRecord& record) {
  const EnsembleStatistics& s = record.stats;
  if (record.theory.values.size() != s.size()) throw ConfigError("theory column length mismatch");
  std::string out = kCsvHeader;
  out += '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& p = s.point(i);
    const double cols[] = {s.taus()[i],          p.f_re.mean(), p.f_im.mean(),
                           p.f_re.standard_error(), p.f_im.standard_error(), p.k_re.mean(),
                           p.k_im.mean(),         p.k_re.standard_error(), p.k_im.standard_error(),
                           record.theory.values[i]};
    for (double c : cols) {
      out += format_real(c);
      out += ',';
    }
    out += std::to_string(s.count());
    out += '\n';
  }
  return out;
}

std::string to_json(const RunRecord& record) {
  const EnsembleStatistics& s = record.stats;
  if (record.theory.values.size() != s.size()) throw ConfigError("theory column length mismatch");
  json j;
  j["format"] = "rmtfid-run";
  j["version"] = 1;
  if (record.config) {
    j["config"] = config_json(*record.config);
    j["master_seed"] = record.config->master_seed;
  } else {
    j["config"] = nullptr;
    j["master_seed"] = nullptr;
  }
  j["n_realizations"] = s.count();
  json rows = json::array();
  json acc = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& p = s.point(i);
    rows.push_back({{"tau", s.taus()[i]},
                    {"f_re_mean", p.f_re.mean()},
                    {"f_im_mean", p.f_im.mean()},
                    {"f_re_stderr", p.f_re.standard_error()},
                    {"f_im_stderr", p.f_im.standard_error()},
                    {"k_re_mean", p.k_re.mean()},
                    {"k_im_mean", p.k_im.mean()},
                    {"k_re_stderr", p.k_re.standard_error()},
                    {"k_im_stderr", p.k_im.standard_error()},
                    {"theory", record.theory.values[i]},
                    {"n_realizations", s.count()}});
    acc.push_back({{"f_re_m2", p.f_re.m2()},
                   {"f_im_m2", p.f_im.m2()},
                   {"k_re_m2", p.k_re.m2()},
                   {"k_im_m2", p.k_im.m2()}});
  }
  j["rows"] = std::move(rows);
  j["accumulators"] = std::move(acc);
  return j.dump(2) + "\n";
}

void export_record(const RunRecord& record, const std::string& path, OutputFormat format) {
  write_file(path, format == OutputFormat::csv ? to_csv(record) : to_json(record));
}

RunRecord record_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("unexpected CSV header");

  struct Row {
    double v[10];
    std::int64_t count;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row row{};
    std::size_t start = 0;
    for (int c = 0; c < 11; ++c) {
      const std::size_t comma = line.find(',', start);
      const bool last = c == 10;
      if (last != (comma == std::string::npos)) throw ConfigError("CSV row must have 11 columns");
      const std::string_view cell(line.data() + start, (last ? line.size() : comma) - start);
      if (last) {
        std::int64_t count = 0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), count);
        if (ec != std::errc() || ptr != cell.data() + cell.size())
          throw ConfigError("malformed n_realizations '" + std::string(cell) + "'");
        row.count = count;
      } else {
        row.v[c] = parse_real(cell);
      }
      start = comma + 1;
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw ConfigError("CSV has no data rows");

  EnsembleKey key;
  for (const auto& r : rows) {
    key.taus.push_back(r.v[0]);
    if (r.count != rows.front().count) throw ConfigError("inconsistent n_realizations column");
  }
  EnsembleStatistics stats(key);
  const std::int64_t n = rows.front().count;
  stats.set_count(n);
  TheoryCurve theory;
  theory.taus = key.taus;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* v = rows[i].v;
    auto& p = stats.point(i);
    p.f_re = moments_from_stderr(n, v[1], v[3]);
    p.f_im = moments_from_stderr(n, v[2], v[4]);
    p.k_re = moments_from_stderr(n, v[5], v[7]);
    p.k_im = moments_from_stderr(n, v[6], v[8]);
    theory.values.push_back(v[9]);
  }
  return {std::move(stats), std::move(theory), std::nullopt};
}

RunRecord record_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    std::optional<ExperimentConfig> config;
    if (j.contains("config") && !j["config"].is_null()) config = config_from(j["config"]);
    const json& rows = j.at("rows");
    const std::int64_t n = j.at("n_realizations").get<std::int64_t>();

    EnsembleKey key;
    if (config) key = EnsembleKey::of(*config);
    key.taus.clear();
    for (const auto& r : rows) key.taus.push_back(r.at("tau").get<double>());
    EnsembleStatistics stats(key);
    stats.set_count(n);

    TheoryCurve theory;
    theory.taus = key.taus;
    if (config) theory.params = config->spec;
    const json* acc = j.contains("accumulators") ? &j["accumulators"] : nullptr;
    if (acc && acc->size() != rows.size()) throw ConfigError("accumulators length mismatch");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const json& r = rows[i];
      auto& p = stats.point(i);
      auto field = [&](const char* name) { return r.at(name).get<double>(); };
      if (acc) {
        const json& a = (*acc)[i];
        p.f_re = {n, field("f_re_mean"), a.at("f_re_m2").get<double>()};
        p.f_im = {n, field("f_im_mean"), a.at("f_im_m2").get<double>()};
        p.k_re = {n, field("k_re_mean"), a.at("k_re_m2").get<double>()};
        p.k_im = {n, field("k_im_mean"), a.at("k_im_m2").get<double>()};
      } else {
        p.f_re = moments_from_stderr(n, field("f_re_mean"), field("f_re_stderr"));
        p.f_im = moments_from_stderr(n, field("f_im_mean"), field("f_im_stderr"));
        p.k_re = moments_from_stderr(n, field("k_re_mean"), field("k_re_stderr"));
        p.k_im = moments_from_stderr(n, field("k_im_mean"), field("k_im_stderr"));
      }
      theory.values.push_back(field("theory"));
    }
    return {std::move(stats), std::move(theory), config};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run JSON: ") + e.what());
  }
}

RunRecord import_record(const std::string& path, OutputFormat format) {
  const std::string text = read_file(path);
  try {
    return format == OutputFormat::csv ? record_from_csv(text) : record_from_json(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path, "read failed");
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

}  // namespace rmtfid
