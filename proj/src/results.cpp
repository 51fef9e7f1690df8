#include "qcl/results.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace qcl {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_bool(bool b) { return b ? "1" : "0"; }

std::string rows_to_csv(const ResultsTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return nlohmann::json{
      {"experiment", to_string(c.experiment)},
      {"n_models", c.n_models},
      {"n_runs_per_model", c.n_runs_per_model},
      {"seed", c.seed},
      {"dimension", c.dimension},
      {"segments", c.segments},
      {"horizon", c.horizon},
      {"polarizability", c.polarizability ? "on" : "off"},
      {"h2_ratio", c.h2_ratio},
      {"output_path", c.output_path},
      {"threads", c.threads},
      {"success_threshold", c.success_threshold},
      {"max_tries", c.max_tries},
      {"max_total_iterations", c.max_total_iterations},
      {"step_size", c.step_size},
      {"ode_steps", c.ode_steps},
      {"confirm_traps", c.confirm_traps},
  };
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << data;
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace

void write_results(const ResultsTable& table, const ExperimentConfig& config,
                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory: " + out_dir +
                             " (" + ec.message() + ")");
  }
  write_file(dir / "rows.csv", rows_to_csv(table));
  write_file(dir / "summary.json", table.summary.dump(2) + "\n");
  write_file(dir / "config.json", config_to_json(config).dump(2) + "\n");
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

}  // namespace qcl
