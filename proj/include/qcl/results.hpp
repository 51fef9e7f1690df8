#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qcl/config.hpp"

namespace qcl {

// Row-oriented experiment output. Cells are preformatted so that the CSV is
// byte-identical across re-runs; the summary is assembled from the same
// values the rows were printed from.
struct ResultsTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json summary;
};

// shortest representation that round-trips a double exactly
std::string format_double(double x);
std::string format_bool(bool b);

// Writes <out>/rows.csv, <out>/summary.json and <out>/config.json, creating
// the directory when needed. Throws std::runtime_error with the offending
// path on I/O failure.
void write_results(const ResultsTable& table, const ExperimentConfig& config,
                   const std::string& out_dir);

nlohmann::json config_to_json(const ExperimentConfig& config);

std::string rows_to_csv(const ResultsTable& table);

double median_of(std::vector<double> values);

}  // namespace qcl
