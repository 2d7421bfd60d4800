#pragma once

// Text formats: JSON experiment configs, the results CSV, report metadata, and
// the CSV matrix files used for datasets and priors.
//
// A matrix file holds one or more blocks. Each block is a "rows,cols" header
// line followed by `rows` lines of `cols` comma-separated decimals. Blank
// lines and lines starting with '#' are ignored.
//
//   dataset file: X block (n_t x N_x), then Y block (n_t x N_y)
//   prior file:   mu_y block (N_y x 1 or 1 x N_y), C_yy block (N_y x N_y),
//                 sigma2 block (1 x 1)

#include "linest/estimators.hpp"
#include "linest/harness.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace linest {

/// Parses a JSON config, fills defaults and validates it. Throws ConfigError
/// listing every problem found.
ExperimentConfig load_config(std::string_view json_text);

/// Fully resolved config as pretty-printed JSON; load_config round-trips it.
std::string config_to_json(const ExperimentConfig& cfg);

/// Columns: sweep_name,sweep_value,estimator,mean_mse,std_err,trials_ok,trials_failed.
/// Numbers use 17 significant digits; an absent mean or standard error is an empty field.
std::string report_csv(const MseReport& report);

/// Config echo plus per-cell condition warnings, failures and oracle gaps.
std::string report_metadata_json(const MseReport& report);

std::string format_double(double v);

std::vector<Matrix> read_matrix_blocks(std::istream& in, std::string_view source);
std::vector<Matrix> read_matrix_file(const std::string& path);

Dataset read_dataset_file(const std::string& path);
KnownStatistics read_known_file(const std::string& path);

}  // namespace linest
