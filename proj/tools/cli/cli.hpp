#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "edpm/model.hpp"

namespace edpm::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, numeric_error = 3, io_error = 4 };

// Runs one subcommand and returns the process exit status. Library errors
// map onto exit codes: ConfigError and DomainError 2, NumericalError and
// MatrixError 3, IoError 4.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Config output_dir, else $EDPM_OUTPUT_DIR, else ./edpm-out.
std::string resolve_output_dir(const Config& c);

// Defaults derived from the data, then every prior.* key that is set.
Hyperparameters resolve_hyperparameters(const Config& c, const Dataset& data);

nlohmann::json hyperparameters_to_json(const Hyperparameters& hp);
Hyperparameters hyperparameters_from_json(const nlohmann::json& j);
Hyperparameters read_hyperparameters(const std::string& path);

// Covariate rows from a CSV with header x1,...,xp; a leading y column is
// accepted and ignored.
Eigen::MatrixXd read_covariates_csv(const std::string& path);

}  // namespace edpm::cli
