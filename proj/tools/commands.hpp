#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace asvd::cli {

inline constexpr const char* kArtifact = "asvd";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kToleranceFailure = 2 };

struct RunConfig {
  std::string subcommand;
  std::uint64_t seed = 1;
  std::size_t K = 4096;
  std::optional<std::size_t> trials;
  std::optional<double> sigma2_e;
  std::vector<double> sigma2_norm;
  std::vector<std::size_t> N;
  double sigma2_v = 0.01;
  std::optional<std::size_t> J;
  std::optional<std::size_t> error_order;  // perturb only
  std::filesystem::path out = ".";
  std::string format = "csv";
  unsigned threads = 0;
  double omega0 = 0.0;  // set to pi by apply_defaults() for hist
  double inject_error = 0.0;

  /// Fills the per-subcommand defaults left unset on the command line.
  void apply_defaults();
  /// Throws std::invalid_argument on a bad combination of values.
  void validate() const;
};

/// Config echoed into output metadata. The output directory and thread count
/// do not affect results and are left out so outputs are byte-identical
/// across locations and thread counts.
nlohmann::json config_json(const RunConfig& cfg);
nlohmann::json metadata(const RunConfig& cfg);

int cmd_ex1(const RunConfig& cfg);
int cmd_hist(const RunConfig& cfg);
int cmd_perturb(const RunConfig& cfg);
int cmd_sysid(const RunConfig& cfg);

/// Dispatches on cfg.subcommand after apply_defaults() and validate().
int run(RunConfig cfg);

}  // namespace asvd::cli
