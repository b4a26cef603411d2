#pragma once

// The trisk subcommands as library functions. Each writes one canonical
// report document to `out` (or to options.out when set), diagnostics to
// `err`, and returns the process exit code.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "tlrisk/io/canonical_json.hpp"
#include "tlrisk/io/task_spec.hpp"

namespace tlrisk::io {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitVerifyFailed = 4,
};

struct CommonOptions {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<std::filesystem::path> out;
};

struct GaussianRiskOptions {
  std::filesystem::path spec;
  /// "kl", "w" or "both".
  std::string variant = "both";
  std::optional<double> lambda;
  bool verify = false;
  long mc_samples = 1'000'000;
  CommonOptions common;
};

struct OfficeTableOptions {
  bool builtin = false;
  std::optional<std::filesystem::path> csv;
  CommonOptions common;
};

struct PredictOptions {
  std::filesystem::path spec;
  std::optional<double> lambda_source;
  std::optional<double> lambda_target;
  CommonOptions common;
};

struct PortfolioOptions {
  std::filesystem::path spec;
  std::optional<double> penalty;
  CommonOptions common;
};

struct VerifyPropsOptions {
  long kl_cases = 10000;
  long w_cases = 1000;
  long regret_cases = 10000;
  long talagrand_cases = 1000;
  CommonOptions common;
};

int cmd_gaussian_risk(const GaussianRiskOptions& options, std::ostream& out, std::ostream& err);
int cmd_office_table(const OfficeTableOptions& options, std::ostream& out, std::ostream& err);
int cmd_predict(const PredictOptions& options, std::ostream& out, std::ostream& err);
int cmd_portfolio(const PortfolioOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify_props(const VerifyPropsOptions& options, std::ostream& out, std::ostream& err);

/// Result block of gaussian-risk for an in-memory spec (no oracle).
Json gaussian_risk_result(const GaussianSpec& spec, bool kl, bool w, std::optional<double> lambda);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown by any task is rethrown after all threads finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Maps library exceptions onto exit codes 2 and 3, printing the message.
int run_guarded(std::ostream& err, const std::function<int()>& body);

}  // namespace tlrisk::io
