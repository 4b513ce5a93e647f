#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "banditlab/engine.hpp"
#include "banditlab/verify.hpp"

namespace banditlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

inline constexpr int kSchemaVersion = 1;

/// Everything a config file can say. Axes left out of the file take their
/// defaults; axes given as empty lists are an error.
struct Config {
  nlohmann::json source;  // as parsed, after command-line overrides
  ExperimentConfig experiment;
  std::vector<std::size_t> arms_axis;  // sweep only; empty means "the configured instance"
  std::vector<bool> theory_lambda;     // per algorithm: lambda given as "theory"
  double verify_alpha = kDefaultSambaAlpha;
  UpdateRule update_rule = UpdateRule::Samba;
  std::size_t bench_runs = 5;
};

/// Throws Error(InvalidConfig) on schema violations.
Config parse_config(const nlohmann::json& doc);
Config load_config(const std::string& path);

/// FNV-1a over the compact dump of the document. nlohmann::json keeps object
/// keys sorted, so the hash does not depend on key order in the file.
std::uint64_t config_hash(const nlohmann::json& doc);

/// 17 significant digits, independent of the global locale.
std::string format_number(double x);

std::string results_csv(const AggregateStats& stats);
std::string curves_csv(const AggregateStats& stats);
std::string bench_csv(const std::vector<BenchRow>& rows);

struct Invocation {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool fast = false;
};

int cmd_run(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_sweep(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_verify(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_bench(const Invocation& inv, std::ostream& out, std::ostream& err);

/// Parses argv (program name first) and dispatches. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace banditlab::cli
