#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qsa/entropy_opt.hpp"
#include "qsa/serialize.hpp"

namespace qsa::cli {

enum class Command { smin, hhat, lemma, superadd, additivity, sweep };
enum class PsiKind { depolarizing, random_kraus, identity };
enum class OutputFormat { table, json, csv };

struct RunConfig {
  Command command = Command::smin;
  std::size_t d = 2;
  std::size_t d_k = 2;
  double p = 0.5;
  /// Sweep points; empty unless --p-grid was given.
  std::vector<double> p_grid;
  PsiKind psi_kind = PsiKind::depolarizing;
  double psi_p = 0.3;
  /// Environment dimension for random_kraus; 0 selects d_k.
  std::size_t psi_env = 0;
  std::size_t n_states = 5;
  std::size_t n_bases = 10;
  OptimizerConfig optimizer;
  LogBase log_base = LogBase::e;
  OutputFormat format = OutputFormat::table;
  std::string output_path;
  /// Worker threads; 0 selects the available parallelism.
  std::size_t jobs = 0;
};

/// Thrown for --help and for an empty argument list. `text` is the usage.
struct UsageRequest {
  std::string text;
  bool explicit_help = false;
};

/// Parses arguments (without the program name). A `--config FILE` holds
/// `key = value` lines using the long flag names; flags on the command line
/// win over the file, and QSA_SEED is consulted when neither sets a seed.
/// Throws UsageRequest, or InvalidConfig naming the offending field.
RunConfig parse_config(const std::vector<std::string>& args);

/// Throws InvalidConfig when a field is outside the range of the module it
/// feeds.
void validate(const RunConfig& cfg);

/// "a:b:step", inclusive of b up to rounding.
std::vector<double> parse_grid(const std::string& spec);

struct RunResult {
  int exit_code = 0;
  std::size_t violations = 0;
  std::size_t unconverged = 0;
};

/// Runs the command and writes the report to `out`. Exit code 0 when every
/// margin is within tolerance and every optimization converged, 2 otherwise.
RunResult run(const RunConfig& cfg, std::ostream& out);

/// Full command-line entry point: parse, run, route output. Returns the
/// process exit code.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsa::cli
