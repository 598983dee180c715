#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

// Experiment orchestration: flat key=value configs with dotted keys,
// hypothesis-regime validation, seeded batch execution with
// reproducible outputs, and report aggregation.

namespace spde {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExperimentConfig {
 public:
  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_lines(const std::vector<std::string>& lines);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double get_num(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  void set(const std::string& key, const std::string& value);

  /// canonical sorted key=value rendering
  std::string normalized() const;
  /// FNV-1a 64-bit digest of the normalized rendering, as 16 hex chars
  std::string digest() const;

 private:
  std::map<std::string, std::string> kv_;
};

/// FNV-1a 64 over raw bytes (also used for output-file integrity)
std::uint64_t fnv1a(const std::string& bytes);

struct RegimeReport {
  bool strict_mild = false;
  bool generalized = false;
  bool mild = false;
  std::string strongest;
  double p_star = 0.0;
  std::vector<std::string> notes;
};

/// names the admissible hypothesis regimes; throws ConfigError when the
/// requested regime (key `regime`) is not satisfied or the config is
/// contradictory
RegimeReport validate(const ExperimentConfig& cfg);

struct RunOptions {
  std::size_t threads = 1;   // accepted for CLI parity; execution is
                             // sequential and results never depend on it
  bool dump_states = false;  // write per-path binary state dumps (smoke)
};

/// executes the configured study, writing study.csv, trajectory.csv
/// (when requested), report.txt, config.echo and checksums.txt into
/// out_dir; returns 0 when every verdict passed
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                   std::ostream& log, const RunOptions& opts = {});

/// aggregates a run directory; verifies file integrity and the single
/// config digest; returns 0 iff all verdicts are PASS
int report_directory(const std::string& dir, std::ostream& out);

}  // namespace spde
