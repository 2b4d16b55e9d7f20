#pragma once

// Batch experiments behind the command-line driver.  Every experiment
// returns a Table that can be written as CSV or JSON.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace fermitherm::cli {

enum class Format { csv, json };

struct ExperimentConfig {
  std::string experiment = "protocol";

  double gamma = 0.02;
  double eps1 = -5.0;
  double eps2 = 1.0;
  /// Single sweep time in units of 1/gamma (protocol, fig2).
  double gamma_tau = 10.0;
  /// Direct sweep time; overrides gamma_tau.
  std::optional<double> tau;
  /// fig1 grid; empty means the default 50-point log grid 0.01 .. 100.
  std::vector<double> gamma_taus;
  int K = 200;
  double gamma_dt = 0.06;
  /// Direct step; overrides gamma_dt (bath) or the default rate-equation step.
  std::optional<double> dt;
  double n0 = 1.0;

  double p = 0.5;
  double phi = 1.5707963267948966;
  double omega = 1.0;
  std::string engine = "quasistatic";
  bool enforce_endpoint = false;

  /// witness / protocol: "one-body" (p, phi) or "diagonal" (n_m, n_s).
  std::string initial = "one-body";
  double n_m = 0.5;
  double n_s = 0.5;
  /// witness: rotate[:angle], thermalize:<target>, swap, erase.
  std::vector<std::string> sequence{"rotate"};

  std::uint64_t seed = 20240611;
  int cases = 1000;

  std::string out;
  Format format = Format::csv;

  /// Throws ValidationError on any bad parameter.
  void validate() const;
  double sweep_time() const { return tau.value_or(gamma_tau / gamma); }
};

/// Key-by-key overlay of a JSON object onto `base`; unknown keys throw
/// ValidationError.
ExperimentConfig apply_json(ExperimentConfig base, const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

Format parse_format(const std::string& name);
std::vector<double> default_fig1_grid();

using Cell = std::variant<double, std::string>;

struct Table {
  std::string experiment;
  /// Units per column, documented in the CSV header comment.
  std::vector<std::pair<std::string, std::string>> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  /// false when the experiment's own checks failed (invariants).
  bool ok = true;
};

Table cmd_protocol(const ExperimentConfig& config);
Table cmd_fig1(const ExperimentConfig& config);
Table cmd_fig2(const ExperimentConfig& config);
Table cmd_witness(const ExperimentConfig& config);
Table cmd_invariants(const ExperimentConfig& config);
Table run_experiment(const ExperimentConfig& config);

/// Numbers are written with 17 significant digits.
void write_csv(const Table& table, std::ostream& os);
void write_json(const Table& table, std::ostream& os);
void write_table(const Table& table, Format format, std::ostream& os);

/// Full command-line entry point; returns the process exit status
/// (0 ok, 1 failed invariant, 2 validation error, 3 engine error).
int run_cli(int argc, char** argv);

}  // namespace fermitherm::cli
