#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "infotrade/monte_carlo.hpp"
#include "infotrade/trading_engine.hpp"

namespace infotrade::cli {

// Parsed JSON run configuration. Recognized keys:
//   scenario (required), phi, psi_a, psi_b, p | measure, r, t_maturity,
//   n_steps, sessions, max_trades, seed, sigma_a, sigma_b, fixed_time,
//   trade_at_last_instant.
// Unknown keys are rejected.
struct RunConfig {
  ScenarioConfig scenario;
  std::uint64_t sessions = 100000;
  std::uint64_t seed = 1;
};

// Throws std::invalid_argument with a message naming the offending key.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// Round-trip formatting (17 significant digits).
std::string format_double(double v);

// "start:stop:count" -> count evenly spaced values, endpoints included.
std::vector<double> parse_range(const std::string& spec);

nlohmann::json to_json(const BatchStats& stats);

void write_sessions_csv(std::ostream& os, const std::vector<SessionResult>& sessions);
void write_hist_csv(std::ostream& os, const Histogram& hist);

struct CommonOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
};

struct SweepOptions {
  std::string phi_spec;
  std::string sigma_spec;
  std::optional<double> sigma_ratio;
};

struct BoundOptions {
  double phi = 1.02;
  double p = 0.8;
  double sigma = 1.0;
  double t = 0.5;
  double t_maturity = 1.0;
  double r = 0.0;
  std::optional<std::uint64_t> check_mc;
  std::uint64_t seed = 1;
};

struct Lemma3Options {
  std::size_t max_len = 10;
  double phi = 1.02;
  double psi = 1.01;
  std::filesystem::path out_dir = ".";
};

// Each command returns a process exit status and reports failures on `err`.
int cmd_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommonOptions& opts, const SweepOptions& sweep, std::ostream& out,
              std::ostream& err);
int cmd_bound(const BoundOptions& opts, std::ostream& out, std::ostream& err);
int cmd_lemma3(const Lemma3Options& opts, std::ostream& out, std::ostream& err);
int cmd_hist(const CommonOptions& opts, std::size_t bins, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace infotrade::cli
