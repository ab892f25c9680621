#pragma once

// simulate -> AoI -> metrics, plus file emission for single runs and sweeps.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stqos/config.hpp"
#include "stqos/metrics.hpp"
#include "stqos/sim.hpp"

namespace stqos::pipeline {

struct FitRow {
  std::string metric;
  std::string units;
  metrics::QosExponentEstimate estimate{};
  bool ok = false;  // false when the fit had too little data
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::int64_t updates_generated = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
  double drop_rate = 0.0;

  metrics::MeanCi total_delay{};
  double mean_queuing = 0.0;
  double mean_transmission = 0.0;
  double mean_processing = 0.0;
  double mean_propagation = 0.0;
  double mean_service = 0.0;
  double mellin_s = 2.0;
  double mellin_service = 0.0;
  double mean_rounds = 0.0;
  double mean_queue_length = 0.0;

  metrics::MeanCi peak_aoi{};
  double time_average_aoi = 0.0;
  double aoi_threshold = 0.0;
  double peak_aoi_violation = 0.0;
  double delay_threshold = 0.0;
  double delay_violation = 0.0;

  // Analytic theta_error on the weakest hop at its fading-free SINR, L rounds.
  double bottleneck_sinr_db = 0.0;
  double theta_error = 0.0;       // per n_hat
  double theta_error_full = 0.0;  // per n = L n_hat

  std::vector<FitRow> fits;

  const FitRow* fit(std::string_view metric) const;
};

struct RunArtifacts {
  sim::SimTrace trace;
  sim::AoiTrajectory aoi;
  RunSummary summary;
};

// Pure computation, no I/O. Expects a validated config.
RunArtifacts execute(const config::ScenarioConfig& cfg);

std::string trace_csv(const sim::SimTrace& trace, const sim::AoiTrajectory& aoi);
std::string aoi_csv(const sim::AoiTrajectory& aoi);
std::string fits_csv(const std::vector<FitRow>& fits);
std::string summary_json(const RunSummary& summary, const config::ScenarioConfig& cfg);

inline constexpr const char* kTraceColumns[] = {
    "id",           "generated_at_cu", "delivered_at_cu", "rounds",   "l0",         "queuing_cu",
    "transmission_cu", "processing_cu", "propagation_cu", "total_cu", "peak_aoi_cu"};

// Writes trace.csv, aoi.csv, fits.csv, summary.json and run.log into `out_dir`.
// Existing run files are never overwritten.
void write_run(const RunArtifacts& artifacts, const config::ScenarioConfig& cfg,
               const std::filesystem::path& out_dir);

RunSummary run(const config::ScenarioConfig& cfg, const std::filesystem::path& out_dir);

struct SweepSpec {
  std::string axis;
  std::vector<std::string> values;
  int replications = 1;
  std::string series_axis;  // optional second axis; one series per value
  std::vector<std::string> series_values;
  bool hold_rate = false;  // sub_blocklength axis scales k with n_hat
  unsigned threads = 0;    // 0 = hardware concurrency
};

struct SweepPointError {
  std::string series_value;
  std::string value;
  int replication = 0;
  std::string message;
};

struct SweepResult {
  std::size_t rows = 0;
  std::vector<SweepPointError> errors;
};

// Axis names accepted by apply_axis / sweep.
const std::vector<std::string>& axis_names();

// Applies one axis value to `cfg` relative to `base` and revalidates.
// Throws ConfigError for invalid points (e.g. n_hat not dividing a pinned n).
void apply_axis(config::ScenarioConfig& cfg, const config::ScenarioConfig& base, std::string_view axis,
                std::string_view value, bool hold_rate);

// Seed used by replication r; shared by every axis value (common random numbers).
std::uint64_t replication_seed(std::uint64_t base_seed, int replication);

// Runs |series| x |values| x replications points, each into its own run
// directory, then writes sweep.csv and errors.csv. Points run concurrently;
// rows are ordered by series, axis value, then replication.
SweepResult sweep(const config::ScenarioConfig& base, const SweepSpec& spec,
                  const std::filesystem::path& out_dir);

}  // namespace stqos::pipeline
