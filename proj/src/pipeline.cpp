#include "stqos/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "json.hpp"
#include "stqos/csv.hpp"
#include "stqos/error.hpp"
#include "stqos/fbc.hpp"

namespace stqos::pipeline {

namespace fs = std::filesystem;

const FitRow* RunSummary::fit(std::string_view metric) const {
  for (const auto& f : fits) {
    if (f.metric == metric) return &f;
  }
  return nullptr;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

FitRow fit_row(std::string metric, std::string units, const std::vector<double>& samples,
               const config::MetricSettings& m, double scale = 1.0) {
  FitRow row{std::move(metric), std::move(units), {}, false};
  row.estimate.n_samples = samples.size();
  if (samples.empty()) return row;
  metrics::FitOptions opt{.prob_lo = m.fit_prob_lo, .prob_hi = m.fit_prob_hi};
  std::vector<double> scaled = samples;
  if (scale != 1.0) {
    for (double& v : scaled) v /= scale;
  }
  try {
    row.estimate = metrics::fit_sample_tail(scaled, static_cast<std::size_t>(m.fit_grid_points), opt);
    row.ok = true;
  } catch (const InsufficientDataError&) {
  }
  return row;
}

FitRow analytic_row(std::string metric, std::string units, double theta, std::int64_t at) {
  FitRow row{std::move(metric), std::move(units), {}, true};
  row.estimate.theta = theta;
  row.estimate.window_lo = static_cast<double>(at);
  row.estimate.window_hi = static_cast<double>(at);
  row.estimate.r_squared = kNaN;
  row.estimate.std_error = 0.0;
  return row;
}

}  // namespace

RunArtifacts execute(const config::ScenarioConfig& cfg) {
  const sim::Scenario& sc = cfg.scenario;
  RunArtifacts art;
  art.trace = sim::simulate(sc);
  art.aoi = sim::aoi_trajectory(art.trace);

  const auto& trace = art.trace;
  RunSummary& s = art.summary;
  s.seed = sc.seed;
  s.updates_generated = trace.updates_generated;
  s.delivered = static_cast<std::int64_t>(trace.deliveries.size());
  s.dropped = static_cast<std::int64_t>(trace.dropped.size());
  s.drop_rate = s.updates_generated > 0
                    ? static_cast<double>(s.dropped) / static_cast<double>(s.updates_generated)
                    : kNaN;

  std::vector<double> totals, queuing, transmission, processing, propagation, service, rounds;
  for (const auto& d : trace.deliveries) {
    totals.push_back(static_cast<double>(d.delay.total()));
    queuing.push_back(static_cast<double>(d.delay.queuing));
    transmission.push_back(static_cast<double>(d.delay.transmission));
    processing.push_back(static_cast<double>(d.delay.processing));
    propagation.push_back(static_cast<double>(d.delay.propagation));
    service.push_back(static_cast<double>(d.service_time()));
    rounds.push_back(static_cast<double>(d.rounds()));
  }
  s.total_delay = metrics::mean_ci95(totals);
  s.mean_queuing = mean_of(queuing);
  s.mean_transmission = mean_of(transmission);
  s.mean_processing = mean_of(processing);
  s.mean_propagation = mean_of(propagation);
  s.mean_service = mean_of(service);
  s.mean_rounds = mean_of(rounds);
  s.mellin_s = cfg.metrics.mellin_s;
  s.mellin_service = service.empty() ? kNaN : metrics::mellin(service, cfg.metrics.mellin_s);

  std::vector<double> queue_lengths;
  for (const auto& q : trace.queue_length_samples) queue_lengths.push_back(static_cast<double>(q.length));
  s.mean_queue_length = mean_of(queue_lengths);

  std::vector<double> peaks(art.aoi.peaks.begin(), art.aoi.peaks.end());
  s.peak_aoi = metrics::mean_ci95(peaks);
  s.time_average_aoi = sim::time_average_age(art.aoi);
  const auto n = sc.harq.coding.blocklength;
  s.aoi_threshold = static_cast<double>(cfg.metrics.aoi_threshold_cu);
  s.peak_aoi_violation = peaks.empty() ? kNaN : metrics::peak_aoi_violation(peaks, s.aoi_threshold, n);
  s.delay_threshold = static_cast<double>(cfg.metrics.delay_threshold_cu);
  s.delay_violation = totals.empty() ? kNaN : metrics::delay_violation(totals, s.delay_threshold);

  // weakest hop at its fading-free SINR
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& hop : trace.path) {
    const channel::LinkParams& link = hop.kind == sim::HopKind::satellite_to_destination ? sc.radio.satellite_direct
                                      : hop.kind == sim::HopKind::satellite_to_gbs       ? sc.radio.satellite_gbs
                                                                                         : sc.radio.terrestrial;
    const double pl = channel::pathloss_db(hop.distance_km, link.carrier_frequency_ghz, link.pathloss);
    worst = std::min(worst, channel::sinr(link, 1.0, pl));
  }
  const auto& coding = sc.harq.coding;
  const std::vector<channel::ChannelState> states(static_cast<std::size_t>(coding.max_rounds),
                                                  channel::channel_state(worst));
  const double eps = fbc::harq_ir_error(states, coding.sub_blocklength, static_cast<double>(coding.payload_bits));
  s.bottleneck_sinr_db = channel::linear_to_db(worst);
  s.theta_error = fbc::exponent_from_error(eps, static_cast<double>(coding.sub_blocklength));
  s.theta_error_full = fbc::exponent_from_error(eps, static_cast<double>(coding.blocklength));

  s.fits.push_back(fit_row("delay", "1/cu", totals, cfg.metrics));
  s.fits.push_back(fit_row("queue_length", "1/update", queue_lengths, cfg.metrics));
  s.fits.push_back(fit_row("peak_aoi", "1/(A_th/n)", peaks, cfg.metrics, static_cast<double>(n)));
  s.fits.push_back(analytic_row("theta_error", "1/n_hat (nats)", s.theta_error, coding.sub_blocklength));
  s.fits.push_back(analytic_row("theta_error_full", "1/n (nats)", s.theta_error_full, coding.blocklength));
  return art;
}

std::string trace_csv(const sim::SimTrace& trace, const sim::AoiTrajectory& aoi) {
  std::string out;
  {
    csv::Row h;
    for (const char* c : kTraceColumns) h.add(c);
    out += h.str();
    out += '\n';
  }
  for (std::size_t j = 0; j < trace.deliveries.size(); ++j) {
    const auto& d = trace.deliveries[j];
    csv::Row r;
    r.add(d.id).add(d.generated_at).add(d.delivered_at).add(d.rounds()).add(d.l0());
    r.add(d.delay.queuing).add(d.delay.transmission).add(d.delay.processing).add(d.delay.propagation);
    r.add(d.delay.total());
    if (j == 0) r.add_empty();
    else r.add(aoi.peaks[j - 1]);
    out += r.str();
    out += '\n';
  }
  return out;
}

std::string aoi_csv(const sim::AoiTrajectory& aoi) {
  std::string out = "time_cu,age_cu,is_peak\n";
  for (const auto& p : aoi.breakpoints) {
    csv::Row r;
    r.add(p.time).add(p.age).add(p.peak ? 1 : 0);
    out += r.str();
    out += '\n';
  }
  return out;
}

std::string fits_csv(const std::vector<FitRow>& fits) {
  std::string out = "metric,theta,theta_units,window_lo,window_hi,r2,stderr,n_samples\n";
  for (const auto& f : fits) {
    csv::Row r;
    r.add(f.metric);
    if (f.ok) {
      r.add(f.estimate.theta).add(f.units).add(f.estimate.window_lo).add(f.estimate.window_hi);
      r.add(f.estimate.r_squared).add(f.estimate.std_error);
    } else {
      r.add(kNaN).add(f.units).add(kNaN).add(kNaN).add(kNaN).add(kNaN);
    }
    r.add(f.estimate.n_samples);
    out += r.str();
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return csv::format_number(v);  // "nan" / "inf" as strings keep the JSON valid
}

}  // namespace

std::string summary_json(const RunSummary& s, const config::ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["time_unit"] = "cu (1 cu = 1e-6 s)";
  j["updates_generated"] = s.updates_generated;
  j["delivered"] = s.delivered;
  j["dropped"] = s.dropped;
  j["drop_rate"] = number(s.drop_rate);
  j["delay"] = {{"mean_total_cu", number(s.total_delay.mean)},
                {"ci95_total_cu", number(s.total_delay.half_width)},
                {"mean_queuing_cu", number(s.mean_queuing)},
                {"mean_transmission_cu", number(s.mean_transmission)},
                {"mean_processing_cu", number(s.mean_processing)},
                {"mean_propagation_cu", number(s.mean_propagation)},
                {"mean_service_cu", number(s.mean_service)},
                {"threshold_cu", number(s.delay_threshold)},
                {"violation_probability", number(s.delay_violation)}};
  j["harq"] = {{"mean_rounds", number(s.mean_rounds)}};
  j["queue"] = {{"mean_length_seen_by_arrivals", number(s.mean_queue_length)}};
  j["aoi"] = {{"mean_peak_cu", number(s.peak_aoi.mean)},
              {"ci95_peak_cu", number(s.peak_aoi.half_width)},
              {"peaks", s.peak_aoi.count},
              {"time_average_cu", number(s.time_average_aoi)},
              {"threshold_cu", number(s.aoi_threshold)},
              {"blocklength", cfg.scenario.harq.coding.blocklength},
              {"violation_probability", number(s.peak_aoi_violation)}};
  j["mellin_service"] = {{"s", number(s.mellin_s)}, {"value", number(s.mellin_service)}};
  j["error_rate"] = {{"bottleneck_sinr_db", number(s.bottleneck_sinr_db)},
                     {"theta_error_per_n_hat", number(s.theta_error)},
                     {"theta_error_per_n", number(s.theta_error_full)}};
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  for (const auto& f : s.fits) {
    fits.push_back({{"metric", f.metric},
                    {"ok", f.ok},
                    {"theta", number(f.ok ? f.estimate.theta : kNaN)},
                    {"theta_units", f.units},
                    {"r2", number(f.ok ? f.estimate.r_squared : kNaN)},
                    {"stderr", number(f.ok ? f.estimate.std_error : kNaN)},
                    {"n_samples", f.estimate.n_samples}});
  }
  j["fits"] = fits;
  j["warnings"] = cfg.warnings;
  return j.dump(2) + "\n";
}

namespace {

constexpr const char* kRunFiles[] = {"trace.csv", "aoi.csv", "fits.csv", "summary.json", "run.log"};

void ensure_fresh_dir(const fs::path& dir, std::span<const char* const> files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
  for (const char* f : files) {
    if (fs::exists(dir / f)) {
      throw std::runtime_error("refusing to overwrite existing " + (dir / f).string());
    }
  }
}

}  // namespace

void write_run(const RunArtifacts& art, const config::ScenarioConfig& cfg, const fs::path& out_dir) {
  ensure_fresh_dir(out_dir, kRunFiles);
  csv::write_file(out_dir / "trace.csv", trace_csv(art.trace, art.aoi));
  csv::write_file(out_dir / "aoi.csv", aoi_csv(art.aoi));
  csv::write_file(out_dir / "fits.csv", fits_csv(art.summary.fits));
  csv::write_file(out_dir / "summary.json", summary_json(art.summary, cfg));
  std::string log = "# resolved configuration\n" + config::render(cfg);
  for (const auto& w : cfg.warnings) log += "# warning: " + w + "\n";
  csv::write_file(out_dir / "run.log", log);
}

RunSummary run(const config::ScenarioConfig& cfg, const fs::path& out_dir) {
  RunArtifacts art = execute(cfg);
  write_run(art, cfg, out_dir);
  return std::move(art.summary);
}

const std::vector<std::string>& axis_names() {
  static const std::vector<std::string> names = {"sub_blocklength", "max_rounds", "gbs_count", "tx_power",
                                                 "aoi_threshold",   "mode",       "variant"};
  return names;
}

void apply_axis(config::ScenarioConfig& cfg, const config::ScenarioConfig& base, std::string_view axis,
                std::string_view value, bool hold_rate) {
  auto& coding = cfg.scenario.harq.coding;
  const auto& base_coding = base.scenario.harq.coding;
  if (axis == "sub_blocklength") {
    config::set_value(cfg, "coding.sub_blocklength", value);
    if (cfg.blocklength_pinned) {
      if (coding.sub_blocklength <= 0 || base_coding.blocklength % coding.sub_blocklength != 0) {
        throw ConfigError("sub_blocklength " + std::string(value) + " does not divide pinned blocklength " +
                          std::to_string(base_coding.blocklength));
      }
      coding.max_rounds = static_cast<int>(base_coding.blocklength / coding.sub_blocklength);
    }
    if (hold_rate) {
      const double rate =
          static_cast<double>(base_coding.payload_bits) / static_cast<double>(base_coding.sub_blocklength);
      coding.payload_bits = std::llround(rate * static_cast<double>(coding.sub_blocklength));
    }
  } else if (axis == "max_rounds") {
    config::set_value(cfg, "coding.max_rounds", value);
    if (cfg.blocklength_pinned) {
      if (coding.max_rounds <= 0 || base_coding.blocklength % coding.max_rounds != 0) {
        throw ConfigError("max_rounds " + std::string(value) + " does not divide pinned blocklength " +
                          std::to_string(base_coding.blocklength));
      }
      coding.sub_blocklength = base_coding.blocklength / coding.max_rounds;
    }
  } else if (axis == "gbs_count") {
    config::set_value(cfg, "topology.gbs_count", value);
  } else if (axis == "tx_power") {
    config::set_value(cfg, "link.satellite_direct.tx_power_dbm", value);
    config::set_value(cfg, "link.satellite_gbs.tx_power_dbm", value);
  } else if (axis == "aoi_threshold") {
    config::set_value(cfg, "metrics.aoi_threshold_cu", value);
  } else if (axis == "mode") {
    config::set_value(cfg, "network.mode", value);
  } else if (axis == "variant") {
    config::set_value(cfg, "harq.variant", value);
  } else {
    throw ConfigError("unknown sweep axis '" + std::string(axis) + "'");
  }
  config::validate(cfg);
}

std::uint64_t replication_seed(std::uint64_t base_seed, int replication) {
  return derive_seed(base_seed, Stream::replication, static_cast<std::uint64_t>(replication));
}

namespace {

bool all_numeric(const std::vector<std::string>& values) {
  return std::all_of(values.begin(), values.end(), [](const std::string& v) { return csv::parse_number(v).has_value(); });
}

std::vector<std::string> ordered_values(std::vector<std::string> values) {
  if (all_numeric(values)) {
    std::stable_sort(values.begin(), values.end(), [](const std::string& a, const std::string& b) {
      return *csv::parse_number(a) < *csv::parse_number(b);
    });
  }
  return values;
}

const std::vector<std::string> kSweepColumns = {
    "axis", "value", "series_axis", "series_value", "rep", "seed", "payload_bits", "sub_blocklength",
    "max_rounds", "blocklength", "gbs_count", "tx_power_dbm", "mode", "variant", "updates", "delivered",
    "dropped", "drop_rate", "mean_total_delay_cu", "ci95_total_delay_cu", "mean_queuing_cu",
    "mean_transmission_cu", "mean_processing_cu", "mean_propagation_cu", "mean_service_cu", "mellin_service",
    "mean_rounds", "mean_peak_aoi_cu", "ci95_peak_aoi_cu", "time_avg_aoi_cu", "aoi_threshold_cu",
    "peak_aoi_violation", "delay_threshold_cu", "delay_violation", "theta_delay", "theta_queue", "theta_aoi",
    "theta_error", "theta_error_full"};

struct PointJob {
  std::size_t series_index = 0;
  std::string series_value;
  std::string value;
  int rep = 0;
  fs::path dir;
  // results
  bool ok = false;
  std::string error;
  std::string row;
};

double fit_theta(const RunSummary& s, std::string_view metric) {
  const FitRow* f = s.fit(metric);
  return f && f->ok ? f->estimate.theta : kNaN;
}

std::string sweep_row(const SweepSpec& spec, const PointJob& job, const config::ScenarioConfig& cfg,
                      const RunSummary& s) {
  const auto& sc = cfg.scenario;
  csv::Row r;
  r.add(spec.axis).add(job.value).add(spec.series_axis).add(job.series_value).add(job.rep);
  r.add(std::to_string(sc.seed));
  r.add(sc.harq.coding.payload_bits).add(sc.harq.coding.sub_blocklength).add(sc.harq.coding.max_rounds);
  r.add(sc.harq.coding.blocklength).add(sc.topology.gbs_count).add(sc.radio.satellite_direct.tx_power_dbm);
  r.add(sc.mode == sim::PathMode::stin ? "stin" : "psn");
  r.add(sc.harq.variant == harq::Variant::fast ? "fast" : "standard");
  r.add(s.updates_generated).add(s.delivered).add(s.dropped).add(s.drop_rate);
  r.add(s.total_delay.mean).add(s.total_delay.half_width);
  r.add(s.mean_queuing).add(s.mean_transmission).add(s.mean_processing).add(s.mean_propagation);
  r.add(s.mean_service).add(s.mellin_service).add(s.mean_rounds);
  r.add(s.peak_aoi.mean).add(s.peak_aoi.half_width).add(s.time_average_aoi);
  r.add(s.aoi_threshold).add(s.peak_aoi_violation).add(s.delay_threshold).add(s.delay_violation);
  r.add(fit_theta(s, "delay")).add(fit_theta(s, "queue_length")).add(fit_theta(s, "peak_aoi"));
  r.add(s.theta_error).add(s.theta_error_full);
  return r.str();
}

}  // namespace

SweepResult sweep(const config::ScenarioConfig& base, const SweepSpec& spec, const fs::path& out_dir) {
  const auto& names = axis_names();
  if (std::find(names.begin(), names.end(), spec.axis) == names.end()) {
    throw ConfigError("unknown sweep axis '" + spec.axis + "'");
  }
  if (!spec.series_axis.empty() && std::find(names.begin(), names.end(), spec.series_axis) == names.end()) {
    throw ConfigError("unknown series axis '" + spec.series_axis + "'");
  }
  if (spec.values.empty()) throw ConfigError("sweep: no axis values given");
  if (spec.replications < 1) throw ConfigError("sweep: replications must be >= 1");
  if (!spec.series_axis.empty() && spec.series_values.empty()) {
    throw ConfigError("sweep: series axis given without series values");
  }

  constexpr const char* kSweepFiles[] = {"sweep.csv", "errors.csv", "sweep.log"};
  ensure_fresh_dir(out_dir, kSweepFiles);

  const auto values = ordered_values(spec.values);
  const std::vector<std::string> series =
      spec.series_axis.empty() ? std::vector<std::string>{""} : ordered_values(spec.series_values);

  std::vector<PointJob> jobs;
  for (std::size_t si = 0; si < series.size(); ++si) {
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
      for (int rep = 0; rep < spec.replications; ++rep) {
        PointJob job;
        job.series_index = si;
        job.series_value = series[si];
        job.value = values[vi];
        job.rep = rep;
        job.dir = out_dir / ("s" + std::to_string(si) + "-v" + std::to_string(vi) + "-r" + std::to_string(rep));
        jobs.push_back(std::move(job));
      }
    }
  }

  auto run_job = [&](PointJob& job) {
    try {
      config::ScenarioConfig cfg = base;
      if (!spec.series_axis.empty()) apply_axis(cfg, base, spec.series_axis, job.series_value, spec.hold_rate);
      const config::ScenarioConfig series_base = cfg;
      apply_axis(cfg, series_base, spec.axis, job.value, spec.hold_rate);
      cfg.scenario.seed = replication_seed(base.scenario.seed, job.rep);
      const RunSummary s = run(cfg, job.dir);
      job.row = sweep_row(spec, job, cfg, s);
      job.ok = true;
    } catch (const ConfigError& e) {
      job.error = e.what();
    }
  };

  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        run_job(jobs[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  std::string table = csv::join_header(kSweepColumns) + "\n";
  std::string errors = "series_value,value,rep,message\n";
  for (const auto& job : jobs) {
    if (job.ok) {
      table += job.row + "\n";
      ++result.rows;
    } else {
      result.errors.push_back({job.series_value, job.value, job.rep, job.error});
      csv::Row r;
      r.add(job.series_value).add(job.value).add(job.rep).add(job.error);
      errors += r.str() + "\n";
    }
  }
  csv::write_file(out_dir / "sweep.csv", table);
  csv::write_file(out_dir / "errors.csv", errors);

  std::string log = "# sweep axis = " + spec.axis + "\n# values =";
  for (const auto& v : values) log += " " + v;
  log += "\n# replications = " + std::to_string(spec.replications) + "\n";
  if (!spec.series_axis.empty()) {
    log += "# series axis = " + spec.series_axis + "\n# series values =";
    for (const auto& v : series) log += " " + v;
    log += "\n";
  }
  log += std::string("# hold = ") + (spec.hold_rate ? "rate" : "payload") + "\n";
  log += "# base configuration\n" + config::render(base);
  csv::write_file(out_dir / "sweep.log", log);
  return result;
}

}  // namespace stqos::pipeline
