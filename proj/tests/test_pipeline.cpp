#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "stqos/config.hpp"
#include "stqos/csv.hpp"
#include "stqos/error.hpp"
#include "stqos/metrics.hpp"
#include "stqos/pipeline.hpp"
#include "stqos/report.hpp"

using namespace stqos;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stqos_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

config::ScenarioConfig small_config() {
  auto cfg = config::parse(
      "seed = 11\n"
      "traffic.process = poisson\n"
      "traffic.rate_per_cu = 0.00007\n"
      "horizon_cu = 20000000\n"
      "network.mode = stin\n"
      "link.satellite_gbs.fading = rayleigh\n"
      "link.satellite_gbs.antenna_gain_dbi = 24\n");
  return cfg;
}

}  // namespace

TEST_CASE("run: determinism and internal consistency") {
  const auto cfg = small_config();
  const auto a = scratch("run_a");
  const auto b = scratch("run_b");
  const auto s = pipeline::run(cfg, a);
  pipeline::run(cfg, b);
  for (const char* f : {"trace.csv", "aoi.csv", "fits.csv", "summary.json", "run.log"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
  CHECK_THROWS(pipeline::run(cfg, a));

  const auto trace = csv::read(a / "trace.csv");
  std::vector<std::string> expected(std::begin(pipeline::kTraceColumns), std::end(pipeline::kTraceColumns));
  CHECK(trace.header == expected);
  const auto totals = trace.numeric_column("total_cu");
  REQUIRE(totals.size() == static_cast<std::size_t>(s.delivered));
  double sum = 0;
  for (double v : totals) sum += v;
  CHECK(std::fabs(sum / static_cast<double>(totals.size()) - s.total_delay.mean) <= 1e-9 * s.total_delay.mean);

  const auto q = trace.numeric_column("queuing_cu");
  const auto tx = trace.numeric_column("transmission_cu");
  const auto pr = trace.numeric_column("processing_cu");
  const auto pg = trace.numeric_column("propagation_cu");
  for (std::size_t i = 0; i < totals.size(); ++i) CHECK(totals[i] == q[i] + tx[i] + pr[i] + pg[i]);

  const auto aoi = csv::read(a / "aoi.csv");
  std::vector<double> peaks;
  const auto ages = aoi.numeric_column("age_cu");
  const auto flags = aoi.numeric_column("is_peak");
  for (std::size_t i = 0; i < ages.size(); ++i) {
    if (flags[i] != 0.0) peaks.push_back(ages[i]);
  }
  const double recomputed = metrics::peak_aoi_violation(peaks, static_cast<double>(cfg.metrics.aoi_threshold_cu),
                                                        cfg.scenario.harq.coding.blocklength);
  CHECK(recomputed == s.peak_aoi_violation);

  const auto j = nlohmann::json::parse(slurp(a / "summary.json"));
  CHECK(j["delivered"].get<std::int64_t>() == s.delivered);
  CHECK(j["aoi"]["violation_probability"].get<double>() == s.peak_aoi_violation);

  const auto fits = csv::read(a / "fits.csv");
  CHECK(fits.header ==
        std::vector<std::string>{"metric", "theta", "theta_units", "window_lo", "window_hi", "r2", "stderr",
                                 "n_samples"});
  CHECK(fits.rows.size() == 5);
  CHECK(slurp(a / "run.log").find("seed = 11") != std::string::npos);
}

TEST_CASE("sweep: row count, errors and ordering") {
  auto cfg = config::parse("horizon_cu = 2000000\ncoding.blocklength = 2000\ncoding.sub_blocklength = 500\n");
  pipeline::SweepSpec spec;
  spec.axis = "sub_blocklength";
  spec.values = {"1000", "300", "250", "500"};
  spec.replications = 2;
  spec.threads = 2;
  const auto dir = scratch("sweep");
  const auto res = pipeline::sweep(cfg, spec, dir);
  CHECK(res.rows == 4 * 2 - 2);
  REQUIRE(res.errors.size() == 2);
  CHECK(res.errors[0].value == "300");

  const auto t = csv::read(dir / "sweep.csv");
  CHECK(t.rows.size() == res.rows);
  const auto v = t.numeric_column("value");
  const auto rep = t.numeric_column("rep");
  for (std::size_t i = 1; i < v.size(); ++i) {
    CHECK((v[i] > v[i - 1] || (v[i] == v[i - 1] && rep[i] > rep[i - 1])));
  }
  const auto seeds = t.column("seed");
  CHECK(t.rows[0][seeds] == t.rows[2][seeds]);
  CHECK(t.rows[0][seeds] != t.rows[1][seeds]);
  CHECK(csv::read(dir / "errors.csv").rows.size() == 2);
  for (double n : t.numeric_column("blocklength")) CHECK(n == 2000);

  CHECK_THROWS_AS(pipeline::sweep(cfg, {.axis = "colour", .values = {"1"}}, scratch("bad_axis")), ConfigError);
}

TEST_CASE("report: fig5 series and byte-stable output") {
  auto cfg = config::parse(
      "horizon_cu = 400000\nnetwork.mode = psn\nlink.satellite_direct.tx_power_dbm = 19\n"
      "coding.payload_bits = 300\n");
  pipeline::SweepSpec spec;
  spec.axis = "sub_blocklength";
  spec.values = {"200", "400", "600", "800"};
  spec.series_axis = "max_rounds";
  spec.series_values = {"4", "1", "2"};
  spec.hold_rate = true;
  const auto dir = scratch("fig5");
  pipeline::sweep(cfg, spec, dir);

  const auto pd = report::derive(dir, report::Figure::fig5);
  CHECK(pd.series_order == std::vector<std::string>{"L=1", "L=2", "L=4"});
  for (const auto& series : pd.series_order) {
    double prev = INFINITY;
    for (const auto& p : pd.points) {
      if (p.series != series) continue;
      CHECK(std::isfinite(p.y));
      CHECK(p.y < prev);
      prev = p.y;
    }
  }
  const auto files = report::report(dir, report::Figure::fig5);
  REQUIRE(files.size() == 2);
  const std::string csv1 = slurp(files[0]);
  const std::string svg1 = slurp(files[1]);
  report::report(dir, report::Figure::fig5);
  CHECK(slurp(files[0]) == csv1);
  CHECK(slurp(files[1]) == svg1);
  CHECK(csv1.rfind("x,y,series\n", 0) == 0);
  CHECK(svg1.find("<svg") != std::string::npos);
}

TEST_CASE("report: fig4 threshold sweep is non-increasing") {
  auto cfg = small_config();
  pipeline::SweepSpec spec;
  spec.axis = "aoi_threshold";
  spec.values = {"20000", "30000", "45000", "60000", "90000"};
  const auto dir = scratch("fig4");
  pipeline::sweep(cfg, spec, dir);
  const auto pd = report::derive(dir, report::Figure::fig4);
  REQUIRE(pd.points.size() == 5);
  for (std::size_t i = 1; i < pd.points.size(); ++i) CHECK(pd.points[i].y <= pd.points[i - 1].y);
  CHECK(pd.points[0].x == doctest::Approx(0.02));
}

TEST_CASE("report: schema errors name what is missing") {
  const auto dir = scratch("schema");
  fs::create_directories(dir);
  csv::write_file(dir / "trace.csv", "id,rounds\n1,2\n");
  try {
    report::derive(dir, report::Figure::fig2);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("total_cu") != std::string::npos);
  }
  CHECK_THROWS_AS(report::derive(dir, report::Figure::fig5), SchemaError);
  CHECK_THROWS_AS(report::parse_figure("fig3"), ConfigError);
}

TEST_CASE("csv formatting is locale independent") {
  CHECK(csv::format_number(0.1) == "0.1");
  CHECK(csv::format_number(1234567.0) == "1234567");
  CHECK(csv::format_number(std::int64_t{-42}) == "-42");
  CHECK(csv::format_number(NAN) == "nan");
  CHECK(csv::format_number(INFINITY) == "inf");
  csv::Row r;
  r.add("a,b").add(1.5).add_empty();
  CHECK(r.str() == "\"a,b\",1.5,");
  const auto t = csv::parse("x,y\n\"q,1\",2\n");
  CHECK(t.rows[0][0] == "q,1");
  CHECK_THROWS_AS(t.column("z"), SchemaError);
}
