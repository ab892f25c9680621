// stqos: run, sweep, report and fit from the command line.
//
// Exit codes: 0 success, 1 configuration/validation error, 2 runtime error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stqos/config.hpp"
#include "stqos/csv.hpp"
#include "stqos/error.hpp"
#include "stqos/metrics.hpp"
#include "stqos/pipeline.hpp"
#include "stqos/report.hpp"

namespace fs = std::filesystem;
using namespace stqos;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr const char* kOutDirEnv = "STQOS_OUT_DIR";

fs::path resolve_out(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  throw ConfigError(std::string("no output directory: pass --out or set ") + kOutDirEnv);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void print_warnings(const config::ScenarioConfig& cfg) {
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Status-update delivery over satellite-terrestrial networks with FBC and (fast) HARQ"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;

  auto* run_cmd = app.add_subcommand("run", "simulate one scenario and write its run directory");
  run_cmd->add_option("--config", config_path, "scenario file")->required();
  run_cmd->add_option("--out", out_dir, std::string("output directory (default $") + kOutDirEnv + ")");

  pipeline::SweepSpec spec;
  std::string values_list;
  std::string series_list;
  std::string hold = "payload";
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_cmd->add_option("--config", config_path, "base scenario file")->required();
  sweep_cmd->add_option("--axis", spec.axis, "sub_blocklength | max_rounds | gbs_count | tx_power | aoi_threshold | mode | variant")
      ->required();
  sweep_cmd->add_option("--values", values_list, "comma-separated axis values")->required();
  sweep_cmd->add_option("--reps", spec.replications, "replications per point")->default_val(1);
  sweep_cmd->add_option("--series", spec.series_axis, "optional second axis, one series per value");
  sweep_cmd->add_option("--series-values", series_list, "comma-separated series values");
  sweep_cmd->add_option("--hold", hold, "payload | rate: what stays fixed on a sub_blocklength axis")
      ->check(CLI::IsMember({"payload", "rate"}));
  sweep_cmd->add_option("--threads", spec.threads, "worker threads (0 = all cores)");
  sweep_cmd->add_option("--out", out_dir, std::string("output directory (default $") + kOutDirEnv + ")");

  std::string in_dir;
  std::string figure;
  auto* report_cmd = app.add_subcommand("report", "derive plot data for fig2 | fig4 | fig5");
  report_cmd->add_option("--in", in_dir, "run or sweep directory")->required();
  report_cmd->add_option("--figure", figure, "fig2 | fig4 | fig5")->required();

  std::string samples_path;
  std::string column;
  int grid = 200;
  double prob_lo = 1e-4;
  double prob_hi = 1e-1;
  auto* fit_cmd = app.add_subcommand("fit", "fit a tail exponent to one CSV column");
  fit_cmd->add_option("--samples", samples_path, "CSV file with a header row")->required();
  fit_cmd->add_option("--column", column, "column to fit")->required();
  fit_cmd->add_option("--grid", grid, "number of thresholds")->default_val(200);
  fit_cmd->add_option("--prob-lo", prob_lo, "lowest tail probability in the window")->default_val(1e-4);
  fit_cmd->add_option("--prob-hi", prob_hi, "highest tail probability in the window")->default_val(1e-1);

  auto* keys_cmd = app.add_subcommand("keys", "list config keys with their defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      auto cfg = config::load(config_path);
      print_warnings(cfg);
      const auto dir = resolve_out(out_dir);
      const auto s = pipeline::run(cfg, dir);
      std::cout << "wrote " << dir.string() << " (" << s.delivered << " delivered, " << s.dropped
                << " dropped)\n";
    } else if (*sweep_cmd) {
      auto cfg = config::load(config_path);
      print_warnings(cfg);
      spec.values = split_list(values_list);
      spec.series_values = split_list(series_list);
      spec.hold_rate = hold == "rate";
      const auto dir = resolve_out(out_dir);
      const auto r = pipeline::sweep(cfg, spec, dir);
      for (const auto& e : r.errors) {
        std::cerr << "point " << spec.axis << "=" << e.value << " rep " << e.replication << ": " << e.message << "\n";
      }
      std::cout << "wrote " << (dir / "sweep.csv").string() << " (" << r.rows << " rows, " << r.errors.size()
                << " point errors)\n";
    } else if (*report_cmd) {
      const auto fig = report::parse_figure(figure);
      for (const auto& p : report::report(in_dir, fig)) std::cout << "wrote " << p.string() << "\n";
    } else if (*fit_cmd) {
      const auto table = csv::read(samples_path);
      const auto samples = table.numeric_column(column);
      if (grid < 4) throw ConfigError("--grid must be >= 4");
      metrics::FitOptions opt{.prob_lo = prob_lo, .prob_hi = prob_hi};
      const auto est = metrics::fit_sample_tail(samples, static_cast<std::size_t>(grid), opt);
      pipeline::FitRow row{column, "1/" + column + "_unit", est, true};
      std::cout << pipeline::fits_csv({row});
    } else if (*keys_cmd) {
      const config::ScenarioConfig defaults;
      for (const auto& k : config::keys()) {
        std::cout << k.name << " = " << config::get_value(defaults, k.name) << "    # " << k.description << "\n";
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
