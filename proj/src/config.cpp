#include "stqos/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "stqos/csv.hpp"
#include "stqos/error.hpp"

namespace stqos::config {

namespace {

using channel::FadingKind;
using channel::LinkParams;
using channel::PathlossKind;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
                    std::string(expected) + ")");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, v, "a finite number");
  }
  return out;
}

std::int64_t to_int(std::string_view key, std::string_view v) {
  std::int64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    // accept integral values written in floating form, e.g. 1e7
    const double d = to_double(key, v);
    if (d != std::trunc(d) || std::fabs(d) > 9.0e18) bad_value(key, v, "an integer");
    return static_cast<std::int64_t>(d);
  }
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) bad_value(key, v, "an unsigned 64-bit integer");
  return out;
}

std::string num(double v) { return csv::format_number(v); }
std::string num(std::int64_t v) { return csv::format_number(v); }

struct Entry {
  std::string name;
  std::string description;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <typename Field>
Entry double_entry(std::string name, std::string desc, Field field) {
  return {name, std::move(desc),
          [field, name](ScenarioConfig& c, std::string_view v) { field(c) = to_double(name, v); },
          [field](const ScenarioConfig& c) { return num(field(const_cast<ScenarioConfig&>(c))); }};
}

template <typename Field>
Entry int_entry(std::string name, std::string desc, Field field) {
  return {name, std::move(desc),
          [field, name](ScenarioConfig& c, std::string_view v) {
            using T = std::remove_reference_t<decltype(field(c))>;
            field(c) = static_cast<T>(to_int(name, v));
          },
          [field](const ScenarioConfig& c) {
            return num(static_cast<std::int64_t>(field(const_cast<ScenarioConfig&>(c))));
          }};
}

std::string pathloss_name(PathlossKind k) { return k == PathlossKind::free_space ? "free_space" : "log_distance"; }

std::string fading_name(FadingKind k) {
  switch (k) {
    case FadingKind::none: return "none";
    case FadingKind::rayleigh: return "rayleigh";
    case FadingKind::rician: return "rician";
    case FadingKind::shadowed_rician: return "shadowed_rician";
  }
  return "none";
}

void add_link_entries(std::vector<Entry>& out, const std::string& link_name,
                      LinkParams& (*pick)(ScenarioConfig&)) {
  const std::string p = "link." + link_name + ".";
  out.push_back(double_entry(p + "tx_power_dbm", "transmit power (dBm)",
                             [pick](ScenarioConfig& c) -> double& { return pick(c).tx_power_dbm; }));
  out.push_back(double_entry(p + "antenna_gain_dbi", "combined antenna gain (dBi)",
                             [pick](ScenarioConfig& c) -> double& { return pick(c).antenna_gain_dbi; }));
  out.push_back(double_entry(p + "noise_power_dbm", "receiver noise power (dBm)",
                             [pick](ScenarioConfig& c) -> double& { return pick(c).noise_power_dbm; }));
  out.push_back(double_entry(p + "carrier_frequency_ghz", "carrier frequency (GHz)",
                             [pick](ScenarioConfig& c) -> double& { return pick(c).carrier_frequency_ghz; }));
  const std::string pl = p + "pathloss";
  out.push_back({pl, "free_space | log_distance",
                 [pick, pl](ScenarioConfig& c, std::string_view v) {
                   if (v == "free_space") pick(c).pathloss.kind = PathlossKind::free_space;
                   else if (v == "log_distance") pick(c).pathloss.kind = PathlossKind::log_distance;
                   else bad_value(pl, v, "free_space or log_distance");
                 },
                 [pick](const ScenarioConfig& c) {
                   return pathloss_name(pick(const_cast<ScenarioConfig&>(c)).pathloss.kind);
                 }});
  out.push_back(double_entry(p + "pathloss_exponent", "log-distance exponent (> 2)",
                             [pick](ScenarioConfig& c) -> double& { return pick(c).pathloss.exponent; }));
  out.push_back(double_entry(p + "pathloss_reference_km", "log-distance reference distance (km)",
                             [pick](ScenarioConfig& c) -> double& { return pick(c).pathloss.reference_distance_km; }));
  const std::string ref = p + "pathloss_reference_db";
  out.push_back({ref, "log-distance loss at the reference distance (dB), or auto for free-space",
                 [pick, ref](ScenarioConfig& c, std::string_view v) {
                   if (v == "auto") pick(c).pathloss.reference_loss_db.reset();
                   else pick(c).pathloss.reference_loss_db = to_double(ref, v);
                 },
                 [pick](const ScenarioConfig& c) {
                   const auto& r = pick(const_cast<ScenarioConfig&>(c)).pathloss.reference_loss_db;
                   return r ? num(*r) : std::string("auto");
                 }});
  const std::string fd = p + "fading";
  out.push_back({fd, "none | rayleigh | rician | shadowed_rician",
                 [pick, fd](ScenarioConfig& c, std::string_view v) {
                   auto& k = pick(c).fading.kind;
                   if (v == "none") k = FadingKind::none;
                   else if (v == "rayleigh") k = FadingKind::rayleigh;
                   else if (v == "rician") k = FadingKind::rician;
                   else if (v == "shadowed_rician") k = FadingKind::shadowed_rician;
                   else bad_value(fd, v, "none, rayleigh, rician or shadowed_rician");
                 },
                 [pick](const ScenarioConfig& c) { return fading_name(pick(const_cast<ScenarioConfig&>(c)).fading.kind); }});
  out.push_back(double_entry(p + "rician_k", "Rician K factor (linear)",
                             [pick](ScenarioConfig& c) -> double& { return pick(c).fading.rician_k; }));
  out.push_back(double_entry(p + "sr_b", "shadowed-Rician scatter half-power b",
                             [pick](ScenarioConfig& c) -> double& { return pick(c).fading.sr_b; }));
  out.push_back(double_entry(p + "sr_m", "shadowed-Rician Nakagami m",
                             [pick](ScenarioConfig& c) -> double& { return pick(c).fading.sr_m; }));
  out.push_back(double_entry(p + "sr_omega", "shadowed-Rician LoS power omega",
                             [pick](ScenarioConfig& c) -> double& { return pick(c).fading.sr_omega; }));
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back({"seed", "64-bit base seed",
                 [](ScenarioConfig& c, std::string_view v) { c.scenario.seed = to_uint("seed", v); },
                 [](const ScenarioConfig& c) { return std::to_string(c.scenario.seed); }});
    t.push_back(int_entry("horizon_cu", "generation horizon (cu)",
                          [](ScenarioConfig& c) -> std::int64_t& { return c.scenario.horizon_cu; }));

    t.push_back({"traffic.process", "periodic | poisson | bernoulli",
                 [](ScenarioConfig& c, std::string_view v) {
                   auto& k = c.scenario.traffic.kind;
                   if (v == "periodic") k = sim::TrafficKind::periodic;
                   else if (v == "poisson") k = sim::TrafficKind::poisson;
                   else if (v == "bernoulli") k = sim::TrafficKind::bernoulli;
                   else bad_value("traffic.process", v, "periodic, poisson or bernoulli");
                 },
                 [](const ScenarioConfig& c) -> std::string {
                   switch (c.scenario.traffic.kind) {
                     case sim::TrafficKind::periodic: return "periodic";
                     case sim::TrafficKind::poisson: return "poisson";
                     case sim::TrafficKind::bernoulli: return "bernoulli";
                   }
                   return "periodic";
                 }});
    t.push_back(int_entry("traffic.period_cu", "periodic generation interval (cu)",
                          [](ScenarioConfig& c) -> std::int64_t& { return c.scenario.traffic.period_cu; }));
    t.push_back(double_entry("traffic.rate_per_cu", "Poisson arrival rate (per cu)",
                             [](ScenarioConfig& c) -> double& { return c.scenario.traffic.rate_per_cu; }));
    t.push_back(double_entry("traffic.probability", "Bernoulli arrival probability per slot",
                             [](ScenarioConfig& c) -> double& { return c.scenario.traffic.probability; }));
    t.push_back(int_entry("traffic.slot_cu", "Bernoulli slot length (cu)",
                          [](ScenarioConfig& c) -> std::int64_t& { return c.scenario.traffic.slot_cu; }));

    t.push_back(int_entry("coding.payload_bits", "status-update payload k (bits)",
                          [](ScenarioConfig& c) -> std::int64_t& { return c.scenario.harq.coding.payload_bits; }));
    t.push_back({"coding.blocklength", "full blocklength n = L * n_hat (cu); derived when omitted",
                 [](ScenarioConfig& c, std::string_view v) {
                   c.scenario.harq.coding.blocklength = to_int("coding.blocklength", v);
                   c.blocklength_pinned = true;
                 },
                 [](const ScenarioConfig& c) { return num(c.scenario.harq.coding.blocklength); }});
    t.push_back(int_entry("coding.sub_blocklength", "sub-codeword length n_hat (cu)",
                          [](ScenarioConfig& c) -> std::int64_t& { return c.scenario.harq.coding.sub_blocklength; }));
    t.push_back(int_entry("coding.max_rounds", "maximum HARQ rounds L",
                          [](ScenarioConfig& c) -> int& { return c.scenario.harq.coding.max_rounds; }));

    t.push_back({"harq.variant", "standard | fast",
                 [](ScenarioConfig& c, std::string_view v) {
                   if (v == "standard") c.scenario.harq.variant = harq::Variant::standard;
                   else if (v == "fast") c.scenario.harq.variant = harq::Variant::fast;
                   else bad_value("harq.variant", v, "standard or fast");
                 },
                 [](const ScenarioConfig& c) {
                   return std::string(c.scenario.harq.variant == harq::Variant::fast ? "fast" : "standard");
                 }});
    t.push_back(double_entry("harq.l0_margin", "fast-HARQ l0 safety margin",
                             [](ScenarioConfig& c) -> double& { return c.scenario.harq.l0_margin; }));
    t.push_back(int_entry("harq.processing_delay_cu", "processing delay per decode attempt (cu)",
                          [](ScenarioConfig& c) -> std::int64_t& { return c.scenario.harq.processing_delay_cu; }));

    t.push_back(double_entry("topology.satellite_altitude_km", "satellite altitude (km)",
                             [](ScenarioConfig& c) -> double& { return c.scenario.topology.satellite_altitude_km; }));
    t.push_back(int_entry("topology.gbs_count", "number of ground base stations K_G",
                          [](ScenarioConfig& c) -> int& { return c.scenario.topology.gbs_count; }));
    t.push_back(double_entry("topology.inner_radius_km", "annulus inner radius R_in (km)",
                             [](ScenarioConfig& c) -> double& { return c.scenario.topology.inner_radius_km; }));
    t.push_back(double_entry("topology.outer_radius_km", "annulus outer radius R_out (km)",
                             [](ScenarioConfig& c) -> double& { return c.scenario.topology.outer_radius_km; }));

    t.push_back({"network.mode", "stin | psn",
                 [](ScenarioConfig& c, std::string_view v) {
                   if (v == "stin") c.scenario.mode = sim::PathMode::stin;
                   else if (v == "psn") c.scenario.mode = sim::PathMode::psn;
                   else bad_value("network.mode", v, "stin or psn");
                 },
                 [](const ScenarioConfig& c) {
                   return std::string(c.scenario.mode == sim::PathMode::stin ? "stin" : "psn");
                 }});
    t.push_back(double_entry("interference.activity", "per-round activity probability of non-serving GBSs",
                             [](ScenarioConfig& c) -> double& { return c.scenario.radio.interferer_activity; }));

    add_link_entries(t, "satellite_direct",
                     [](ScenarioConfig& c) -> LinkParams& { return c.scenario.radio.satellite_direct; });
    add_link_entries(t, "satellite_gbs",
                     [](ScenarioConfig& c) -> LinkParams& { return c.scenario.radio.satellite_gbs; });
    add_link_entries(t, "terrestrial",
                     [](ScenarioConfig& c) -> LinkParams& { return c.scenario.radio.terrestrial; });

    t.push_back(int_entry("metrics.aoi_threshold_cu", "peak-AoI violation threshold A_th (cu)",
                          [](ScenarioConfig& c) -> std::int64_t& { return c.metrics.aoi_threshold_cu; }));
    t.push_back(int_entry("metrics.delay_threshold_cu", "end-to-end delay violation threshold (cu)",
                          [](ScenarioConfig& c) -> std::int64_t& { return c.metrics.delay_threshold_cu; }));
    t.push_back(double_entry("metrics.fit_prob_lo", "lowest tail probability used by exponent fits",
                             [](ScenarioConfig& c) -> double& { return c.metrics.fit_prob_lo; }));
    t.push_back(double_entry("metrics.fit_prob_hi", "highest tail probability used by exponent fits",
                             [](ScenarioConfig& c) -> double& { return c.metrics.fit_prob_hi; }));
    t.push_back(int_entry("metrics.fit_grid_points", "thresholds per tail fit",
                          [](ScenarioConfig& c) -> int& { return c.metrics.fit_grid_points; }));
    t.push_back(double_entry("metrics.mellin_s", "Mellin transform order s",
                             [](ScenarioConfig& c) -> double& { return c.metrics.mellin_s; }));
    return t;
  }();
  return table;
}

const Entry* find_entry(std::string_view key) {
  for (const auto& e : entries()) {
    if (e.name == key) return &e;
  }
  return nullptr;
}

void check_satellite_power(const LinkParams& link, const std::string& name, std::vector<std::string>& warnings) {
  if (link.tx_power_dbm < 10.0 || link.tx_power_dbm > 50.0) {
    warnings.push_back("link." + name + ".tx_power_dbm = " + num(link.tx_power_dbm) +
                       " dBm lies outside the usual [10, 50] dBm satellite range");
  }
}

}  // namespace

sim::Scenario ScenarioConfig::default_scenario() {
  sim::Scenario s;
  s.traffic = sim::TrafficProcess::periodic(20000);
  s.harq.variant = harq::Variant::standard;
  s.harq.coding = fbc::CodingConfig::from_split(1000, 500, 4);
  s.harq.processing_delay_cu = 100;
  s.harq.l0_margin = 0.1;
  s.topology = {.satellite_altitude_km = 600.0, .gbs_count = 10, .inner_radius_km = 2.0, .outer_radius_km = 10.0};
  s.mode = sim::PathMode::stin;
  s.horizon_cu = 10'000'000;
  s.seed = 1;

  auto& r = s.radio;
  r.satellite_direct = {.tx_power_dbm = 30.0,
                        .antenna_gain_dbi = 20.0,
                        .noise_power_dbm = -110.0,
                        .carrier_frequency_ghz = 2.0,
                        .pathloss = {},
                        .fading = channel::FadingModel::rician(10.0)};
  // satellite dish plus a 20 dBi GBS receive antenna
  r.satellite_gbs = r.satellite_direct;
  r.satellite_gbs.antenna_gain_dbi = 40.0;
  r.terrestrial = {.tx_power_dbm = 30.0,
                   .antenna_gain_dbi = 10.0,
                   .noise_power_dbm = -110.0,
                   .carrier_frequency_ghz = 2.0,
                   .pathloss = {.kind = PathlossKind::log_distance, .exponent = 3.0, .reference_distance_km = 0.1, .reference_loss_db = std::nullopt},
                   .fading = channel::FadingModel::rayleigh()};
  r.interferer_activity = 0.0;
  return s;
}

const std::vector<KeyInfo>& keys() {
  static const std::vector<KeyInfo> k = [] {
    std::vector<KeyInfo> out;
    for (const auto& e : entries()) out.push_back({e.name, e.description});
    return out;
  }();
  return k;
}

void set_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  const Entry* e = find_entry(key);
  if (!e) throw ConfigError("unknown key '" + std::string(key) + "'");
  e->set(cfg, trim(value));
}

std::string get_value(const ScenarioConfig& cfg, std::string_view key) {
  const Entry* e = find_entry(key);
  if (!e) throw ConfigError("unknown key '" + std::string(key) + "'");
  return e->get(cfg);
}

void validate(ScenarioConfig& cfg) {
  auto& coding = cfg.scenario.harq.coding;
  if (!cfg.blocklength_pinned) coding.blocklength = coding.sub_blocklength * coding.max_rounds;
  cfg.scenario.validate();

  const auto& m = cfg.metrics;
  if (m.aoi_threshold_cu < 0) throw ConfigError("metrics: aoi threshold must be >= 0");
  if (m.delay_threshold_cu < 0) throw ConfigError("metrics: delay threshold must be >= 0");
  if (!(m.fit_prob_lo > 0.0 && m.fit_prob_lo < m.fit_prob_hi && m.fit_prob_hi <= 1.0)) {
    throw ConfigError("metrics: fit window must satisfy 0 < fit_prob_lo < fit_prob_hi <= 1");
  }
  if (m.fit_grid_points < 4) {
    throw ConfigError("metrics: fit_grid_points must be >= 4");
  }

  cfg.warnings.clear();
  check_satellite_power(cfg.scenario.radio.satellite_direct, "satellite_direct", cfg.warnings);
  check_satellite_power(cfg.scenario.radio.satellite_gbs, "satellite_gbs", cfg.warnings);
}

ScenarioConfig parse(std::string_view text, std::string_view source) {
  ScenarioConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  const std::string src(source);
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(src, line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(src, line_no, "missing key before '='");
    if (value.empty()) throw ParseError(src, line_no, "missing value for '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      throw ParseError(src, line_no, "duplicate key '" + std::string(key) + "'");
    }
    try {
      set_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ParseError(src, line_no, e.what());
    }
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string render(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& e : entries()) {
    if (e.name == "coding.blocklength" && !cfg.blocklength_pinned) {
      out += "# coding.blocklength = " + e.get(cfg) + " (derived from max_rounds * sub_blocklength)\n";
      continue;
    }
    out += e.name;
    out += " = ";
    out += e.get(cfg);
    out += '\n';
  }
  return out;
}

}  // namespace stqos::config
