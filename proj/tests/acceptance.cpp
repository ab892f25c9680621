// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "stqos/channel.hpp"
#include "stqos/config.hpp"
#include "stqos/fbc.hpp"
#include "stqos/harq.hpp"
#include "stqos/metrics.hpp"
#include "stqos/pipeline.hpp"
#include "stqos/random.hpp"
#include "stqos/sim.hpp"

using namespace stqos;

namespace {

int failures = 0;

void verdict(const char* id, bool pass, const std::string& detail) {
  std::printf("%s %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

pipeline::RunSummary run_summary(config::ScenarioConfig c) {
  config::validate(c);
  return pipeline::execute(c).summary;
}

// PSN link over the default direct budget, one update every `period` cu, 1e4 updates.
config::ScenarioConfig periodic_psn(std::int64_t k, std::int64_t n_hat, int L, std::int64_t period) {
  config::ScenarioConfig c;
  c.scenario.mode = sim::PathMode::psn;
  c.scenario.harq.coding = fbc::CodingConfig::from_split(k, n_hat, L);
  c.scenario.traffic = sim::TrafficProcess::periodic(period);
  c.scenario.horizon_cu = period * 10000;
  return c;
}

void ac1() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (double rate : {0.1, 0.5, 2.0}) {
    Rng rng(derive_seed(101, 0, static_cast<std::uint64_t>(rate * 10)));
    std::exponential_distribution<double> exp(rate);
    std::vector<double> xs(1'000'000);
    for (auto& x : xs) x = exp(rng);
    const auto est = metrics::fit_sample_tail(xs);
    const double rel = std::fabs(est.theta / rate - 1.0);
    ok = ok && rel <= 0.05 && est.r_squared >= 0.99;
    detail += fmt("theta*=%.1f fit=%.4f r2=%.5f; ", rate, est.theta, est.r_squared);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  verdict("AC-1", ok && secs < 10.0, detail + fmt("%.2f s", secs));
}

void ac2() {
  double worst = 0.0;
  bool monotone = true;
  int points = 0;
  for (std::int64_t n : {100, 400, 1600, 3200}) {
    for (double g : {0.2, 0.8, 2.0, 5.0, 20.0}) {
      ++points;
      const auto s = channel::channel_state(g);
      const double k = 0.9 * s.capacity * static_cast<double>(n);
      const double e = fbc::decoding_error(n, k, s);
      worst = std::max(worst, std::fabs(e - oracle::fbc_error(n, k, g)));

      monotone = monotone && fbc::decoding_error(n, k + 5.0, s) >= e;
      monotone = monotone && fbc::decoding_error(n, k, channel::channel_state(g * 1.1)) <= e;
      for (double r : {0.5, 0.7, 0.9}) {
        double prev = 2.0;
        for (std::int64_t m = 100; m <= 3200; m += 100) {
          const double em = fbc::decoding_error(m, r * s.capacity * static_cast<double>(m), s);
          monotone = monotone && (prev > 0.0 ? em < prev : em == 0.0);
          prev = em;
        }
      }
    }
  }
  verdict("AC-2", points == 20 && worst <= 1e-9 && monotone,
          fmt("%d points, max |error - oracle| = %.3g, monotone in k/sinr/n: %s", points, worst,
              monotone ? "yes" : "no"));
}

void ac3() {
  const std::vector<std::int64_t> grid{100, 200, 300, 500, 800, 1200, 2000, 3000, 5000, 8000};
  std::vector<double> means;
  for (auto nh : grid) means.push_back(run_summary(periodic_psn(2000, nh, 8, 100000)).total_delay.mean);
  const auto best = static_cast<std::size_t>(std::min_element(means.begin(), means.end()) - means.begin());
  verdict("AC-3a", best > 0 && best + 1 < grid.size(),
          fmt("n_hat sweep, k=2000, L=8: minimum %.0f cu at n_hat=%lld (grid %lld..%lld)", means[best],
              static_cast<long long>(grid[best]), static_cast<long long>(grid.front()),
              static_cast<long long>(grid.back())));

  bool ok = true;
  std::string detail = "k=1000 n_hat=250 rayleigh:";
  metrics::MeanCi prev{};
  for (int L : {1, 2, 4, 8}) {
    auto c = periodic_psn(1000, 250, L, 100000);
    c.scenario.radio.satellite_direct.fading = channel::FadingModel::rayleigh();
    const auto ci = run_summary(c).total_delay;
    if (L > 1) ok = ok && ci.mean - ci.half_width > prev.mean + prev.half_width;
    detail += fmt(" L=%d %.0f+-%.0f", L, ci.mean, ci.half_width);
    prev = ci;
  }
  verdict("AC-3b", ok, detail);
}

void ac4() {
  const std::vector<std::int64_t> grid{1000, 1500, 2000, 2500, 3000, 4000};
  std::vector<double> viol;
  pipeline::RunArtifacts first;
  for (auto nh : grid) {
    auto c = periodic_psn(500, nh, 1, 20000);
    c.scenario.traffic = sim::TrafficProcess::poisson(1.0 / 20000);
    c.metrics.aoi_threshold_cu = 40000;
    config::validate(c);
    auto art = pipeline::execute(c);
    viol.push_back(art.summary.peak_aoi_violation);
    if (nh == grid.front()) first = std::move(art);
  }
  bool ok = true;
  std::string detail = "A_th=40000:";
  for (std::size_t i = 0; i < viol.size(); ++i) {
    if (i > 0) ok = ok && viol[i] >= viol[i - 1];
    detail += fmt(" %.4f", viol[i]);
  }
  verdict("AC-4a", ok, detail);

  ok = true;
  detail.clear();
  for (int g : {1, 2, 5, 10, 20, 50}) {
    metrics::MeanCi by_mode[2];
    for (auto m : {sim::PathMode::stin, sim::PathMode::psn}) {
      config::ScenarioConfig c;
      c.scenario.mode = m;
      c.scenario.topology.gbs_count = g;
      c.scenario.traffic = sim::TrafficProcess::periodic(20000);
      c.scenario.horizon_cu = 20000LL * 10000;
      by_mode[m == sim::PathMode::psn] = run_summary(c).peak_aoi;
    }
    ok = ok && by_mode[0].mean + by_mode[0].half_width < by_mode[1].mean - by_mode[1].half_width;
    detail += fmt("K_G=%d %.0f<%.0f ", g, by_mode[0].mean, by_mode[1].mean);
  }
  verdict("AC-4b", ok, detail);

  const std::int64_t n = grid.front();  // L = 1, so n = n_hat
  std::vector<double> peaks(first.aoi.peaks.begin(), first.aoi.peaks.end());
  const auto fit = metrics::fit_peak_aoi_exponent(peaks, n);
  ok = fit.valid();
  detail = fmt("theta_AoI=%.4f:", fit.theta);
  double prev_model = 2.0, prev_emp = 2.0;
  for (double th : {20000.0, 30000.0, 40000.0, 60000.0, 80000.0}) {
    const double model = metrics::peak_aoi_violation_model(th, n, fit.theta);
    const double emp = metrics::peak_aoi_violation(peaks, th, n);
    ok = ok && model <= prev_model && emp <= prev_emp;
    prev_model = model;
    prev_emp = emp;
    detail += fmt(" %.0f->%.4f/%.4f", th, model, emp);
  }
  verdict("AC-4c", ok, detail);
}

void ac5() {
  const std::vector<std::int64_t> grid{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  const auto s = channel::channel_state(0.5);
  const auto rule = fbc::fixed_rate(0.8 * s.capacity);
  std::vector<std::vector<fbc::ExponentPoint>> curves;
  bool ok = true;
  for (int L : {1, 2, 4}) {
    curves.push_back(fbc::theta_error_curve(grid, rule, s, L));
    const auto& c = curves.back();
    for (std::size_t i = 1; i < c.size(); ++i) ok = ok && c[i].theta < c[i - 1].theta;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ok = ok && curves[1][i].theta > curves[0][i].theta && curves[2][i].theta > curves[1][i].theta;
  }
  verdict("AC-5", ok,
          fmt("sinr 0.5, rate 0.8C: theta at n_hat=100 L=1/2/4 %.4g/%.4g/%.4g, at 1000 %.4g/%.4g/%.4g",
              curves[0][0].theta, curves[1][0].theta, curves[2][0].theta, curves[0][9].theta,
              curves[1][9].theta, curves[2][9].theta));
}

void ac6() {
  bool ok = true;
  std::string detail = "s=2:";
  double prev = INFINITY;
  for (double p : {21.0, 22.0, 24.0, 26.0, 28.0, 30.0, 32.0}) {
    config::ScenarioConfig c;
    c.scenario.mode = sim::PathMode::psn;
    c.scenario.radio.satellite_direct.tx_power_dbm = p;
    c.scenario.traffic = sim::TrafficProcess::periodic(50000);
    c.scenario.horizon_cu = 50000LL * 10000;
    const double m = run_summary(c).mellin_service;
    ok = ok && m < prev;
    prev = m;
    detail += fmt(" %gdBm->%.0f", p, m);
  }
  verdict("AC-6", ok, detail);
}

sim::Scenario certain_psn() {
  sim::Scenario sc;
  sc.harq.coding = fbc::CodingConfig::from_split(50, 200, 1);
  sc.harq.processing_delay_cu = 100;
  for (auto* l : {&sc.radio.satellite_direct, &sc.radio.satellite_gbs}) {
    l->tx_power_dbm = 50;
    l->fading = channel::FadingModel::none();
  }
  sc.mode = sim::PathMode::psn;
  return sc;
}

void ac7() {
  bool ok = true;
  std::string detail;
  for (double rho : {0.3, 0.7}) {
    sim::Scenario sc = certain_psn();
    const double s = 200 + 100 + 2.0 * static_cast<double>(sim::propagation_delay_cu(sc.topology.satellite_altitude_km));
    const double lambda = rho / s;
    sc.traffic = sim::TrafficProcess::poisson(lambda);
    sc.horizon_cu = static_cast<std::int64_t>(1e5 / lambda);
    const auto t = sim::simulate(sc);
    double wait = 0.0;
    bool single = t.dropped.empty();
    for (const auto& d : t.deliveries) {
      wait += static_cast<double>(d.delay.queuing);
      single = single && d.rounds() == 1 && static_cast<double>(d.service_time()) == s;
    }
    wait /= static_cast<double>(t.deliveries.size());
    const double expect = oracle::md1_wait(lambda, s);
    const double rel = std::fabs(wait / expect - 1.0);
    ok = ok && single && rel <= 0.05 && t.deliveries.size() >= 95000;
    detail += fmt("rho=%.1f W=%.1f oracle=%.1f (%.2f%%, %zu updates); ", rho, wait, expect, 100 * rel,
                  t.deliveries.size());
  }
  verdict("AC-7", ok, detail);
}

config::ScenarioConfig lossy(std::uint64_t seed, sim::PathMode mode, harq::Variant variant) {
  config::ScenarioConfig c;
  c.scenario.seed = seed;
  c.scenario.mode = mode;
  c.scenario.harq.variant = variant;
  c.scenario.traffic = sim::TrafficProcess::poisson(1.0 / 15000);
  c.scenario.horizon_cu = 30'000'000;
  c.scenario.harq.coding = fbc::CodingConfig::from_split(1000, 300, 4);
  c.scenario.topology.gbs_count = 6;
  c.scenario.radio.satellite_direct.fading = channel::FadingModel::rayleigh();
  c.scenario.radio.satellite_gbs.fading = channel::FadingModel::rayleigh();
  c.scenario.radio.satellite_gbs.antenna_gain_dbi = 22;
  c.scenario.radio.interferer_activity = 0.3;
  config::validate(c);
  return c;
}

void ac8() {
  int traces = 0;
  std::int64_t identity_errors = 0;
  double worst_area = 0.0;
  bool identical = true;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (auto mode : {sim::PathMode::stin, sim::PathMode::psn}) {
      for (auto variant : {harq::Variant::standard, harq::Variant::fast}) {
        const auto cfg = lossy(seed, mode, variant);
        const auto a = pipeline::execute(cfg);
        const auto b = pipeline::execute(cfg);
        identical = identical && pipeline::trace_csv(a.trace, a.aoi) == pipeline::trace_csv(b.trace, b.aoi) &&
                    pipeline::aoi_csv(a.aoi) == pipeline::aoi_csv(b.aoi) &&
                    pipeline::fits_csv(a.summary.fits) == pipeline::fits_csv(b.summary.fits) &&
                    pipeline::summary_json(a.summary, cfg) == pipeline::summary_json(b.summary, cfg);
        ++traces;

        std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
        std::int64_t sum_total = 0, sum_system = 0;
        for (const auto& d : a.trace.deliveries) {
          const auto& x = d.delay;
          if (x.total() != x.queuing + x.transmission + x.processing + x.propagation) ++identity_errors;
          sum_total += x.total();
          sum_system += d.system_time();
          pairs.emplace_back(d.generated_at, d.delivered_at);
        }
        if (sum_total != sum_system) ++identity_errors;
        if (a.trace.deliveries.size() + a.trace.dropped.size() !=
            static_cast<std::size_t>(a.trace.updates_generated)) {
          ++identity_errors;
        }
        const double area = oracle::sawtooth_area(pairs, a.aoi.breakpoints.back().time);
        worst_area = std::max(worst_area, std::fabs(sim::age_area(a.aoi) - area) / area);
      }
    }
  }
  verdict("AC-8", identical && identity_errors == 0 && worst_area <= 1e-9,
          fmt("%d traces, byte-identical reruns: %s, identity violations %lld, max relative area error %.3g", traces,
              identical ? "yes" : "no", static_cast<long long>(identity_errors), worst_area));
}

void ac9() {
  int compared = 0, violations = 0;
  for (int i = 0; i < 10000; ++i) {
    Rng ch(derive_seed(9, Stream::channel, static_cast<std::uint64_t>(i)));
    std::vector<channel::ChannelState> trace;
    for (int r = 0; r < 6; ++r) {
      trace.push_back(channel::channel_state(2.0 * channel::draw_fading(channel::FadingModel::rician(3), ch)));
    }
    Rng dec(derive_seed(9, Stream::decode, static_cast<std::uint64_t>(i)));
    const double u = uniform01(dec);
    const harq::ChannelSource src = [&trace](int round) { return trace.at(static_cast<std::size_t>(round - 1)); };
    harq::HarqConfig cfg;
    cfg.coding = fbc::CodingConfig::from_split(900, 250, 6);
    cfg.processing_delay_cu = 100;
    cfg.propagation_delay_cu = 2001;
    cfg.variant = harq::Variant::standard;
    const auto s = harq::run_harq_with_uniform(src, cfg, u);
    cfg.variant = harq::Variant::fast;
    const auto f = harq::run_harq_with_uniform(src, cfg, u);
    if (s.rounds_used == f.rounds_used && f.rounds_used >= f.l0) {
      ++compared;
      if (f.delay.total() > s.delay.total()) ++violations;
    }
  }
  verdict("AC-9", violations == 0 && compared > 0,
          fmt("10000 paired traces, %d with equal rounds >= l0, %d violations", compared, violations));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9};
  for (const auto& c : criteria) c();
  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
