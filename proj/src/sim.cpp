#include "stqos/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stqos/error.hpp"

namespace stqos::sim {

void TrafficProcess::validate() const {
  switch (kind) {
    case TrafficKind::periodic:
      if (period_cu <= 0) throw ConfigError("traffic: period must be > 0");
      return;
    case TrafficKind::poisson:
      if (!(rate_per_cu > 0.0) || !std::isfinite(rate_per_cu)) {
        throw ConfigError("traffic: poisson rate must be > 0");
      }
      return;
    case TrafficKind::bernoulli:
      if (!(probability >= 0.0 && probability <= 1.0)) {
        throw ConfigError("traffic: bernoulli probability must lie in [0, 1]");
      }
      if (slot_cu <= 0) throw ConfigError("traffic: slot length must be > 0");
      return;
  }
}

std::vector<StatusUpdate> generate_arrivals(const TrafficProcess& process, std::int64_t horizon,
                                            double payload_bits, Rng& rng) {
  process.validate();
  if (horizon <= 0) throw ConfigError("traffic: horizon must be > 0");

  std::vector<StatusUpdate> out;
  auto emit = [&](std::int64_t t) {
    out.push_back({static_cast<std::int64_t>(out.size()), t, payload_bits});
  };

  switch (process.kind) {
    case TrafficKind::periodic:
      for (std::int64_t t = 0; t < horizon; t += process.period_cu) emit(t);
      break;
    case TrafficKind::poisson: {
      std::exponential_distribution<double> gap(process.rate_per_cu);
      double t = gap(rng);
      while (t < static_cast<double>(horizon)) {
        emit(static_cast<std::int64_t>(std::floor(t)));
        t += gap(rng);
      }
      break;
    }
    case TrafficKind::bernoulli: {
      if (process.probability <= 0.0) break;
      const std::int64_t slots = (horizon + process.slot_cu - 1) / process.slot_cu;
      if (process.probability >= 1.0) {
        for (std::int64_t s = 0; s < slots; ++s) emit(s * process.slot_cu);
        break;
      }
      // skip runs of empty slots instead of flipping one coin per slot
      std::geometric_distribution<std::int64_t> skip(process.probability);
      for (std::int64_t s = skip(rng); s < slots; s += 1 + skip(rng)) emit(s * process.slot_cu);
      break;
    }
  }
  return out;
}

std::vector<Hop> select_path(const channel::Topology& topology, PathMode mode) {
  const double alt = topology.satellite_altitude_km;
  if (mode == PathMode::psn) {
    return {Hop{HopKind::satellite_to_destination, alt, std::nullopt}};
  }
  if (topology.gbs_count() == 0) {
    throw ConfigError("path: STIN mode requires at least one GBS");
  }
  std::size_t best = 0;
  double best_d = topology.gbs_distance_km(0);
  for (std::size_t i = 1; i < topology.gbs_count(); ++i) {
    const double d = topology.gbs_distance_km(i);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return {Hop{HopKind::satellite_to_gbs, std::hypot(alt, best_d), best},
          Hop{HopKind::gbs_to_destination, best_d, best}};
}

std::int64_t propagation_delay_cu(double distance_km) {
  const double seconds = distance_km / channel::kSpeedOfLightKmPerS;
  return std::llround(seconds / kSecondsPerChannelUse);
}

void Scenario::validate() const {
  traffic.validate();
  harq.validate();
  topology.validate();
  radio.satellite_direct.validate();
  radio.satellite_gbs.validate();
  radio.terrestrial.validate();
  if (!(radio.interferer_activity >= 0.0 && radio.interferer_activity <= 1.0)) {
    throw ConfigError("interference: activity probability must lie in [0, 1]");
  }
  if (horizon_cu <= 0) throw ConfigError("horizon must be > 0");
  if (mode == PathMode::stin && topology.gbs_count < 1) {
    throw ConfigError("path: STIN mode requires gbs_count >= 1");
  }
}

int Delivery::rounds() const {
  int r = 0;
  for (const auto& h : hops) r += h.rounds_used;
  return r;
}

int Delivery::l0() const { return hops.empty() ? 0 : hops.front().l0; }

namespace {

struct HopPlan {
  Hop hop;
  const channel::LinkParams* link = nullptr;
  double pathloss_db = 0.0;
  std::int64_t propagation_cu = 0;
  std::vector<double> interferer_pathloss_db;  // GBSs other than the relay, seen at the destination
};

std::vector<HopPlan> plan_hops(const Scenario& sc, const channel::Topology& topo,
                               const std::vector<Hop>& path) {
  std::vector<HopPlan> plans;
  for (const Hop& hop : path) {
    HopPlan p;
    p.hop = hop;
    switch (hop.kind) {
      case HopKind::satellite_to_destination:
        p.link = &sc.radio.satellite_direct;
        break;
      case HopKind::satellite_to_gbs:
        p.link = &sc.radio.satellite_gbs;
        break;
      case HopKind::gbs_to_destination:
        p.link = &sc.radio.terrestrial;
        break;
    }
    p.pathloss_db = channel::pathloss_db(hop.distance_km, p.link->carrier_frequency_ghz, p.link->pathloss);
    p.propagation_cu = propagation_delay_cu(hop.distance_km);
    const bool at_destination = hop.kind != HopKind::satellite_to_gbs;
    if (at_destination && sc.radio.interferer_activity > 0.0) {
      const auto& t = sc.radio.terrestrial;
      for (std::size_t i = 0; i < topo.gbs_count(); ++i) {
        if (hop.gbs_index && *hop.gbs_index == i) continue;
        p.interferer_pathloss_db.push_back(
            channel::pathloss_db(topo.gbs_distance_km(i), t.carrier_frequency_ghz, t.pathloss));
      }
    }
    plans.push_back(std::move(p));
  }
  return plans;
}

}  // namespace

SimTrace simulate(const Scenario& sc) {
  sc.validate();

  SimTrace trace;
  trace.horizon = sc.horizon_cu;

  Rng topo_rng(derive_seed(sc.seed, Stream::topology));
  trace.topology = channel::place_gbs(sc.topology, topo_rng);
  trace.path = select_path(trace.topology, sc.mode);
  const auto plans = plan_hops(sc, trace.topology, trace.path);

  Rng arrival_rng(derive_seed(sc.seed, Stream::arrivals));
  const auto updates = generate_arrivals(sc.traffic, sc.horizon_cu,
                                         static_cast<double>(sc.harq.coding.payload_bits), arrival_rng);
  trace.updates_generated = static_cast<std::int64_t>(updates.size());
  trace.deliveries.reserve(updates.size());
  trace.queue_length_samples.reserve(updates.size());

  std::vector<std::int64_t> departures;
  departures.reserve(updates.size());
  std::size_t first_in_system = 0;
  std::int64_t server_free = std::numeric_limits<std::int64_t>::min();
  std::vector<double> interference;

  for (std::size_t i = 0; i < updates.size(); ++i) {
    const StatusUpdate& u = updates[i];
    while (first_in_system < i && departures[first_in_system] <= u.generated_at) ++first_in_system;
    trace.queue_length_samples.push_back(
        {u.generated_at, static_cast<std::int64_t>(i - first_in_system)});

    const std::int64_t start = std::max(u.generated_at, server_free);
    Delivery d;
    d.id = u.id;
    d.generated_at = u.generated_at;
    bool delivered = true;

    for (std::size_t h = 0; h < plans.size(); ++h) {
      const HopPlan& plan = plans[h];
      const std::uint64_t key = static_cast<std::uint64_t>(u.id) * 4 + h;
      Rng channel_rng(derive_seed(sc.seed, Stream::channel, key));
      Rng interference_rng(derive_seed(sc.seed, Stream::interference, key));
      Rng decode_rng(derive_seed(sc.seed, Stream::decode, key));

      auto source = [&](int) {
        interference.clear();
        for (double pl : plan.interferer_pathloss_db) {
          if (uniform01(interference_rng) >= sc.radio.interferer_activity) continue;
          const double g = channel::draw_fading(sc.radio.terrestrial.fading, interference_rng);
          interference.push_back(channel::received_power_dbm(sc.radio.terrestrial, pl) +
                                 channel::linear_to_db(g));
        }
        const double gain = channel::draw_fading(plan.link->fading, channel_rng);
        return channel::channel_state(channel::sinr(*plan.link, gain, plan.pathloss_db, interference));
      };

      harq::HarqConfig cfg = sc.harq;
      cfg.propagation_delay_cu = plan.propagation_cu;
      harq::HarqOutcome outcome = harq::run_harq(source, cfg, decode_rng);
      d.delay += outcome.delay;
      const bool ok = outcome.success;
      d.hops.push_back(std::move(outcome));
      if (!ok) {
        delivered = false;
        break;
      }
    }

    const std::int64_t service = d.delay.total();
    server_free = start + service;
    departures.push_back(server_free);
    if (delivered) {
      d.delay.queuing = start - u.generated_at;
      d.delivered_at = server_free;
      trace.deliveries.push_back(std::move(d));
    } else {
      trace.dropped.push_back(u.id);
    }
  }
  return trace;
}

AoiTrajectory aoi_trajectory(const SimTrace& trace) {
  AoiTrajectory traj;
  traj.breakpoints.push_back({0, 0, false});
  std::int64_t last_gen = 0;
  std::int64_t now = 0;
  for (std::size_t j = 0; j < trace.deliveries.size(); ++j) {
    const Delivery& d = trace.deliveries[j];
    const std::int64_t pre = d.delivered_at - last_gen;
    const bool is_peak = j > 0;
    traj.breakpoints.push_back({d.delivered_at, pre, is_peak});
    traj.breakpoints.push_back({d.delivered_at, d.delivered_at - d.generated_at, false});
    if (is_peak) traj.peaks.push_back(pre);
    last_gen = d.generated_at;
    now = d.delivered_at;
  }
  const std::int64_t end = std::max(trace.horizon, now);
  if (end > now || traj.breakpoints.size() == 1) {
    traj.breakpoints.push_back({end, end - last_gen, false});
  }
  return traj;
}

double age_area(const AoiTrajectory& trajectory) {
  long double twice_area = 0.0L;
  const auto& bp = trajectory.breakpoints;
  for (std::size_t i = 1; i < bp.size(); ++i) {
    const std::int64_t dt = bp[i].time - bp[i - 1].time;
    if (dt <= 0) continue;
    twice_area += static_cast<long double>(bp[i].age + bp[i - 1].age) * static_cast<long double>(dt);
  }
  return static_cast<double>(twice_area / 2.0L);
}

double time_average_age(const AoiTrajectory& trajectory) {
  const auto& bp = trajectory.breakpoints;
  if (bp.size() < 2) return 0.0;
  const std::int64_t span = bp.back().time - bp.front().time;
  return span > 0 ? age_area(trajectory) / static_cast<double>(span) : 0.0;
}

}  // namespace stqos::sim
