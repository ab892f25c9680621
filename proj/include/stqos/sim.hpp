#pragma once

// Discrete-event engine: status-update generation, FCFS service at the
// satellite, STIN/PSN path selection, per-hop HARQ and the AoI sawtooth.
// Time is integer channel uses (cu).

#include <cstdint>
#include <optional>
#include <vector>

#include "stqos/channel.hpp"
#include "stqos/harq.hpp"
#include "stqos/random.hpp"

namespace stqos::sim {

inline constexpr double kSecondsPerChannelUse = 1e-6;

struct StatusUpdate {
  std::int64_t id = 0;
  std::int64_t generated_at = 0;
  double payload_bits = 0.0;
};

enum class TrafficKind { periodic, poisson, bernoulli };

struct TrafficProcess {
  TrafficKind kind = TrafficKind::periodic;
  std::int64_t period_cu = 20000;  // periodic
  double rate_per_cu = 5e-5;       // poisson
  double probability = 0.0;        // bernoulli, per slot
  std::int64_t slot_cu = 1;        // bernoulli slot length

  static TrafficProcess periodic(std::int64_t period) {
    return {.kind = TrafficKind::periodic, .period_cu = period};
  }
  static TrafficProcess poisson(double rate) { return {.kind = TrafficKind::poisson, .rate_per_cu = rate}; }
  static TrafficProcess bernoulli(double p, std::int64_t slot = 1) {
    return {.kind = TrafficKind::bernoulli, .probability = p, .slot_cu = slot};
  }

  // Throws ConfigError for non-positive rates/periods or p outside [0, 1].
  void validate() const;
};

// Sorted generation instants in [0, horizon).
std::vector<StatusUpdate> generate_arrivals(const TrafficProcess& process, std::int64_t horizon,
                                            double payload_bits, Rng& rng);

enum class PathMode { stin, psn };

enum class HopKind { satellite_to_destination, satellite_to_gbs, gbs_to_destination };

struct Hop {
  HopKind kind = HopKind::satellite_to_destination;
  double distance_km = 0.0;
  std::optional<std::size_t> gbs_index;  // relay GBS for STIN hops
};

// PSN: one satellite->destination hop at nadir. STIN: satellite->nearest GBS,
// then GBS->destination; ties go to the lowest GBS index.
std::vector<Hop> select_path(const channel::Topology& topology, PathMode mode);

// Rounded distance / c in channel uses.
std::int64_t propagation_delay_cu(double distance_km);

struct RadioConfig {
  channel::LinkParams satellite_direct{};
  channel::LinkParams satellite_gbs{};
  channel::LinkParams terrestrial{};
  // Probability that each non-serving GBS transmits during a round.
  double interferer_activity = 0.0;
};

struct Scenario {
  TrafficProcess traffic{};
  harq::HarqConfig harq{};  // propagation_delay_cu is filled per hop
  channel::TopologyParams topology{};
  RadioConfig radio{};
  PathMode mode = PathMode::stin;
  std::int64_t horizon_cu = 10'000'000;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;
};

struct Delivery {
  std::int64_t id = 0;
  std::int64_t generated_at = 0;
  std::int64_t delivered_at = 0;
  std::vector<harq::HarqOutcome> hops;
  harq::DelayBreakdown delay{};

  int rounds() const;
  // l0 of the first (satellite) hop; 0 under standard HARQ.
  int l0() const;
  std::int64_t system_time() const { return delivered_at - generated_at; }
  std::int64_t service_time() const { return delay.total() - delay.queuing; }
};

struct QueueSample {
  std::int64_t time = 0;
  std::int64_t length = 0;  // updates in system found by an arrival, itself excluded
};

struct SimTrace {
  std::vector<Delivery> deliveries;  // sorted by delivered_at
  std::vector<std::int64_t> dropped;
  std::vector<QueueSample> queue_length_samples;
  std::int64_t horizon = 0;
  std::int64_t updates_generated = 0;
  channel::Topology topology{};
  std::vector<Hop> path;
};

// Per-update randomness comes from streams keyed on (seed, update id, hop), so
// scenarios that differ only in coding or radio parameters see common random numbers.
SimTrace simulate(const Scenario& scenario);

struct AgePoint {
  std::int64_t time = 0;
  std::int64_t age = 0;
  bool peak = false;
};

struct AoiTrajectory {
  std::vector<AgePoint> breakpoints;  // two points share a time at every reset
  std::vector<std::int64_t> peaks;    // one per delivery after the first
};

AoiTrajectory aoi_trajectory(const SimTrace& trace);

// Area under the sawtooth divided by its time span.
double time_average_age(const AoiTrajectory& trajectory);
double age_area(const AoiTrajectory& trajectory);

}  // namespace stqos::sim
