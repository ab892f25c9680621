#pragma once

// Per-update HARQ-IR state machines: standard stop-and-wait and the two-phase
// fast variant that skips decoding and feedback until the predicted round l0.
//
// Delays are integer channel uses throughout so the component identity
// total = queuing + transmission + processing + propagation is exact.

#include <cstdint>
#include <functional>
#include <vector>

#include "stqos/channel.hpp"
#include "stqos/fbc.hpp"
#include "stqos/random.hpp"

namespace stqos::harq {

using channel::ChannelState;

enum class Variant { standard, fast };

struct HarqConfig {
  Variant variant = Variant::standard;
  fbc::CodingConfig coding{};
  std::int64_t processing_delay_cu = 0;   // per decode attempt
  std::int64_t propagation_delay_cu = 0;  // one-way, per leg
  double l0_margin = 0.1;

  // Throws ConfigError.
  void validate() const;
};

struct DelayBreakdown {
  std::int64_t queuing = 0;
  std::int64_t transmission = 0;
  std::int64_t processing = 0;
  std::int64_t propagation = 0;

  std::int64_t total() const { return queuing + transmission + processing + propagation; }

  DelayBreakdown& operator+=(const DelayBreakdown& o) {
    queuing += o.queuing;
    transmission += o.transmission;
    processing += o.processing;
    propagation += o.propagation;
    return *this;
  }
  friend bool operator==(const DelayBreakdown&, const DelayBreakdown&) = default;
};

struct HarqOutcome {
  int rounds_used = 0;
  bool success = false;
  std::vector<ChannelState> per_round_states;
  int l0 = 0;  // fast variant only; 0 for standard
  int decode_attempts = 0;
  int propagation_legs = 0;
  DelayBreakdown delay{};  // queuing stays 0 here
};

// Per-round channel draw; `round` is 1-based.
using ChannelSource = std::function<ChannelState(int round)>;

// Smallest l in [1, L] with l * n_hat * C1 >= k (1 + margin), else L.
int estimate_rounds_l0(const ChannelState& first_state, const fbc::CodingConfig& coding,
                       double margin);

// Probability of decoding at a round given failure at the previous decode,
// 1 - eps_now / eps_prev clamped to [0, 1]. eps_prev = 1 before any attempt.
double stagewise_success_probability(double eps_prev, double eps_now);

// Both runners draw a single uniform u from `decode_rng` and declare success at
// the first decode attempt whose accumulated error satisfies eps_l <= u. This
// realizes the stagewise chain above by inverse transform, so runs that share
// a channel trace and u are coupled across L, variant and link quality.
HarqOutcome run_standard_harq(const ChannelSource& channel, const HarqConfig& cfg, Rng& decode_rng);
HarqOutcome run_fast_harq(const ChannelSource& channel, const HarqConfig& cfg, Rng& decode_rng);
HarqOutcome run_harq(const ChannelSource& channel, const HarqConfig& cfg, Rng& decode_rng);

// Same as above with the decode uniform supplied directly.
HarqOutcome run_harq_with_uniform(const ChannelSource& channel, const HarqConfig& cfg, double u);

int decode_attempts(Variant variant, int rounds_used, int l0);
int propagation_legs(Variant variant, int rounds_used, int l0);

// transmission = l n_hat, processing = attempts * p, propagation = legs * d.
DelayBreakdown delay_breakdown(const HarqOutcome& outcome, const HarqConfig& cfg);

}  // namespace stqos::harq
