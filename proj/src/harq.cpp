#include "stqos/harq.hpp"

#include <algorithm>
#include <cmath>

#include "stqos/error.hpp"

namespace stqos::harq {

void HarqConfig::validate() const {
  coding.validate();
  if (processing_delay_cu < 0) throw ConfigError("harq: processing delay must be >= 0");
  if (propagation_delay_cu < 0) throw ConfigError("harq: propagation delay must be >= 0");
  if (!(l0_margin >= 0.0) || !std::isfinite(l0_margin)) {
    throw ConfigError("harq: l0 margin must be >= 0");
  }
}

int estimate_rounds_l0(const ChannelState& first_state, const fbc::CodingConfig& coding,
                       double margin) {
  const double need = static_cast<double>(coding.payload_bits) * (1.0 + margin);
  const double per_round = static_cast<double>(coding.sub_blocklength) * first_state.capacity;
  for (int l = 1; l <= coding.max_rounds; ++l) {
    if (l * per_round >= need) return l;
  }
  return coding.max_rounds;
}

double stagewise_success_probability(double eps_prev, double eps_now) {
  if (eps_prev <= 0.0) return 1.0;
  return std::clamp(1.0 - eps_now / eps_prev, 0.0, 1.0);
}

int decode_attempts(Variant variant, int rounds_used, int l0) {
  if (variant == Variant::standard) return rounds_used;
  return std::max(0, rounds_used - l0 + 1);
}

int propagation_legs(Variant variant, int rounds_used, int l0) {
  if (variant == Variant::standard) return 2 * rounds_used;
  const int silent = std::min(rounds_used, l0 - 1);
  return silent + 2 * decode_attempts(variant, rounds_used, l0);
}

DelayBreakdown delay_breakdown(const HarqOutcome& outcome, const HarqConfig& cfg) {
  DelayBreakdown d;
  d.transmission = static_cast<std::int64_t>(outcome.rounds_used) * cfg.coding.sub_blocklength;
  d.processing = static_cast<std::int64_t>(
                     decode_attempts(cfg.variant, outcome.rounds_used, outcome.l0)) *
                 cfg.processing_delay_cu;
  d.propagation = static_cast<std::int64_t>(
                      propagation_legs(cfg.variant, outcome.rounds_used, outcome.l0)) *
                  cfg.propagation_delay_cu;
  return d;
}

namespace {

HarqOutcome run_rounds(const ChannelSource& channel, const HarqConfig& cfg, double u,
                       Variant variant) {
  const auto& coding = cfg.coding;
  const int max_rounds = std::max(1, coding.max_rounds);
  const auto payload = static_cast<double>(coding.payload_bits);

  HarqOutcome out;
  out.per_round_states.reserve(static_cast<std::size_t>(max_rounds));

  int first_decode_round = 1;
  for (int l = 1; l <= max_rounds; ++l) {
    out.per_round_states.push_back(channel(l));
    out.rounds_used = l;
    if (l == 1 && variant == Variant::fast) {
      out.l0 = estimate_rounds_l0(out.per_round_states.front(), coding, cfg.l0_margin);
      first_decode_round = out.l0;
    }
    if (l < first_decode_round) continue;

    const double eps = fbc::harq_ir_error(out.per_round_states, coding.sub_blocklength, payload);
    if (eps <= u) {
      out.success = true;
      break;
    }
  }

  out.decode_attempts = decode_attempts(variant, out.rounds_used, out.l0);
  out.propagation_legs = propagation_legs(variant, out.rounds_used, out.l0);
  HarqConfig effective = cfg;
  effective.variant = variant;
  out.delay = delay_breakdown(out, effective);
  return out;
}

}  // namespace

HarqOutcome run_harq_with_uniform(const ChannelSource& channel, const HarqConfig& cfg, double u) {
  return run_rounds(channel, cfg, u, cfg.variant);
}

HarqOutcome run_standard_harq(const ChannelSource& channel, const HarqConfig& cfg, Rng& decode_rng) {
  return run_rounds(channel, cfg, uniform01(decode_rng), Variant::standard);
}

HarqOutcome run_fast_harq(const ChannelSource& channel, const HarqConfig& cfg, Rng& decode_rng) {
  return run_rounds(channel, cfg, uniform01(decode_rng), Variant::fast);
}

HarqOutcome run_harq(const ChannelSource& channel, const HarqConfig& cfg, Rng& decode_rng) {
  return run_rounds(channel, cfg, uniform01(decode_rng), cfg.variant);
}

}  // namespace stqos::harq
