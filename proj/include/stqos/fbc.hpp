#pragma once

// Finite-blocklength error model (normal approximation), HARQ-IR
// accumulation and the error-rate exponent theta_error.
//
// Capacity terms are in bits; exponents are in nats.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stqos/channel.hpp"

namespace stqos::fbc {

using channel::ChannelState;

// A status update of k bits coded into n = L * n_hat channel uses, sent as
// L sub-codewords of n_hat symbols each.
struct CodingConfig {
  std::int64_t payload_bits = 1000;
  std::int64_t blocklength = 2000;
  std::int64_t sub_blocklength = 500;
  int max_rounds = 4;

  static CodingConfig from_split(std::int64_t payload_bits, std::int64_t sub_blocklength,
                                 int max_rounds) {
    return {payload_bits, sub_blocklength * max_rounds, sub_blocklength, max_rounds};
  }

  // Throws ConfigError naming the violated invariant.
  void validate() const;
};

// Arguments beyond this magnitude saturate Q to exactly 0 or 1.
inline constexpr double kQSaturation = 38.0;

// Standard normal upper tail, Q(x) = erfc(x / sqrt 2) / 2.
double q_function(double x);

// Q((n C - k + 0.5 log2 n) / sqrt(n V)); a step at the boundary when V = 0.
double decoding_error(std::int64_t blocklength, double payload_bits, const ChannelState& state);

// Error after accumulating l = states.size() sub-codewords of n_hat symbols:
// Q((n_hat sum C_i - k + 0.5 log2(l n_hat)) / sqrt(n_hat sum V_i)).
// Throws DomainError on an empty list.
double harq_ir_error(std::span<const ChannelState> states, std::int64_t sub_blocklength,
                     double payload_bits);

// Which length normalizes -ln(eps): the sub-codeword n_hat or the full codeword n = L n_hat.
enum class ExponentScale { sub_blocklength, full_blocklength };

// -ln(eps) / length; +inf when eps == 0 and 0 when eps == 1.
double exponent_from_error(double eps, double length);
// Inverse of exponent_from_error.
double error_from_exponent(double theta, double length);

// theta_error = -ln(decoding_error(n_hat, k, state)) / n_hat.
double error_exponent(std::int64_t sub_blocklength, double payload_bits, const ChannelState& state);

// Maps a sub-blocklength to the payload carried at that point of a sweep.
using RateRule = std::function<double(std::int64_t sub_blocklength)>;

RateRule fixed_payload(double payload_bits);
// k = bits_per_channel_use * n_hat.
RateRule fixed_rate(double bits_per_channel_use);

struct ExponentPoint {
  std::int64_t sub_blocklength = 0;
  double payload_bits = 0.0;
  double error = 0.0;
  double theta = 0.0;
};

// theta_error over a sub-blocklength grid with `rounds` identical HARQ-IR rounds.
std::vector<ExponentPoint> theta_error_curve(std::span<const std::int64_t> sub_blocklengths,
                                             const RateRule& rate_rule, const ChannelState& state,
                                             int rounds,
                                             ExponentScale scale = ExponentScale::sub_blocklength);

}  // namespace stqos::fbc
