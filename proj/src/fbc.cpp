#include "stqos/fbc.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stqos/error.hpp"

namespace stqos::fbc {

void CodingConfig::validate() const {
  if (payload_bits < 1) throw ConfigError("coding: payload_bits must be >= 1");
  if (sub_blocklength < 1) throw ConfigError("coding: sub_blocklength must be >= 1");
  if (max_rounds < 1) throw ConfigError("coding: max_rounds must be >= 1");
  if (blocklength != sub_blocklength * max_rounds) {
    throw ConfigError("coding: blocklength must equal max_rounds * sub_blocklength (n = L * n_hat), got n=" +
                      std::to_string(blocklength) + ", L=" + std::to_string(max_rounds) +
                      ", n_hat=" + std::to_string(sub_blocklength));
  }
}

double q_function(double x) {
  if (std::isnan(x)) return x;
  if (x >= kQSaturation) return 0.0;
  if (x <= -kQSaturation) return 1.0;
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

namespace {

double normal_approx_error(double info_bits, double payload_bits, double length, double dispersion) {
  const double margin = info_bits - payload_bits + 0.5 * std::log2(length);
  if (dispersion <= 0.0) return margin >= 0.0 ? 0.0 : 1.0;
  return q_function(margin / std::sqrt(dispersion));
}

}  // namespace

double decoding_error(std::int64_t blocklength, double payload_bits, const ChannelState& state) {
  if (blocklength < 1) throw DomainError("decoding_error: blocklength must be >= 1");
  if (payload_bits < 0.0) throw DomainError("decoding_error: payload must be >= 0");
  const auto n = static_cast<double>(blocklength);
  return normal_approx_error(n * state.capacity, payload_bits, n, n * state.dispersion);
}

double harq_ir_error(std::span<const ChannelState> states, std::int64_t sub_blocklength,
                     double payload_bits) {
  if (states.empty()) throw DomainError("harq_ir_error: at least one round is required");
  if (sub_blocklength < 1) throw DomainError("harq_ir_error: sub_blocklength must be >= 1");
  if (payload_bits < 0.0) throw DomainError("harq_ir_error: payload must be >= 0");
  double sum_c = 0.0;
  double sum_v = 0.0;
  for (const auto& s : states) {
    sum_c += s.capacity;
    sum_v += s.dispersion;
  }
  const auto n_hat = static_cast<double>(sub_blocklength);
  const double total_length = n_hat * static_cast<double>(states.size());
  return normal_approx_error(n_hat * sum_c, payload_bits, total_length, n_hat * sum_v);
}

double exponent_from_error(double eps, double length) {
  if (!(length > 0.0)) throw DomainError("exponent: normalizing length must be > 0");
  if (eps <= 0.0) return std::numeric_limits<double>::infinity();
  if (eps >= 1.0) return 0.0;
  return -std::log(eps) / length;
}

double error_from_exponent(double theta, double length) { return std::exp(-theta * length); }

double error_exponent(std::int64_t sub_blocklength, double payload_bits, const ChannelState& state) {
  const double eps = decoding_error(sub_blocklength, payload_bits, state);
  return exponent_from_error(eps, static_cast<double>(sub_blocklength));
}

RateRule fixed_payload(double payload_bits) {
  return [payload_bits](std::int64_t) { return payload_bits; };
}

RateRule fixed_rate(double bits_per_channel_use) {
  return [bits_per_channel_use](std::int64_t n_hat) {
    return bits_per_channel_use * static_cast<double>(n_hat);
  };
}

std::vector<ExponentPoint> theta_error_curve(std::span<const std::int64_t> sub_blocklengths,
                                             const RateRule& rate_rule, const ChannelState& state,
                                             int rounds, ExponentScale scale) {
  if (sub_blocklengths.empty()) throw DomainError("theta_error_curve: empty grid");
  if (rounds < 1) throw DomainError("theta_error_curve: rounds must be >= 1");
  for (std::size_t i = 1; i < sub_blocklengths.size(); ++i) {
    if (sub_blocklengths[i] <= sub_blocklengths[i - 1]) {
      throw DomainError("theta_error_curve: grid must be strictly ascending");
    }
  }
  const std::vector<ChannelState> states(static_cast<std::size_t>(rounds), state);
  std::vector<ExponentPoint> curve;
  curve.reserve(sub_blocklengths.size());
  for (std::int64_t n_hat : sub_blocklengths) {
    ExponentPoint p;
    p.sub_blocklength = n_hat;
    p.payload_bits = rate_rule(n_hat);
    p.error = harq_ir_error(states, n_hat, p.payload_bits);
    const double length = scale == ExponentScale::sub_blocklength
                              ? static_cast<double>(n_hat)
                              : static_cast<double>(n_hat) * rounds;
    p.theta = exponent_from_error(p.error, length);
    curve.push_back(p);
  }
  return curve;
}

}  // namespace stqos::fbc
