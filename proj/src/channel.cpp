#include "stqos/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stqos/error.hpp"

namespace stqos::channel {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
double mw_to_dbm(double mw) { return linear_to_db(mw); }

double distance_km(Point2 a, Point2 b) { return std::hypot(a.x_km - b.x_km, a.y_km - b.y_km); }

void TopologyParams::validate() const {
  if (!(satellite_altitude_km > 0.0) || !std::isfinite(satellite_altitude_km)) {
    throw ConfigError("topology: satellite altitude must be > 0 km");
  }
  if (gbs_count < 0) throw ConfigError("topology: gbs_count must be >= 0");
  if (!(inner_radius_km > 0.0)) throw ConfigError("topology: inner radius must be > 0");
  if (!(inner_radius_km < outer_radius_km) || !std::isfinite(outer_radius_km)) {
    throw ConfigError("topology: inner radius must be < outer radius");
  }
}

double Topology::gbs_distance_km(std::size_t index) const {
  return distance_km(gbs_positions.at(index), destination);
}

Topology place_gbs(const TopologyParams& params, Rng& rng) {
  params.validate();
  Topology topo;
  topo.satellite_altitude_km = params.satellite_altitude_km;
  topo.inner_radius_km = params.inner_radius_km;
  topo.outer_radius_km = params.outer_radius_km;
  topo.gbs_positions.reserve(static_cast<std::size_t>(params.gbs_count));

  const double r_in2 = params.inner_radius_km * params.inner_radius_km;
  const double r_out2 = params.outer_radius_km * params.outer_radius_km;
  for (int i = 0; i < params.gbs_count; ++i) {
    const double u = uniform01(rng);
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    // clamp guards the last ulp so d stays inside [R_in, R_out]
    const double r = std::clamp(std::sqrt(r_in2 + u * (r_out2 - r_in2)), params.inner_radius_km,
                                params.outer_radius_km);
    topo.gbs_positions.push_back({r * std::cos(phi), r * std::sin(phi)});
  }
  return topo;
}

double free_space_pathloss_db(double distance_km, double frequency_ghz) {
  if (!(distance_km > 0.0)) throw DomainError("pathloss: distance must be > 0");
  if (!(frequency_ghz > 0.0)) throw DomainError("pathloss: frequency must be > 0");
  return 20.0 * std::log10(distance_km) + 20.0 * std::log10(frequency_ghz) + 92.45;
}

double pathloss_db(double distance_km, double frequency_ghz, const PathlossModel& model) {
  switch (model.kind) {
    case PathlossKind::free_space:
      return free_space_pathloss_db(distance_km, frequency_ghz);
    case PathlossKind::log_distance: {
      if (!(distance_km > 0.0)) throw DomainError("pathloss: distance must be > 0");
      if (!(model.exponent > 0.0)) throw DomainError("pathloss: exponent must be > 0");
      if (!(model.reference_distance_km > 0.0)) {
        throw DomainError("pathloss: reference distance must be > 0");
      }
      const double ref = model.reference_loss_db.value_or(
          free_space_pathloss_db(model.reference_distance_km, frequency_ghz));
      return ref + 10.0 * model.exponent * std::log10(distance_km / model.reference_distance_km);
    }
  }
  throw DomainError("pathloss: unknown model");
}

void FadingModel::validate() const {
  switch (kind) {
    case FadingKind::none:
    case FadingKind::rayleigh:
      return;
    case FadingKind::rician:
      if (!(rician_k >= 0.0) || !std::isfinite(rician_k)) {
        throw ConfigError("fading: rician K must be >= 0");
      }
      return;
    case FadingKind::shadowed_rician:
      if (!(sr_b > 0.0)) throw ConfigError("fading: shadowed-rician b must be > 0");
      if (!(sr_m > 0.0)) throw ConfigError("fading: shadowed-rician m must be > 0");
      if (!(sr_omega > 0.0)) throw ConfigError("fading: shadowed-rician omega must be > 0");
      return;
  }
}

double draw_fading(const FadingModel& model, Rng& rng) {
  model.validate();
  switch (model.kind) {
    case FadingKind::none:
      return 1.0;
    case FadingKind::rayleigh: {
      std::exponential_distribution<double> exp1(1.0);
      return exp1(rng);
    }
    case FadingKind::rician: {
      const double k = model.rician_k;
      const double los = std::sqrt(k / (k + 1.0));
      const double sigma = std::sqrt(0.5 / (k + 1.0));
      std::normal_distribution<double> n(0.0, sigma);
      const double re = los + n(rng);
      const double im = n(rng);
      return re * re + im * im;
    }
    case FadingKind::shadowed_rician: {
      // LoS amplitude is Nakagami-m, so its power is Gamma(m, omega/m).
      std::gamma_distribution<double> los_power(model.sr_m, model.sr_omega / model.sr_m);
      std::normal_distribution<double> n(0.0, std::sqrt(model.sr_b));
      const double phase = 2.0 * std::numbers::pi * uniform01(rng);
      const double a = std::sqrt(los_power(rng));
      const double re = a * std::cos(phase) + n(rng);
      const double im = a * std::sin(phase) + n(rng);
      return re * re + im * im;
    }
  }
  return 1.0;
}

void LinkParams::validate() const {
  if (!std::isfinite(tx_power_dbm)) throw ConfigError("link: tx power must be finite");
  if (!std::isfinite(antenna_gain_dbi)) throw ConfigError("link: antenna gain must be finite");
  if (!std::isfinite(noise_power_dbm)) throw ConfigError("link: noise power must be finite");
  if (!(carrier_frequency_ghz > 0.0) || !std::isfinite(carrier_frequency_ghz)) {
    throw ConfigError("link: carrier frequency must be > 0");
  }
  if (pathloss.kind == PathlossKind::log_distance) {
    if (!(pathloss.exponent > 2.0)) throw ConfigError("link: log-distance exponent must be > 2");
    if (!(pathloss.reference_distance_km > 0.0)) {
      throw ConfigError("link: log-distance reference distance must be > 0");
    }
  }
  fading.validate();
}

double received_power_dbm(const LinkParams& link, double pathloss_db) {
  return link.tx_power_dbm + link.antenna_gain_dbi - pathloss_db;
}

double sinr(const LinkParams& link, double serving_gain, double pathloss_db,
            std::span<const double> interference_dbm) {
  const double signal_mw = dbm_to_mw(received_power_dbm(link, pathloss_db)) * serving_gain;
  double denom_mw = dbm_to_mw(link.noise_power_dbm);
  for (double i_dbm : interference_dbm) denom_mw += dbm_to_mw(i_dbm);
  return signal_mw / denom_mw;
}

ChannelState channel_state(double sinr) {
  if (!(sinr >= 0.0)) throw DomainError("channel_state: sinr must be >= 0");
  constexpr double log2e = std::numbers::log2e;
  ChannelState s;
  s.sinr = sinr;
  // log1p/expm1 keep both terms accurate for sinr far below 1
  const double l1p = std::log1p(sinr);
  s.capacity = l1p * log2e;
  s.dispersion = -std::expm1(-2.0 * l1p) * log2e * log2e;
  return s;
}

}  // namespace stqos::channel
