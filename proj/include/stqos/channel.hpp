#pragma once

// Topology, link budget, fading and the SINR -> (capacity, dispersion) map
// shared by the satellite and terrestrial hops.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stqos/random.hpp"

namespace stqos::channel {

inline constexpr double kSpeedOfLightKmPerS = 299792.458;

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

struct Point2 {
  double x_km = 0.0;
  double y_km = 0.0;
};

double distance_km(Point2 a, Point2 b);

struct TopologyParams {
  double satellite_altitude_km = 600.0;
  int gbs_count = 0;
  double inner_radius_km = 2.0;
  double outer_radius_km = 10.0;

  // Throws ConfigError.
  void validate() const;
};

// GBSs lie in an annulus centred on the destination, which sits at the origin.
struct Topology {
  double satellite_altitude_km = 600.0;
  double inner_radius_km = 2.0;
  double outer_radius_km = 10.0;
  Point2 destination{};
  std::vector<Point2> gbs_positions;

  std::size_t gbs_count() const { return gbs_positions.size(); }
  double gbs_distance_km(std::size_t index) const;
};

// Draws gbs_count points uniformly by area over [R_in, R_out].
Topology place_gbs(const TopologyParams& params, Rng& rng);

enum class PathlossKind { free_space, log_distance };

struct PathlossModel {
  PathlossKind kind = PathlossKind::free_space;
  double exponent = 3.0;
  double reference_distance_km = 0.1;
  // When unset the free-space loss at the reference distance is used.
  std::optional<double> reference_loss_db;
};

// Free-space: 20 log10(d_km) + 20 log10(f_GHz) + 92.45.
double free_space_pathloss_db(double distance_km, double frequency_ghz);
double pathloss_db(double distance_km, double frequency_ghz, const PathlossModel& model);

enum class FadingKind { none, rayleigh, rician, shadowed_rician };

struct FadingModel {
  FadingKind kind = FadingKind::none;
  double rician_k = 10.0;
  // Shadowed-Rician: scatter half-power b, Nakagami m and LoS power omega.
  // Defaults are the common "average shadowing" land-mobile satellite fit.
  double sr_b = 0.126;
  double sr_m = 10.1;
  double sr_omega = 0.835;

  static FadingModel none() { return {}; }
  static FadingModel rayleigh() { return {.kind = FadingKind::rayleigh}; }
  static FadingModel rician(double k) { return {.kind = FadingKind::rician, .rician_k = k}; }
  static FadingModel shadowed_rician(double b, double m, double omega) {
    return {.kind = FadingKind::shadowed_rician, .sr_b = b, .sr_m = m, .sr_omega = omega};
  }

  // Throws ConfigError.
  void validate() const;
};

// Linear power gain. Unit mean for rayleigh and rician; 2b + omega for shadowed-rician.
double draw_fading(const FadingModel& model, Rng& rng);

struct LinkParams {
  double tx_power_dbm = 30.0;
  double antenna_gain_dbi = 20.0;
  double noise_power_dbm = -110.0;
  double carrier_frequency_ghz = 2.0;
  PathlossModel pathloss{};
  FadingModel fading{};

  // Throws ConfigError. Log-distance requires exponent > 2 here even though
  // pathloss_db() itself accepts any positive exponent.
  void validate() const;
};

// Received power before fading, in dBm.
double received_power_dbm(const LinkParams& link, double pathloss_db);

// signal / (noise + sum of interference), combined in the linear domain.
// `interference_dbm` are received interferer powers.
double sinr(const LinkParams& link, double serving_gain, double pathloss_db,
            std::span<const double> interference_dbm = {});

struct ChannelState {
  double sinr = 0.0;
  double capacity = 0.0;    // bits per channel use
  double dispersion = 0.0;  // bits^2 per channel use
};

// C = log2(1 + sinr), V = (1 - (1 + sinr)^-2) (log2 e)^2.
ChannelState channel_state(double sinr);

}  // namespace stqos::channel
