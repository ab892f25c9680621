#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "stqos/channel.hpp"
#include "stqos/error.hpp"
#include "stqos/random.hpp"

using namespace stqos;
using namespace stqos::channel;

TEST_CASE("place_gbs: empty, bounded and reproducible") {
  Rng rng(1);
  CHECK(place_gbs({.gbs_count = 0}, rng).gbs_positions.empty());

  TopologyParams p{.satellite_altitude_km = 600, .gbs_count = 50, .inner_radius_km = 2, .outer_radius_km = 10};
  Rng a(42), b(42);
  const Topology ta = place_gbs(p, a);
  const Topology tb = place_gbs(p, b);
  REQUIRE(ta.gbs_count() == 50);
  for (std::size_t i = 0; i < ta.gbs_count(); ++i) {
    const double d = ta.gbs_distance_km(i);
    CHECK(d >= 2.0);
    CHECK(d <= 10.0);
    CHECK(ta.gbs_positions[i].x_km == tb.gbs_positions[i].x_km);
    CHECK(ta.gbs_positions[i].y_km == tb.gbs_positions[i].y_km);
  }
}

TEST_CASE("place_gbs: rejects bad radii") {
  Rng rng(1);
  CHECK_THROWS_AS(place_gbs({.gbs_count = 1, .inner_radius_km = 5, .outer_radius_km = 5}, rng), ConfigError);
  CHECK_THROWS_AS(place_gbs({.gbs_count = 1, .inner_radius_km = 0, .outer_radius_km = 5}, rng), ConfigError);
  CHECK_THROWS_AS(place_gbs({.gbs_count = -1}, rng), ConfigError);
}

TEST_CASE("place_gbs: radial law is uniform by area") {
  Rng rng(2024);
  const TopologyParams p{.gbs_count = 100000, .inner_radius_km = 2, .outer_radius_km = 10};
  const Topology t = place_gbs(p, rng);
  std::vector<double> d;
  for (std::size_t i = 0; i < t.gbs_count(); ++i) d.push_back(t.gbs_distance_km(i));
  const double ks = oracle::ks_distance(d, [](double r) { return (r * r - 4.0) / (100.0 - 4.0); });
  CHECK(ks < 0.01);
}

TEST_CASE("pathloss") {
  CHECK(free_space_pathloss_db(600, 2) == doctest::Approx(154.03).epsilon(1e-4));
  // hand: 20*2.778151 + 20*0.301030 + 92.45
  CHECK(free_space_pathloss_db(600, 2) == doctest::Approx(55.56303 + 6.02060 + 92.45).epsilon(1e-6));
  CHECK(free_space_pathloss_db(1200, 2) - free_space_pathloss_db(600, 2) ==
        doctest::Approx(20 * std::log10(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(free_space_pathloss_db(0, 2), DomainError);
  CHECK_THROWS_AS(pathloss_db(-1, 2, {}), DomainError);

  const PathlossModel ld{.kind = PathlossKind::log_distance, .exponent = 2.0, .reference_distance_km = 0.1};
  for (double d : {0.5, 3.0, 40.0, 600.0}) {
    CHECK(pathloss_db(d, 2, ld) == doctest::Approx(free_space_pathloss_db(d, 2)).epsilon(1e-12));
  }
  const PathlossModel ld3{.kind = PathlossKind::log_distance,
                          .exponent = 3.0,
                          .reference_distance_km = 1.0,
                          .reference_loss_db = 100.0};
  CHECK(pathloss_db(10, 2, ld3) == doctest::Approx(130.0));
}

TEST_CASE("link validation keeps log-distance exponent above 2") {
  LinkParams l;
  l.pathloss = {.kind = PathlossKind::log_distance, .exponent = 2.0, .reference_distance_km = 0.1};
  CHECK_THROWS_AS(l.validate(), ConfigError);
  l.pathloss.exponent = 2.5;
  CHECK_NOTHROW(l.validate());
}

TEST_CASE("fading") {
  Rng rng(5);
  CHECK(draw_fading(FadingModel::none(), rng) == 1.0);
  CHECK_THROWS_AS(draw_fading(FadingModel::rician(-1), rng), ConfigError);
  CHECK_THROWS_AS(draw_fading(FadingModel::shadowed_rician(0.1, 0.0, 1.0), rng), ConfigError);

  SUBCASE("rayleigh mean") {
    Rng r(11);
    double sum = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += draw_fading(FadingModel::rayleigh(), r);
    CHECK(std::fabs(sum / n - 1.0) < 0.01);
  }
  SUBCASE("rician K=0 matches rayleigh") {
    Rng r1(21), r2(22);
    std::vector<double> a, b;
    for (int i = 0; i < 100000; ++i) {
      a.push_back(draw_fading(FadingModel::rician(0.0), r1));
      b.push_back(draw_fading(FadingModel::rayleigh(), r2));
    }
    // two-sample KS critical value at alpha = 0.001 for n = m = 1e5
    CHECK(oracle::ks_two_sample(a, b) < 1.95 * std::sqrt(2.0 / 100000));
  }
  SUBCASE("rician unit mean") {
    Rng r(31);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += draw_fading(FadingModel::rician(10), r);
    CHECK(std::fabs(sum / n - 1.0) < 0.01);
  }
  SUBCASE("shadowed rician mean is 2b + omega") {
    Rng r(41);
    const auto m = FadingModel::shadowed_rician(0.126, 10.1, 0.835);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double g = draw_fading(m, r);
      CHECK_MESSAGE(g >= 0.0, "negative power gain");
      sum += g;
    }
    CHECK(sum / n == doctest::Approx(2 * 0.126 + 0.835).epsilon(0.01));
  }
}

TEST_CASE("sinr") {
  LinkParams l{.tx_power_dbm = 30, .antenna_gain_dbi = 20, .noise_power_dbm = -110};
  CHECK(sinr(l, 1.0, 160.0) == doctest::Approx(1.0).epsilon(1e-12));
  const double one = -110.0;
  CHECK(sinr(l, 1.0, 160.0, std::vector<double>{one}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sinr(l, 1.0, 154.03) == doctest::Approx(std::pow(10.0, (30 + 20 - 154.03 + 110) / 10)).epsilon(1e-12));
  CHECK(sinr(l, 1.0, 154.03) == doctest::Approx(3.95).epsilon(2e-3));

  double prev = sinr(l, 1.0, 150.0, std::vector<double>{-130.0});
  for (double p : {-125.0, -120.0, -110.0, -100.0}) {
    const double s = sinr(l, 1.0, 150.0, std::vector<double>{-130.0, p});
    CHECK(s <= prev);
    prev = s;
  }
  prev = 0;
  for (double tx : {0.0, 10.0, 20.0, 30.0, 40.0}) {
    l.tx_power_dbm = tx;
    const double s = sinr(l, 1.0, 150.0, std::vector<double>{-115.0});
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("channel_state") {
  const ChannelState z = channel_state(0);
  CHECK(z.capacity == 0.0);
  CHECK(z.dispersion == 0.0);
  CHECK(channel_state(1).capacity == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(channel_state(1).dispersion == doctest::Approx(0.75 * 1.442695040888963 * 1.442695040888963));
  CHECK(channel_state(1).dispersion == doctest::Approx(1.5607).epsilon(5e-4));
  CHECK_THROWS_AS(channel_state(-0.1), DomainError);

  const double vmax = 1.442695040888963 * 1.442695040888963;
  ChannelState prev = channel_state(1e-6);
  for (double g = 1e-5; g < 1e6; g *= 1.7) {
    const ChannelState s = channel_state(g);
    CHECK(s.capacity > prev.capacity);
    CHECK(s.dispersion > prev.dispersion);
    CHECK(s.dispersion <= vmax);
    const auto o = oracle::capacity_dispersion(g);
    CHECK(s.capacity == doctest::Approx(o.c).epsilon(1e-13));
    CHECK(s.dispersion == doctest::Approx(o.v).epsilon(1e-12));
    prev = s;
  }
}

TEST_CASE("dB conversions round-trip") {
  for (double x : {1e-12, 3.7e-4, 0.5, 1.0, 2.0, 123.456, 9.9e9}) {
    CHECK(db_to_linear(linear_to_db(x)) == doctest::Approx(x).epsilon(1e-12));
    CHECK(mw_to_dbm(dbm_to_mw(linear_to_db(x))) == doctest::Approx(linear_to_db(x)).epsilon(1e-12));
  }
  for (double db : {-150.0, -3.0, 0.0, 17.5, 80.0}) {
    CHECK(linear_to_db(db_to_linear(db)) == doctest::Approx(db).epsilon(1e-12));
  }
}
