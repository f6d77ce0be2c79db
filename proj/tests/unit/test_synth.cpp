#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helio/error.hpp"
#include "helio/features.hpp"
#include "helio/ingest.hpp"
#include "helio/selection.hpp"
#include "helio/synth.hpp"
#include "test_util.hpp"

using namespace helio;
using helio::testing::day;

namespace {

std::string csv_of(const Dataset& d) {
  std::ostringstream out;
  write_csv(out, d);
  return out.str();
}

double mean_clearsky(int first_doy, int last_doy, double lat) {
  double s = 0.0;
  int n = 0;
  for (int doy = first_doy; doy <= last_doy; ++doy) {
    for (int h = 0; h < 24; ++h, ++n) s += clearsky(doy, h, lat);
  }
  return s / n;
}

}  // namespace

TEST_CASE("clear-sky proxy") {
  for (int doy : {1, 100, 200, 365}) CHECK(clearsky(doy, 0, -33.9) == 0.0);
  CHECK(clearsky(80, 12, 0.0) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(mean_clearsky(335, 365, -33.9) > mean_clearsky(152, 181, -33.9));
  CHECK(mean_clearsky(335, 365, 40.0) < mean_clearsky(152, 181, 40.0));
  for (int doy = 1; doy <= 365; doy += 7) {
    for (double h = 0; h < 24; h += 0.5) {
      const double v = clearsky(doy, h, -33.9);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(cloud_transmission(0.0) == 1.0);
  CHECK(cloud_transmission(1.0) == 0.25);
}

TEST_CASE("generation is deterministic per seed") {
  SynthConfig cfg;
  cfg.days = 20;
  const auto a = csv_of(generate(cfg));
  CHECK(a == csv_of(generate(cfg)));
  cfg.seed = 2;
  CHECK(a != csv_of(generate(cfg)));
}

TEST_CASE("noise-free clear sky power equals the clear-sky proxy") {
  SynthConfig cfg;
  cfg.days = 10;
  cfg.clear_sky = true;
  cfg.noise_sd = 0.0;
  cfg.cloud_persistence = 0.0;
  const auto d = generate(cfg);
  for (const auto& r : d.records()) {
    CHECK(*r.power == clearsky(day_of_year(r.timestamp.day()), r.timestamp.hour_of_day(), cfg.latitude));
  }
}

TEST_CASE("generated data satisfies the ingest invariants and round-trips") {
  for (std::uint64_t seed : {1u, 5u, 99u}) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.days = 45;
    cfg.noise_sd = 0.1;
    cfg.nwp_error_sd = 0.2;
    const auto d = generate(cfg);
    CHECK(d.size() == 45 * 24);
    CHECK(d.first_day() == cfg.start);
    for (const auto& r : d.records()) {
      CHECK(*r.power >= 0.0);
      CHECK(*r.power <= 1.0);
      CHECK(r.tcc >= 0.0);
      CHECK(r.tcc <= 1.0);
      CHECK(r.rh >= 0.0);
      CHECK(r.rh <= 100.0);
    }
    for (auto f : {AccumulatedField::ssrd, AccumulatedField::strd, AccumulatedField::tsr, AccumulatedField::tp}) {
      for (double v : deaccumulate(d, f).values) CHECK(v >= 0.0);
    }
    std::istringstream in(csv_of(d));
    const auto back = parse_csv(in);
    CHECK(back.size() == d.size());
    CHECK(csv_of(back) == csv_of(d));
    CHECK(assemble(back, FeatureSpec::defaults()).rows() == d.size());
  }
}

TEST_CASE("power tracks deaccumulated ssrd in daylight") {
  const auto d = generate(SynthConfig{});
  const auto ssrd = deaccumulate(d, AccumulatedField::ssrd);
  const auto mask = daylight_mask(ssrd);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!mask[i]) continue;
    x.push_back(ssrd.values[i]);
    y.push_back(*d.records()[i].power);
  }
  CHECK(pearson(x, y).r > 0.8);
}

TEST_CASE("night power is exactly zero") {
  SynthConfig cfg;
  cfg.days = 30;
  const auto d = generate(cfg);
  for (const auto& r : d.records()) {
    if (clearsky(day_of_year(r.timestamp.day()), r.timestamp.hour_of_day(), cfg.latitude) == 0.0) {
      CHECK(*r.power == 0.0);
    }
  }
}

TEST_CASE("config validation and round trip") {
  SynthConfig bad;
  bad.days = 0;
  CHECK_THROWS_AS(generate(bad), Error);
  bad = SynthConfig{};
  bad.cloud_persistence = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = SynthConfig{};
  bad.noise_sd = -1;
  CHECK_THROWS_AS(bad.validate(), Error);

  SynthConfig cfg;
  cfg.seed = 7;
  cfg.days = 400;
  cfg.start = day(2014, 1, 3);
  cfg.clear_sky = true;
  const auto back = SynthConfig::from_config(cfg.to_config());
  CHECK(back.seed == 7);
  CHECK(back.days == 400);
  CHECK(back.start == cfg.start);
  CHECK(back.clear_sky);
  CHECK(back.to_config().to_string() == cfg.to_config().to_string());
}
