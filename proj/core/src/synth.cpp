#include "helio/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "helio/error.hpp"
#include "helio/seeding.hpp"
#include "helio/text.hpp"

namespace helio {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
// Peak hourly surface irradiance, J/m^2.
constexpr double kPeakSsrd = 3.6e6;
constexpr double kPeakTsr = 4.4e6;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void SynthConfig::validate() const {
  if (days < 1) raise(ErrorCode::BadConfig, "days must be at least 1");
  if (!(cloud_persistence >= 0.0 && cloud_persistence < 1.0)) {
    raise(ErrorCode::BadConfig, "cloud_persistence must lie in [0, 1)");
  }
  if (!(latitude >= -90.0 && latitude <= 90.0)) raise(ErrorCode::BadConfig, "latitude must lie in [-90, 90]");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) raise(ErrorCode::BadConfig, "noise_sd must be non-negative");
  if (!(nwp_error_sd >= 0.0) || !std::isfinite(nwp_error_sd)) {
    raise(ErrorCode::BadConfig, "nwp_error_sd must be non-negative");
  }
}

SynthConfig SynthConfig::from_config(const KvConfig& cfg) {
  SynthConfig c;
  c.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(c.seed)));
  c.days = static_cast<int>(cfg.get_int("days", c.days));
  if (cfg.has("start")) c.start = parse_date(cfg.require("start"));
  c.latitude = cfg.get_double("latitude", c.latitude);
  c.cloud_persistence = cfg.get_double("cloud_persistence", c.cloud_persistence);
  c.noise_sd = cfg.get_double("noise_sd", c.noise_sd);
  c.nwp_error_sd = cfg.get_double("nwp_error_sd", c.nwp_error_sd);
  c.season_flip_wind = cfg.get_bool("season_flip_wind", c.season_flip_wind);
  c.clear_sky = cfg.get_bool("clear_sky", c.clear_sky);
  c.validate();
  return c;
}

KvConfig SynthConfig::to_config() const {
  KvConfig cfg;
  cfg.set("seed", std::to_string(seed));
  cfg.set("days", std::to_string(days));
  cfg.set("start", format_date(start));
  cfg.set("latitude", format_double(latitude));
  cfg.set("cloud_persistence", format_double(cloud_persistence));
  cfg.set("noise_sd", format_double(noise_sd));
  cfg.set("nwp_error_sd", format_double(nwp_error_sd));
  cfg.set("season_flip_wind", season_flip_wind ? "true" : "false");
  cfg.set("clear_sky", clear_sky ? "true" : "false");
  return cfg;
}

double clearsky(int day_of_year, double hour, double latitude_deg) {
  const double decl = 23.45 * kDeg * std::sin(2.0 * std::numbers::pi * (284.0 + day_of_year) / 365.0);
  const double omega = 15.0 * kDeg * (hour - 12.0);
  const double lat = latitude_deg * kDeg;
  const double s = std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(omega);
  return std::clamp(s, 0.0, 1.0);
}

double cloud_transmission(double tcc) { return 1.0 - 0.75 * tcc * tcc * tcc; }

Dataset generate(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<WeatherRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.days) * 24);

  const double phi = cfg.cloud_persistence;
  const double innov = std::sqrt(1.0 - phi * phi);
  double cloud = 0.0;     // latent cloud state, unit variance
  double pressure = 0.0;  // latent pressure anomaly
  double wind_u = 0.0;
  double wind_v = 0.0;
  bool first = true;

  for (int k = 0; k < cfg.days; ++k) {
    const Date day = cfg.start + std::chrono::days(k);
    Rng rng(derive_seed(cfg.seed, "synth", static_cast<std::int64_t>(day.time_since_epoch().count())));
    const int doy = day_of_year(day);
    // +1 in the southern summer, -1 in the southern winter (mirrored north of the equator).
    const double season = std::cos(2.0 * std::numbers::pi * (doy + 10) / 365.25) * (cfg.latitude < 0 ? 1.0 : -1.0);
    const double flip = cfg.season_flip_wind && season < 0.0 ? -1.0 : 1.0;
    if (first) {
      cloud = rng.normal();
      pressure = rng.normal();
      first = false;
    }
    double ssrd_acc = 0.0, strd_acc = 0.0, tsr_acc = 0.0, tp_acc = 0.0;
    const double t_mean = 291.0 + 6.0 * season;
    for (int h = 0; h < 24; ++h) {
      cloud = phi * cloud + innov * rng.normal();
      pressure = 0.98 * pressure + std::sqrt(1.0 - 0.98 * 0.98) * rng.normal();
      const double tcc = cfg.clear_sky ? 0.0 : logistic(1.6 * cloud - 0.4 * season);
      const double cs = clearsky(doy, h, cfg.latitude);
      const double trans = cloud_transmission(tcc);

      WeatherRecord r;
      r.timestamp = UtcHour(day, h);

      double power = cs * trans;
      if (cs > 0.0 && cfg.noise_sd > 0.0) power += rng.normal(0.0, cfg.noise_sd);
      r.power = cs > 0.0 ? std::clamp(power, 0.0, 1.0) : 0.0;

      // Forecast fields: truth plus independent errors.
      const double err = cfg.nwp_error_sd;
      const double tcc_nwp = cfg.clear_sky ? 0.0 : std::clamp(tcc + (err > 0.0 ? rng.normal(0.0, err) : 0.0), 0.0, 1.0);
      const double ssrd_frac =
          cs > 0.0 ? std::clamp(cs * trans + (err > 0.0 ? rng.normal(0.0, err) * cs : 0.0), 0.0, 1.0) : 0.0;
      r.tcc = tcc_nwp;
      r.tclw = 0.4 * tcc_nwp * tcc_nwp + 0.02 * std::abs(rng.normal());
      r.tciw = 0.1 * tcc_nwp * (1.0 - season) / 2.0 + 0.005 * std::abs(rng.normal());
      r.sp = 101325.0 + 800.0 * pressure - 300.0 * tcc;

      const double diurnal = std::sin(2.0 * std::numbers::pi * (h - 9.0) / 24.0);
      r.t2m = t_mean + 5.0 * diurnal * (1.0 - 0.5 * tcc) + rng.normal(0.0, 0.5);
      r.rh = std::clamp(55.0 + 30.0 * tcc - 12.0 * diurnal + rng.normal(0.0, 3.0), 5.0, 100.0);

      // Wind speed tracks clear skies in summer and cloudy skies in winter.
      const double target_speed = std::max(0.5, 4.0 + 3.0 * flip * (0.5 - tcc));
      const double dir = 2.0 * std::numbers::pi * (0.3 + 0.1 * season) + 0.3 * rng.normal();
      wind_u = 0.7 * wind_u + 0.3 * target_speed * std::cos(dir);
      wind_v = 0.7 * wind_v + 0.3 * target_speed * std::sin(dir);
      r.u10 = wind_u;
      r.v10 = wind_v;

      ssrd_acc += kPeakSsrd * ssrd_frac;
      strd_acc += 1.1e6 + 4.0e5 * tcc_nwp + 2.0e4 * (r.t2m - 288.0);
      tsr_acc += kPeakTsr * cs * (1.0 - 0.5 * tcc_nwp);
      if (tcc > 0.8) tp_acc += 4e-4 * (tcc - 0.8) * (1.0 + std::abs(rng.normal()));
      r.ssrd_acc = ssrd_acc;
      r.strd_acc = strd_acc;
      r.tsr_acc = tsr_acc;
      r.tp_acc = tp_acc;
      records.push_back(r);
    }
  }
  return Dataset(std::move(records));
}

}  // namespace helio
