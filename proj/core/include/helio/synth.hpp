#pragma once

#include <cstdint>

#include "helio/ingest.hpp"
#include "helio/kvconfig.hpp"
#include "helio/time.hpp"

namespace helio {

struct SynthConfig {
  std::uint64_t seed = 1;
  int days = 395;
  Date start = Date{std::chrono::year{2013} / std::chrono::May / 2};
  double latitude = -33.9;
  /// Hourly AR(1) coefficient of the latent cloud process.
  double cloud_persistence = 0.95;
  double noise_sd = 0.02;
  double nwp_error_sd = 0.05;
  bool season_flip_wind = true;
  /// Forces tcc to 0 everywhere.
  bool clear_sky = false;

  void validate() const;
  static SynthConfig from_config(const KvConfig& cfg);
  KvConfig to_config() const;
};

/// max(0, sin(solar elevation)) with the hour taken as local solar time.
double clearsky(int day_of_year, double hour, double latitude_deg);

/// Fraction of clear-sky irradiance that passes a cloud cover of `tcc`.
double cloud_transmission(double tcc);

Dataset generate(const SynthConfig& cfg);

}  // namespace helio
