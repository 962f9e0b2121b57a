#pragma once

#include <vector>

namespace sfn::geometry {

inline constexpr double kSpeedOfLight = 2.99792458e8;

/// Two-site SFN seen from one receiver. Antenna 0 belongs to the reference
/// site; every power factor is relative to it and therefore non-positive.
struct SfnScenario {
  double d1_m = 5000.0;
  double alpha_prop = 2.0;
  std::vector<double> betas_db;
  double c = kSpeedOfLight;

  void validate() const;
  std::vector<double> powers_linear() const;
  std::vector<double> delays_s() const;
};

/// Received power p0 / d^alpha.
double received_power(double p0, double d, double alpha_prop);

/// Received-power difference in dB of an antenna at distance d_i relative to
/// the reference at d1. Requires d_i >= d1.
double beta_from_distances(double d_i, double d1, double alpha_prop);

/// Excess channel delay (seconds) implied by a power difference beta_db <= 0
/// for a receiver at distance d1 from the reference site.
double relative_delay(double beta_db, double d1, double alpha_prop, double c = kSpeedOfLight);

double db_to_linear(double db);
double linear_to_db(double lin);

}  // namespace sfn::geometry
