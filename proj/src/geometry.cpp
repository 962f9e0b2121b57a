#include "sfn/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sfn::geometry {

void SfnScenario::validate() const {
  if (!(d1_m > 0.0)) throw std::domain_error("SfnScenario: d1 must be positive");
  if (!(alpha_prop > 0.0)) throw std::domain_error("SfnScenario: alpha_prop must be positive");
  if (betas_db.empty()) throw std::domain_error("SfnScenario: no antennas");
  if (betas_db.front() != 0.0) throw std::domain_error("SfnScenario: reference antenna must be at 0 dB");
  for (double b : betas_db) {
    if (b > 0.0) throw std::domain_error("SfnScenario: beta must be <= 0 dB, got " + std::to_string(b));
  }
}

std::vector<double> SfnScenario::powers_linear() const {
  validate();
  std::vector<double> p;
  p.reserve(betas_db.size());
  for (double b : betas_db) p.push_back(db_to_linear(b));
  return p;
}

std::vector<double> SfnScenario::delays_s() const {
  validate();
  std::vector<double> d;
  d.reserve(betas_db.size());
  for (double b : betas_db) {
    d.push_back(std::isinf(b) ? INFINITY : relative_delay(b, d1_m, alpha_prop, c));
  }
  return d;
}

double received_power(double p0, double d, double alpha_prop) {
  if (!(p0 > 0.0)) throw std::domain_error("received_power: p0 must be positive");
  if (!(d > 0.0)) throw std::domain_error("received_power: distance must be positive");
  return p0 / std::pow(d, alpha_prop);
}

double beta_from_distances(double d_i, double d1, double alpha_prop) {
  if (!(d1 > 0.0)) throw std::domain_error("beta_from_distances: d1 must be positive");
  if (d_i < d1) throw std::domain_error("beta_from_distances: d_i is closer than the reference site");
  return -10.0 * alpha_prop * std::log10(d_i / d1);
}

double relative_delay(double beta_db, double d1, double alpha_prop, double c) {
  if (beta_db > 0.0) throw std::domain_error("relative_delay: beta must be <= 0 dB");
  if (!(d1 > 0.0)) throw std::domain_error("relative_delay: d1 must be positive");
  if (!(alpha_prop > 0.0)) throw std::domain_error("relative_delay: alpha_prop must be positive");
  return (std::pow(10.0, -beta_db / (10.0 * alpha_prop)) - 1.0) * d1 / c;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace sfn::geometry
