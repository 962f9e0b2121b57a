#include "sfn/channel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sfn::channel {

ChannelKind parse_channel_kind(std::string_view name) {
  if (name == "rayleigh") return ChannelKind::RayleighIid;
  if (name == "tu6") return ChannelKind::Tu6;
  throw std::invalid_argument("unknown channel '" + std::string(name) + "' (rayleigh|tu6)");
}

std::string_view channel_name(ChannelKind kind) {
  return kind == ChannelKind::RayleighIid ? "rayleigh" : "tu6";
}

TapProfile TapProfile::from_db(std::vector<double> delays_s, std::span<const double> powers_db) {
  if (delays_s.size() != powers_db.size() || delays_s.empty()) {
    throw std::invalid_argument("TapProfile: delays and powers must be non-empty and equal length");
  }
  TapProfile p;
  p.delays_s = std::move(delays_s);
  for (double db : powers_db) p.powers.push_back(std::pow(10.0, db / 10.0));
  const double total = std::accumulate(p.powers.begin(), p.powers.end(), 0.0);
  for (double& v : p.powers) v /= total;
  return p;
}

double TapProfile::max_delay() const { return *std::max_element(delays_s.begin(), delays_s.end()); }

TapProfile tu6_profile() {
  static const double kPowersDb[] = {-3.0, 0.0, -2.0, -6.0, -8.0, -10.0};
  return TapProfile::from_db({0.0, 0.2e-6, 0.5e-6, 1.6e-6, 2.3e-6, 5.0e-6}, kPowersDb);
}

cd complex_gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

ChannelRealization draw_rayleigh(Rng& rng, int n_rx, int n_tx, int n_sub) {
  ChannelRealization r;
  r.h.resize(std::size_t(n_sub));
  for (auto& m : r.h) {
    m.resize(n_rx, n_tx);
    for (int j = 0; j < n_rx; ++j)
      for (int i = 0; i < n_tx; ++i) m(j, i) = complex_gaussian(rng);
  }
  return r;
}

ChannelRealization draw_tapped(Rng& rng, int n_rx, int n_tx, int n_sub, const TapProfile& profile,
                               double spacing_hz, std::span<const double> tx_offsets_s, double guard_s) {
  if (!tx_offsets_s.empty() && tx_offsets_s.size() != std::size_t(n_tx)) {
    throw std::invalid_argument("draw_tapped: need one delay offset per transmit antenna");
  }
  auto offset = [&](int i) { return tx_offsets_s.empty() ? 0.0 : tx_offsets_s[std::size_t(i)]; };
  if (guard_s > 0.0) {
    double worst = 0.0;
    for (int i = 0; i < n_tx; ++i) worst = std::max(worst, profile.max_delay() + offset(i));
    if (worst >= guard_s) {
      std::cerr << "warning: channel excess delay " << worst << " s exceeds guard interval " << guard_s << " s\n";
    }
  }

  ChannelRealization r;
  r.h.assign(std::size_t(n_sub), Eigen::MatrixXcd::Zero(n_rx, n_tx));
  const std::size_t taps = profile.delays_s.size();
  std::vector<cd> gains(taps);
  for (int j = 0; j < n_rx; ++j) {
    for (int i = 0; i < n_tx; ++i) {
      for (std::size_t l = 0; l < taps; ++l) gains[l] = std::sqrt(profile.powers[l]) * complex_gaussian(rng);
      for (std::size_t l = 0; l < taps; ++l) {
        const double phase_step = -2.0 * std::numbers::pi * spacing_hz * (profile.delays_s[l] + offset(i));
        for (int n = 0; n < n_sub; ++n) r.h[std::size_t(n)](j, i) += gains[l] * std::polar(1.0, phase_step * n);
      }
    }
  }
  return r;
}

ChannelRealization draw_tu6(Rng& rng, int n_rx, int n_tx, int n_sub, double spacing_hz,
                            std::span<const double> tx_offsets_s, double guard_s) {
  return draw_tapped(rng, n_rx, n_tx, n_sub, tu6_profile(), spacing_hz, tx_offsets_s, guard_s);
}

}  // namespace sfn::channel
