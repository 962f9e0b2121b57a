#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sfn/types.hpp"

namespace sfn::channel {

enum class ChannelKind { RayleighIid, Tu6 };

ChannelKind parse_channel_kind(std::string_view name);
std::string_view channel_name(ChannelKind kind);

/// Tapped-delay-line power profile; powers are linear and sum to one.
struct TapProfile {
  std::vector<double> delays_s;
  std::vector<double> powers;

  static TapProfile from_db(std::vector<double> delays_s, std::span<const double> powers_db);
  double max_delay() const;
};

/// COST 207 Typical Urban, 6 taps.
TapProfile tu6_profile();

/// Frequency-domain gains for one quasi-static block: one (n_rx x n_tx)
/// matrix per subcarrier, unit mean power per link.
struct ChannelRealization {
  std::vector<Eigen::MatrixXcd> h;
  long block = 0;

  int subcarriers() const { return int(h.size()); }
  const Eigen::MatrixXcd& at(int n) const { return h[std::size_t(n)]; }
};

ChannelRealization draw_rayleigh(Rng& rng, int n_rx, int n_tx, int n_sub);

/// h[n](j,i) = sum_l a_l exp(-j 2 pi n spacing (tau_l + offset_i)), a_l independent
/// circular Gaussian with the profile's power. Offsets are per transmit antenna.
/// Prints a warning when the longest delayed tap exceeds `guard_s` (if > 0).
ChannelRealization draw_tapped(Rng& rng, int n_rx, int n_tx, int n_sub, const TapProfile& profile,
                               double spacing_hz, std::span<const double> tx_offsets_s, double guard_s = 0.0);

ChannelRealization draw_tu6(Rng& rng, int n_rx, int n_tx, int n_sub, double spacing_hz,
                            std::span<const double> tx_offsets_s, double guard_s = 0.0);

/// Unit-variance circularly-symmetric complex Gaussian.
cd complex_gaussian(Rng& rng);

}  // namespace sfn::channel
