#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sfn/types.hpp"

// Bit-interleaved coded modulation. LLRs are ln P(b=0)/P(b=1) throughout.
namespace sfn::bics {

// ---------------------------------------------------------------------------
// Convolutional code (133,171) octal, constraint length 7, zero-terminated.

enum class CodeRate { R1_2, R2_3, R3_4 };

CodeRate parse_code_rate(std::string_view text);
std::string_view rate_name(CodeRate rate);
double rate_value(CodeRate rate);

/// Keep-mask over the mother-code output, laid out X1 Y1 X2 Y2 ... for one
/// period of `period` trellis steps. X is the 133 branch, Y the 171 branch.
struct PuncturePattern {
  int period = 1;
  std::vector<bool> keep;

  static PuncturePattern for_rate(CodeRate rate);
  int kept_per_period() const;
};

class ConvCode {
 public:
  static constexpr int kConstraintLength = 7;
  static constexpr int kMemory = kConstraintLength - 1;
  static constexpr int kStates = 1 << kMemory;
  static constexpr std::array<unsigned, 2> kGenerators{0133, 0171};

  ConvCode();

  /// Encodes `bits` and appends kMemory zero tail bits; returns 2*(n+6) bits.
  Bits encode(std::span<const std::uint8_t> bits) const;

  int next_state(int state, int input) const { return next_[state][input]; }
  /// Two output bits packed as (x << 1) | y.
  int output(int state, int input) const { return out_[state][input]; }

 private:
  std::array<std::array<int, 2>, kStates> next_{};
  std::array<std::array<int, 2>, kStates> out_{};
};

Bits puncture(std::span<const std::uint8_t> mother, const PuncturePattern& pattern);
Llrs puncture(std::span<const double> mother, const PuncturePattern& pattern);
/// Re-inserts zero LLRs at punctured positions. `steps` is the trellis length.
Llrs depuncture(std::span<const double> llrs, const PuncturePattern& pattern, int steps);
int punctured_length(int steps, const PuncturePattern& pattern);

struct SisoOutput {
  Bits info;            // hard decisions on the steps - kMemory data bits
  Llrs info_app;        // a-posteriori LLRs on the data bits
  Llrs coded_extrinsic; // a-posteriori minus input, on all mother-code bits
};

/// Max-log-MAP (BCJR) decoder over the 64-state trellis, known start and end
/// state zero. Input is mother-code LLRs (depunctured).
SisoOutput siso_decode(const ConvCode& code, std::span<const double> coded_llrs);

// ---------------------------------------------------------------------------
// Square QAM with per-axis Gray labels. The first half of each symbol label
// drives the in-phase axis, the second half quadrature. Unit mean energy.

class Qam {
 public:
  explicit Qam(int order);

  int order() const { return order_; }
  int bits_per_symbol() const { return 2 * bits_per_axis_; }
  int bits_per_axis() const { return bits_per_axis_; }
  int levels() const { return levels_; }
  /// Amplitude of PAM level index i (ascending).
  double level(int i) const { return amplitudes_[i]; }
  /// Gray label (bits_per_axis bits, MSB first) of PAM level index i.
  unsigned label(int i) const { return labels_[i]; }
  /// Per-axis energy, 1/2 for unit-energy QAM.
  double axis_energy() const { return 0.5; }

  std::vector<cd> points() const;  // index = full label value
  cd map_symbol(std::span<const std::uint8_t> bits) const;
  std::vector<cd> map(std::span<const std::uint8_t> bits) const;

  /// Max-log extrinsic LLRs for one axis under y = bias * a + n, n ~ N(0, variance).
  void demap_axis(double y, double bias, double variance, std::span<const double> priors,
                  std::span<double> out) const;
  /// Complex wrapper: variance is the total complex noise variance (split evenly over axes).
  void demap(cd y, double bias, double variance, std::span<const double> priors, std::span<double> out) const;

  struct AxisMoments {
    double mean;
    double variance;
  };
  AxisMoments soft_axis(std::span<const double> llrs) const;
  struct SymbolMoments {
    cd mean;
    double variance;
  };
  SymbolMoments soft_symbol(std::span<const double> llrs) const;

 private:
  int order_;
  int bits_per_axis_;
  int levels_;
  std::vector<double> amplitudes_;
  std::vector<unsigned> labels_;
};

// ---------------------------------------------------------------------------

class Interleaver {
 public:
  Interleaver(int length, std::uint64_t seed);

  int length() const { return int(perm_.size()); }
  std::uint64_t seed() const { return seed_; }
  /// out[i] = in[perm[i]]
  template <typename T>
  std::vector<T> interleave(std::span<const T> in) const {
    check(in.size());
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[perm_[i]];
    return out;
  }
  template <typename T>
  std::vector<T> deinterleave(std::span<const T> in) const {
    check(in.size());
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[perm_[i]] = in[i];
    return out;
  }
  const std::vector<int>& permutation() const { return perm_; }

 private:
  void check(std::size_t n) const;
  std::uint64_t seed_;
  std::vector<int> perm_;
};

}  // namespace sfn::bics
