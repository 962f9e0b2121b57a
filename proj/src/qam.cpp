#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sfn/bics.hpp"

namespace sfn::bics {

namespace {
inline double bit_metric(int bit, double llr) { return bit ? -0.5 * llr : 0.5 * llr; }
inline int label_bit(unsigned label, int k, int width) { return int((label >> (width - 1 - k)) & 1U); }
}  // namespace

Qam::Qam(int order) : order_(order) {
  if (order != 4 && order != 16 && order != 64 && order != 256) {
    throw std::invalid_argument("Qam: unsupported order " + std::to_string(order));
  }
  levels_ = int(std::lround(std::sqrt(double(order))));
  bits_per_axis_ = int(std::lround(std::log2(double(levels_))));
  // Unit symbol energy: 2 * (L^2 - 1) / 3 * scale^2 == 1.
  const double scale = std::sqrt(3.0 / (2.0 * (order - 1)));
  for (int i = 0; i < levels_; ++i) {
    amplitudes_.push_back((2 * i - levels_ + 1) * scale);
    labels_.push_back(unsigned(i) ^ (unsigned(i) >> 1));
  }
}

std::vector<cd> Qam::points() const {
  std::vector<cd> pts(order_);
  for (int i = 0; i < levels_; ++i) {
    for (int q = 0; q < levels_; ++q) {
      pts[(labels_[i] << bits_per_axis_) | labels_[q]] = cd(amplitudes_[i], amplitudes_[q]);
    }
  }
  return pts;
}

cd Qam::map_symbol(std::span<const std::uint8_t> bits) const {
  if (bits.size() != std::size_t(bits_per_symbol())) throw std::invalid_argument("Qam::map_symbol: wrong bit count");
  auto axis = [&](std::size_t offset) {
    unsigned label = 0;
    for (int k = 0; k < bits_per_axis_; ++k) label = (label << 1) | (bits[offset + k] & 1U);
    // Gray decode gives the level index.
    unsigned idx = label;
    for (unsigned shift = label >> 1; shift != 0; shift >>= 1) idx ^= shift;
    return amplitudes_[idx];
  };
  return {axis(0), axis(bits_per_axis_)};
}

std::vector<cd> Qam::map(std::span<const std::uint8_t> bits) const {
  const std::size_t m = bits_per_symbol();
  if (bits.size() % m != 0) throw std::invalid_argument("Qam::map: bit count not a multiple of bits per symbol");
  std::vector<cd> out;
  out.reserve(bits.size() / m);
  for (std::size_t i = 0; i < bits.size(); i += m) out.push_back(map_symbol(bits.subspan(i, m)));
  return out;
}

void Qam::demap_axis(double y, double bias, double variance, std::span<const double> priors,
                     std::span<double> out) const {
  if (!(variance > 0.0)) throw std::domain_error("Qam::demap_axis: variance must be positive");
  const int b = bits_per_axis_;
  double best[8][2];
  for (int k = 0; k < b; ++k) best[k][0] = best[k][1] = -std::numeric_limits<double>::infinity();
  const double inv2v = 0.5 / variance;
  for (int i = 0; i < levels_; ++i) {
    const double d = y - bias * amplitudes_[i];
    double metric = -d * d * inv2v;
    if (!priors.empty()) {
      for (int k = 0; k < b; ++k) metric += bit_metric(label_bit(labels_[i], k, b), priors[k]);
    }
    for (int k = 0; k < b; ++k) {
      auto& slot = best[k][label_bit(labels_[i], k, b)];
      slot = std::max(slot, metric);
    }
  }
  for (int k = 0; k < b; ++k) out[k] = best[k][0] - best[k][1] - (priors.empty() ? 0.0 : priors[k]);
}

void Qam::demap(cd y, double bias, double variance, std::span<const double> priors, std::span<double> out) const {
  if (!(variance > 0.0)) throw std::domain_error("Qam::demap: variance must be positive");
  const int b = bits_per_axis_;
  const auto pi = priors.empty() ? priors : priors.subspan(0, b);
  const auto pq = priors.empty() ? priors : priors.subspan(b, b);
  demap_axis(y.real(), bias, 0.5 * variance, pi, out.subspan(0, b));
  demap_axis(y.imag(), bias, 0.5 * variance, pq, out.subspan(b, b));
}

Qam::AxisMoments Qam::soft_axis(std::span<const double> llrs) const {
  const int b = bits_per_axis_;
  double w[16];
  double wmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < levels_; ++i) {
    double m = 0.0;
    for (int k = 0; k < b; ++k) m += bit_metric(label_bit(labels_[i], k, b), llrs[k]);
    w[i] = m;
    wmax = std::max(wmax, m);
  }
  double z = 0.0, mean = 0.0, second = 0.0;
  for (int i = 0; i < levels_; ++i) {
    const double p = std::exp(w[i] - wmax);
    z += p;
    mean += p * amplitudes_[i];
    second += p * amplitudes_[i] * amplitudes_[i];
  }
  mean /= z;
  second /= z;
  return {mean, std::max(second - mean * mean, 0.0)};
}

Qam::SymbolMoments Qam::soft_symbol(std::span<const double> llrs) const {
  if (llrs.size() != std::size_t(bits_per_symbol())) throw std::invalid_argument("Qam::soft_symbol: wrong LLR count");
  const auto i = soft_axis(llrs.subspan(0, bits_per_axis_));
  const auto q = soft_axis(llrs.subspan(bits_per_axis_, bits_per_axis_));
  return {cd(i.mean, q.mean), i.variance + q.variance};
}

}  // namespace sfn::bics
