#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sfn/bics.hpp"

namespace sfn::bics {

namespace {
constexpr double kNeg = -1e30;
constexpr double kLlrCap = 1e4;

// Difference of two max-log metrics; a side that no path reaches saturates.
double metric_diff(double m0, double m1) {
  if (m1 <= 0.5 * kNeg) return kLlrCap;
  if (m0 <= 0.5 * kNeg) return -kLlrCap;
  return m0 - m1;
}

double extrinsic(double m0, double m1, double in) {
  const double app = metric_diff(m0, m1);
  return std::abs(app) == kLlrCap ? app : app - in;
}

// Metric contribution of a bit with value `bit` under LLR `llr` = ln P0/P1.
inline double bit_metric(int bit, double llr) { return bit ? -0.5 * llr : 0.5 * llr; }
}  // namespace

CodeRate parse_code_rate(std::string_view text) {
  if (text == "1/2") return CodeRate::R1_2;
  if (text == "2/3") return CodeRate::R2_3;
  if (text == "3/4") return CodeRate::R3_4;
  throw std::invalid_argument("unknown code rate '" + std::string(text) + "' (1/2|2/3|3/4)");
}

std::string_view rate_name(CodeRate rate) {
  switch (rate) {
    case CodeRate::R1_2: return "1/2";
    case CodeRate::R2_3: return "2/3";
    case CodeRate::R3_4: return "3/4";
  }
  return "?";
}

double rate_value(CodeRate rate) {
  switch (rate) {
    case CodeRate::R1_2: return 0.5;
    case CodeRate::R2_3: return 2.0 / 3.0;
    case CodeRate::R3_4: return 0.75;
  }
  return 0.0;
}

PuncturePattern PuncturePattern::for_rate(CodeRate rate) {
  // DVB-T patterns: 2/3 keeps X1 Y1 Y2, 3/4 keeps X1 Y1 Y2 X3.
  switch (rate) {
    case CodeRate::R1_2: return {1, {true, true}};
    case CodeRate::R2_3: return {2, {true, true, false, true}};
    case CodeRate::R3_4: return {3, {true, true, false, true, true, false}};
  }
  throw std::logic_error("unknown code rate");
}

int PuncturePattern::kept_per_period() const { return int(std::count(keep.begin(), keep.end(), true)); }

ConvCode::ConvCode() {
  for (int s = 0; s < kStates; ++s) {
    for (int u = 0; u < 2; ++u) {
      // Register bit 6 holds the current input, bit 5 the previous one, ...
      const unsigned reg = (unsigned(u) << kMemory) | unsigned(s);
      const int x = std::popcount(reg & kGenerators[0]) & 1;
      const int y = std::popcount(reg & kGenerators[1]) & 1;
      next_[s][u] = int(reg >> 1);
      out_[s][u] = (x << 1) | y;
    }
  }
}

Bits ConvCode::encode(std::span<const std::uint8_t> bits) const {
  if (bits.empty()) throw std::invalid_argument("ConvCode::encode: empty input");
  Bits out;
  out.reserve(2 * (bits.size() + kMemory));
  int state = 0;
  auto step = [&](int u) {
    const int o = out_[state][u];
    out.push_back(std::uint8_t(o >> 1));
    out.push_back(std::uint8_t(o & 1));
    state = next_[state][u];
  };
  for (auto b : bits) step(b & 1);
  for (int i = 0; i < kMemory; ++i) step(0);
  return out;
}

namespace {
void check_pattern(std::size_t mother, const PuncturePattern& p) {
  const std::size_t block = p.keep.size();
  if (block != std::size_t(2 * p.period)) throw std::invalid_argument("puncture: malformed pattern");
  if (mother % block != 0) {
    throw std::invalid_argument("puncture: mother length " + std::to_string(mother) +
                                " is not a multiple of the pattern block " + std::to_string(block));
  }
}

template <typename T>
std::vector<T> puncture_impl(std::span<const T> mother, const PuncturePattern& p) {
  check_pattern(mother.size(), p);
  std::vector<T> out;
  out.reserve(mother.size());
  for (std::size_t i = 0; i < mother.size(); ++i) {
    if (p.keep[i % p.keep.size()]) out.push_back(mother[i]);
  }
  return out;
}
}  // namespace

Bits puncture(std::span<const std::uint8_t> mother, const PuncturePattern& pattern) {
  return puncture_impl(mother, pattern);
}

Llrs puncture(std::span<const double> mother, const PuncturePattern& pattern) {
  return puncture_impl(mother, pattern);
}

int punctured_length(int steps, const PuncturePattern& pattern) {
  if (steps % pattern.period != 0) {
    throw std::invalid_argument("punctured_length: steps not a multiple of the puncture period");
  }
  return steps / pattern.period * pattern.kept_per_period();
}

Llrs depuncture(std::span<const double> llrs, const PuncturePattern& pattern, int steps) {
  const std::size_t mother = std::size_t(2 * steps);
  check_pattern(mother, pattern);
  if (llrs.size() != std::size_t(punctured_length(steps, pattern))) {
    throw std::invalid_argument("depuncture: got " + std::to_string(llrs.size()) + " LLRs, pattern expects " +
                                std::to_string(punctured_length(steps, pattern)));
  }
  Llrs out(mother, 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < mother; ++i) {
    if (pattern.keep[i % pattern.keep.size()]) out[i] = llrs[k++];
  }
  return out;
}

SisoOutput siso_decode(const ConvCode& code, std::span<const double> coded_llrs) {
  constexpr int S = ConvCode::kStates;
  if (coded_llrs.size() % 2 != 0 || coded_llrs.size() < std::size_t(2 * (ConvCode::kMemory + 1))) {
    throw std::invalid_argument("siso_decode: LLR length " + std::to_string(coded_llrs.size()) +
                                " is not a whole number of trellis steps");
  }
  const int steps = int(coded_llrs.size() / 2);

  // Branch metric per step for the four output pairs (x,y).
  std::vector<std::array<double, 4>> gamma(steps);
  for (int k = 0; k < steps; ++k) {
    const double lx = coded_llrs[2 * k], ly = coded_llrs[2 * k + 1];
    for (int o = 0; o < 4; ++o) gamma[k][o] = bit_metric(o >> 1, lx) + bit_metric(o & 1, ly);
  }

  std::vector<std::array<double, S>> alpha(steps + 1);
  alpha[0].fill(kNeg);
  alpha[0][0] = 0.0;
  for (int k = 0; k < steps; ++k) {
    auto& next = alpha[k + 1];
    next.fill(kNeg);
    for (int s = 0; s < S; ++s) {
      const double a = alpha[k][s];
      if (a <= kNeg) continue;
      for (int u = 0; u < 2; ++u) {
        const int ns = code.next_state(s, u);
        next[ns] = std::max(next[ns], a + gamma[k][code.output(s, u)]);
      }
    }
    const double m = *std::max_element(next.begin(), next.end());
    for (auto& v : next) v = v <= kNeg ? kNeg : v - m;
  }

  std::array<double, S> beta;
  beta.fill(kNeg);
  beta[0] = 0.0;
  SisoOutput out;
  const int data = steps - ConvCode::kMemory;
  out.info.assign(std::max(data, 0), 0);
  out.info_app.assign(std::max(data, 0), 0.0);
  out.coded_extrinsic.assign(coded_llrs.size(), 0.0);

  for (int k = steps - 1; k >= 0; --k) {
    double best_u[2] = {kNeg, kNeg}, best_x[2] = {kNeg, kNeg}, best_y[2] = {kNeg, kNeg};
    std::array<double, S> prev;
    prev.fill(kNeg);
    for (int s = 0; s < S; ++s) {
      for (int u = 0; u < 2; ++u) {
        const int ns = code.next_state(s, u);
        const int o = code.output(s, u);
        const double gb = gamma[k][o] + beta[ns];
        prev[s] = std::max(prev[s], gb);
        const double total = alpha[k][s] + gb;
        best_u[u] = std::max(best_u[u], total);
        best_x[o >> 1] = std::max(best_x[o >> 1], total);
        best_y[o & 1] = std::max(best_y[o & 1], total);
      }
    }
    const double m = *std::max_element(prev.begin(), prev.end());
    for (auto& v : prev) v = v <= kNeg ? kNeg : v - m;
    beta = prev;

    if (k < data) {
      out.info_app[k] = metric_diff(best_u[0], best_u[1]);
      out.info[k] = out.info_app[k] < 0.0 ? 1 : 0;
    }
    out.coded_extrinsic[2 * k] = extrinsic(best_x[0], best_x[1], coded_llrs[2 * k]);
    out.coded_extrinsic[2 * k + 1] = extrinsic(best_y[0], best_y[1], coded_llrs[2 * k + 1]);
  }
  return out;
}

}  // namespace sfn::bics
