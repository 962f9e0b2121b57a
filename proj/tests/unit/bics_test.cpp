#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "sfn/bics.hpp"
#include "sfn/receiver.hpp"

using namespace sfn;
using namespace sfn::bics;

namespace {

Bits random_bits(Rng& rng, std::size_t n) {
  std::bernoulli_distribution b(0.5);
  Bits out(n);
  for (auto& x : out) x = b(rng);
  return out;
}

Llrs hard_llrs(const Bits& bits, double mag) {
  Llrs l(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) l[i] = bits[i] ? -mag : mag;
  return l;
}

int label_bit(unsigned label, int k, int width) { return int((label >> (width - 1 - k)) & 1U); }

}  // namespace

TEST_CASE("convolutional encoder") {
  const ConvCode code;
  SUBCASE("all-zero input gives all-zero output") {
    const Bits zeros(100, 0);
    const Bits out = code.encode(zeros);
    CHECK(out.size() == 2 * (100 + 6));
    CHECK(std::all_of(out.begin(), out.end(), [](auto b) { return b == 0; }));
  }
  SUBCASE("impulse response equals the generator taps") {
    const Bits impulse{1, 0, 0, 0, 0, 0, 0};
    const Bits out = code.encode(impulse);
    const Bits x_expect{1, 0, 1, 1, 0, 1, 1};
    const Bits y_expect{1, 1, 1, 1, 0, 0, 1};
    for (int k = 0; k < 7; ++k) {
      CHECK(out[2 * k] == x_expect[k]);
      CHECK(out[2 * k + 1] == y_expect[k]);
    }
  }
  SUBCASE("encoder is linear over GF(2)") {
    Rng rng(1);
    const Bits a = random_bits(rng, 200), b = random_bits(rng, 200);
    Bits sum(200);
    for (int i = 0; i < 200; ++i) sum[i] = a[i] ^ b[i];
    const Bits ca = code.encode(a), cb = code.encode(b), cs = code.encode(sum);
    for (std::size_t i = 0; i < cs.size(); ++i) CHECK(cs[i] == (ca[i] ^ cb[i]));
  }
  SUBCASE("tail returns to the zero state") {
    Rng rng(2);
    const Bits a = random_bits(rng, 50);
    int s = 0;
    for (auto b : a) s = code.next_state(s, b);
    for (int k = 0; k < ConvCode::kMemory; ++k) s = code.next_state(s, 0);
    CHECK(s == 0);
  }
  CHECK_THROWS_AS(code.encode(Bits{}), std::invalid_argument);
}

TEST_CASE("puncture patterns") {
  CHECK(PuncturePattern::for_rate(CodeRate::R1_2).kept_per_period() == 2);
  const auto p23 = PuncturePattern::for_rate(CodeRate::R2_3);
  CHECK(p23.period == 2);
  CHECK(p23.keep == std::vector<bool>{true, true, false, true});
  const auto p34 = PuncturePattern::for_rate(CodeRate::R3_4);
  CHECK(p34.period == 3);
  CHECK(p34.keep == std::vector<bool>{true, true, false, true, true, false});
  for (auto r : {CodeRate::R1_2, CodeRate::R2_3, CodeRate::R3_4}) {
    const auto p = PuncturePattern::for_rate(r);
    CHECK(double(p.period) / p.kept_per_period() == doctest::Approx(rate_value(r)));
    CHECK(parse_code_rate(rate_name(r)) == r);
  }
  CHECK_THROWS_AS(parse_code_rate("5/6"), std::invalid_argument);
}

TEST_CASE("depuncture restores positions with zero LLRs") {
  const auto p = PuncturePattern::for_rate(CodeRate::R3_4);
  const int steps = 12;
  Llrs mother(2 * steps);
  std::iota(mother.begin(), mother.end(), 1.0);
  const Llrs kept = puncture(mother, p);
  CHECK(int(kept.size()) == punctured_length(steps, p));
  CHECK(kept.size() == 16);
  const Llrs back = depuncture(kept, p, steps);
  for (int i = 0; i < 2 * steps; ++i) {
    if (p.keep[i % 6]) {
      CHECK(back[i] == mother[i]);
    } else {
      CHECK(back[i] == 0.0);
    }
  }
  CHECK_THROWS_AS(depuncture(kept, p, steps + 3), std::invalid_argument);
  CHECK_THROWS_AS(puncture(Llrs(10, 0.0), p), std::invalid_argument);
  CHECK_THROWS_AS(punctured_length(7, p), std::invalid_argument);
}

TEST_CASE("noiseless code chain roundtrip for every rate") {
  const ConvCode code;
  Rng rng(3);
  for (auto r : {CodeRate::R1_2, CodeRate::R2_3, CodeRate::R3_4}) {
    const auto p = PuncturePattern::for_rate(r);
    const int steps = 6 * 1000 + 6 * p.period;  // multiple of every period, > tail
    const Bits info = random_bits(rng, steps - ConvCode::kMemory);
    const Bits kept = puncture(code.encode(info), p);
    const Llrs llr = depuncture(hard_llrs(kept, 8.0), p, steps);
    const SisoOutput out = siso_decode(code, llr);
    CHECK(out.info == info);
  }
}

TEST_CASE("siso decoder") {
  const ConvCode code;
  Rng rng(4);
  SUBCASE("confident input reproduces the codeword") {
    const Bits info = random_bits(rng, 300);
    const Bits cw = code.encode(info);
    const SisoOutput out = siso_decode(code, hard_llrs(cw, 1e6));
    CHECK(out.info == info);
    for (std::size_t i = 0; i < cw.size(); ++i) {
      const double app = out.coded_extrinsic[i] + (cw[i] ? -1e6 : 1e6);
      CHECK((app > 0) == (cw[i] == 0));
    }
  }
  SUBCASE("zero input gives zero extrinsic") {
    const SisoOutput out = siso_decode(code, Llrs(2 * 106, 0.0));
    for (double e : out.coded_extrinsic) CHECK(e == 0.0);
  }
  SUBCASE("extrinsic excludes the bit's own input") {
    const Bits info = random_bits(rng, 120);
    const Bits cw = code.encode(info);
    std::normal_distribution<double> n(0.0, 1.0);
    Llrs llr(cw.size());
    for (std::size_t i = 0; i < cw.size(); ++i) llr[i] = (cw[i] ? -2.0 : 2.0) + 2.0 * n(rng);
    const SisoOutput base = siso_decode(code, llr);
    for (std::size_t i : {std::size_t(3), std::size_t(50), std::size_t(131)}) {
      Llrs bumped = llr;
      bumped[i] += 3.7;
      const SisoOutput out = siso_decode(code, bumped);
      CHECK(out.coded_extrinsic[i] == doctest::Approx(base.coded_extrinsic[i]).epsilon(1e-9));
    }
  }
  SUBCASE("coding gain on BPSK at 4 dB") {
    const double ebn0 = std::pow(10.0, 0.4);
    const double sigma2 = 1.0 / (2.0 * 0.5 * ebn0);
    std::normal_distribution<double> n(0.0, std::sqrt(sigma2));
    long raw_err = 0, dec_err = 0, raw_bits = 0, dec_bits = 0;
    for (int f = 0; f < 20; ++f) {
      const Bits info = random_bits(rng, 1000);
      const Bits cw = code.encode(info);
      Llrs llr(cw.size());
      for (std::size_t i = 0; i < cw.size(); ++i) {
        const double y = (cw[i] ? -1.0 : 1.0) + n(rng);
        llr[i] = 2.0 * y / sigma2;
        raw_err += (y < 0) != (cw[i] == 1);
      }
      raw_bits += long(cw.size());
      const SisoOutput out = siso_decode(code, llr);
      for (std::size_t i = 0; i < info.size(); ++i) dec_err += out.info[i] != info[i];
      dec_bits += long(info.size());
    }
    const double raw = double(raw_err) / raw_bits, dec = double(dec_err) / dec_bits;
    CHECK(raw > 0.02);
    CHECK(dec < raw / 20.0);
  }
  CHECK_THROWS_AS(siso_decode(code, Llrs(13, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(siso_decode(code, Llrs(8, 0.0)), std::invalid_argument);
}

TEST_CASE("qam constellation") {
  for (int m : {4, 16, 64, 256}) {
    const Qam qam(m);
    const auto pts = qam.points();
    CHECK(int(pts.size()) == m);
    double e = 0.0;
    for (auto p : pts) e += std::norm(p);
    CHECK(e / m == doctest::Approx(1.0).epsilon(1e-12));
    // Gray: horizontally or vertically adjacent points differ in exactly one label bit.
    const double step = qam.level(1) - qam.level(0);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        if (std::abs(std::abs(pts[a] - pts[b]) - step) < 1e-9) {
          CHECK(std::popcount(unsigned(a ^ b)) == 1);
        }
      }
    }
    // Mapping from bits agrees with the label index.
    const int bps = qam.bits_per_symbol();
    for (int idx = 0; idx < m; ++idx) {
      Bits bits(bps);
      for (int k = 0; k < bps; ++k) bits[k] = label_bit(unsigned(idx), k, bps);
      CHECK(std::abs(qam.map_symbol(bits) - pts[idx]) < 1e-15);
    }
  }
  CHECK_THROWS_AS(Qam(8), std::invalid_argument);
}

TEST_CASE("qam demapper") {
  Rng rng(5);
  for (int m : {4, 16, 64, 256}) {
    const Qam qam(m);
    const int bps = qam.bits_per_symbol();
    const auto pts = qam.points();
    Llrs out(bps);

    SUBCASE("noiseless point decodes to its label") {
      for (int idx = 0; idx < m; ++idx) {
        qam.demap(pts[idx], 1.0, 1e-3, {}, out);
        for (int k = 0; k < bps; ++k) CHECK((out[k] < 0) == (label_bit(unsigned(idx), k, bps) == 1));
      }
    }
    SUBCASE("origin is neutral on the sign bits") {
      qam.demap(cd(0.0, 0.0), 1.0, 0.1, {}, out);
      CHECK(out[0] == 0.0);
      CHECK(out[bps / 2] == 0.0);
      if (m == 4) CHECK(std::all_of(out.begin(), out.end(), [](double v) { return v == 0.0; }));
    }
    SUBCASE("max-log stays within ln(M/2) of exact log-MAP") {
      std::normal_distribution<double> n(0.0, 1.0);
      for (int trial = 0; trial < 200; ++trial) {
        const double var = 0.05 + 0.5 * std::abs(n(rng));
        const double bias = 0.5 + 0.5 * std::abs(n(rng));
        const cd y = bias * pts[trial % m] + std::sqrt(var / 2) * cd(n(rng), n(rng));
        Llrs priors(bps);
        for (auto& p : priors) p = 2.0 * n(rng);
        qam.demap(y, bias, var, priors, out);
        for (int k = 0; k < bps; ++k) {
          // Exact log-sum-exp over the whole constellation, own prior excluded.
          double num = 0.0, den = 0.0;
          for (int idx = 0; idx < m; ++idx) {
            double metric = -std::norm(y - bias * pts[idx]) / var;
            for (int j = 0; j < bps; ++j) {
              if (j == k) continue;
              metric += label_bit(unsigned(idx), j, bps) ? -0.5 * priors[j] : 0.5 * priors[j];
            }
            (label_bit(unsigned(idx), k, bps) ? den : num) += std::exp(metric);
          }
          const double exact = std::log(num) - std::log(den);
          if (std::isfinite(exact)) CHECK(std::abs(out[k] - exact) <= std::log(m / 2.0) + 1e-9);
        }
      }
    }
    SUBCASE("extrinsic output ignores the bit's own prior") {
      Llrs priors(bps, 0.7), out2(bps);
      const cd y(0.3, -0.2);
      qam.demap(y, 1.0, 0.2, priors, out);
      priors[1] = -5.0;
      qam.demap(y, 1.0, 0.2, priors, out2);
      CHECK(out2[1] == doctest::Approx(out[1]).epsilon(1e-12));
    }
  }
  const Qam q16(16);
  Llrs out(4);
  CHECK_THROWS_AS(q16.demap(cd(0, 0), 1.0, 0.0, {}, out), std::domain_error);
}

TEST_CASE("soft symbol mapping") {
  Rng rng(6);
  for (int m : {4, 16, 64, 256}) {
    const Qam qam(m);
    const int bps = qam.bits_per_symbol();
    const auto pts = qam.points();
    const auto zero = qam.soft_symbol(Llrs(bps, 0.0));
    CHECK(std::abs(zero.mean) < 1e-12);
    CHECK(zero.variance == doctest::Approx(1.0).epsilon(1e-12));
    for (int idx = 0; idx < m; idx += 3) {
      Llrs l(bps);
      for (int k = 0; k < bps; ++k) l[k] = label_bit(unsigned(idx), k, bps) ? -1e3 : 1e3;
      const auto sure = qam.soft_symbol(l);
      CHECK(std::abs(sure.mean - pts[idx]) < 1e-12);
      CHECK(sure.variance < 1e-12);
    }
    // Brute-force posterior over all labels.
    std::normal_distribution<double> n(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
      Llrs l(bps);
      for (auto& v : l) v = n(rng);
      double z = 0.0, e2 = 0.0;
      cd mean(0.0, 0.0);
      for (int idx = 0; idx < m; ++idx) {
        double p = 1.0;
        for (int k = 0; k < bps; ++k) {
          const double p0 = 1.0 / (1.0 + std::exp(-l[k]));
          p *= label_bit(unsigned(idx), k, bps) ? 1.0 - p0 : p0;
        }
        z += p;
        mean += p * pts[idx];
        e2 += p * std::norm(pts[idx]);
      }
      mean /= z;
      e2 /= z;
      const auto got = qam.soft_symbol(l);
      CHECK(std::abs(got.mean - mean) < 1e-12);
      CHECK(got.variance == doctest::Approx(e2 - std::norm(mean)).epsilon(1e-10));
    }
  }
}

TEST_CASE("interleaver") {
  const Interleaver a(1000, 42), b(1000, 42), c(1000, 43);
  CHECK(a.permutation() == b.permutation());
  CHECK(a.permutation() != c.permutation());
  std::vector<int> sorted = a.permutation();
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 1000; ++i) CHECK(sorted[i] == i);
  std::vector<double> x(1000);
  std::iota(x.begin(), x.end(), 0.0);
  const auto y = a.interleave<double>(x);
  CHECK(y != x);
  CHECK(a.deinterleave<double>(y) == x);
  CHECK(a.interleave<double>(a.deinterleave<double>(x)) == x);
  CHECK_THROWS_AS(a.interleave<double>(std::vector<double>(999)), std::invalid_argument);
  CHECK_THROWS_AS(Interleaver(0, 1), std::invalid_argument);
}

TEST_CASE("full BICM chain is lossless without noise") {
  struct Pair {
    CodeRate rate;
    int qam;
  };
  const Pair pairs[] = {{CodeRate::R2_3, 64}, {CodeRate::R1_2, 16}, {CodeRate::R3_4, 256}, {CodeRate::R1_2, 64}};
  const ConvCode conv;
  Rng rng(7);
  for (const auto& pr : pairs) {
    for (int q : {2, 4, 8}) {
      const Qam qam(pr.qam);
      const auto layout = receiver::FrameLayout::make(48, q, qam, pr.rate);
      CHECK(layout.used_bits <= layout.coded_bits);
      const Interleaver il(layout.coded_bits, 9);
      const Bits info = random_bits(rng, std::size_t(layout.info_bits));
      const auto symbols = encode_frame(layout, conv, qam, il, info);
      CHECK(int(symbols.size()) * qam.bits_per_symbol() == layout.coded_bits);
      Llrs llr(layout.coded_bits);
      const int bps = qam.bits_per_symbol();
      for (std::size_t s = 0; s < symbols.size(); ++s) {
        qam.demap(symbols[s], 1.0, 1e-3, {}, std::span<double>(llr).subspan(s * bps, bps));
      }
      Llrs de = il.deinterleave<double>(llr);
      de.resize(std::size_t(layout.used_bits));
      const SisoOutput out = siso_decode(conv, depuncture(de, layout.pattern, layout.steps));
      CHECK(out.info == info);
    }
  }
}
