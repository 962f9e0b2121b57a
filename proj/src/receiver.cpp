#include "sfn/receiver.hpp"

#include <algorithm>

namespace sfn::receiver {

namespace {
// Floor on the demapper noise variance; the noiseless limit would divide by zero.
constexpr double kMinVariance = 1e-12;
}  // namespace

Mode parse_mode(std::string_view name) {
  if (name == "mmse") return Mode::MmseOnly;
  if (name == "mmse+pic") return Mode::MmsePic;
  if (name == "mmse+pic-mmse") return Mode::MmsePicMmse;
  throw std::invalid_argument("unknown receiver '" + std::string(name) + "' (mmse|mmse+pic|mmse+pic-mmse)");
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::MmseOnly: return "mmse";
    case Mode::MmsePic: return "mmse+pic";
    case Mode::MmsePicMmse: return "mmse+pic-mmse";
  }
  return "?";
}

FrameLayout FrameLayout::make(int subcarriers, int st_symbols, const bics::Qam& qam, bics::CodeRate rate) {
  if (subcarriers <= 0 || st_symbols <= 0) throw std::invalid_argument("FrameLayout: empty frame");
  FrameLayout l;
  l.subcarriers = subcarriers;
  l.st_symbols = st_symbols;
  l.bits_per_symbol = qam.bits_per_symbol();
  l.coded_bits = subcarriers * st_symbols * l.bits_per_symbol;
  l.pattern = bics::PuncturePattern::for_rate(rate);
  l.steps = l.coded_bits / l.pattern.kept_per_period() * l.pattern.period;
  l.info_bits = l.steps - bics::ConvCode::kMemory;
  if (l.info_bits <= 0) throw std::invalid_argument("FrameLayout: frame too short for the code");
  l.used_bits = bics::punctured_length(l.steps, l.pattern);
  return l;
}

std::vector<cd> encode_frame(const FrameLayout& layout, const bics::ConvCode& conv, const bics::Qam& qam,
                             const bics::Interleaver& interleaver, std::span<const std::uint8_t> info) {
  if (info.size() != std::size_t(layout.info_bits)) throw std::invalid_argument("encode_frame: wrong info length");
  Bits coded = bics::puncture(std::span<const std::uint8_t>(conv.encode(info)), layout.pattern);
  coded.resize(std::size_t(layout.coded_bits), 0);
  const Bits permuted = interleaver.interleave<std::uint8_t>(coded);
  return qam.map(permuted);
}

TurboReceiver::TurboReceiver(FrameLayout layout, const bics::Qam& qam, const bics::Interleaver& interleaver,
                             ReceiverConfig config)
    : layout_(std::move(layout)), qam_(qam), interleaver_(interleaver), config_(config) {
  if (config_.iterations < 1) throw std::invalid_argument("TurboReceiver: need at least one iteration");
  if (!(config_.extrinsic_scale > 0.0 && config_.extrinsic_scale <= 1.0)) {
    throw std::invalid_argument("TurboReceiver: extrinsic_scale must be in (0, 1]");
  }
  if (interleaver_.length() != layout_.coded_bits) throw std::invalid_argument("TurboReceiver: interleaver length");
}

TurboResult TurboReceiver::detect(std::span<const Eigen::MatrixXd> geq, std::span<const Eigen::VectorXd> y,
                                  double noise_var) const {
  const int nsub = layout_.subcarriers;
  const int q = layout_.st_symbols;
  const int m = layout_.bits_per_symbol;
  const int b = qam_.bits_per_axis();
  if (int(geq.size()) != nsub || int(y.size()) != nsub) throw std::invalid_argument("detect: subcarrier count");
  if (!(noise_var > 0.0)) throw std::domain_error("detect: noise variance must be positive");

  // Per-subcarrier quantities reused across iterations.
  std::vector<Eigen::MatrixXd> gram(nsub);
  std::vector<Eigen::VectorXd> z(nsub);
  std::vector<SymbolEstimate<double>> first(nsub);
  for (int n = 0; n < nsub; ++n) {
    if (geq[n].cols() != 2 * q) throw std::invalid_argument("detect: Geq column count != 2Q");
    first[n] = mmse_estimate<double>(geq[n], y[n], noise_var, qam_.axis_energy());
    if (config_.mode == Mode::MmsePic && config_.iterations > 1) {
      gram[n] = geq[n].transpose() * geq[n];
      z[n] = geq[n].transpose() * y[n];
    }
  }

  const std::size_t nbits = std::size_t(layout_.coded_bits);
  Llrs priors(nbits, 0.0);  // decoder extrinsic, interleaved (channel) order
  Llrs demapped(nbits, 0.0);
  TurboResult result;
  Eigen::VectorXd s_tilde(2 * q), s_var(2 * q);

  for (int it = 0; it < config_.iterations; ++it) {
    const bool use_pic = it > 0 && config_.mode != Mode::MmseOnly;
    for (int n = 0; n < nsub; ++n) {
      SymbolEstimate<double> pic;
      if (use_pic) {
        for (int k = 0; k < q; ++k) {
          const std::size_t base = std::size_t((n * q + k) * m);
          for (int axis = 0; axis < 2; ++axis) {
            const auto mom = qam_.soft_axis(std::span<const double>(priors).subspan(base + axis * b, b));
            s_tilde(2 * k + axis) = mom.mean;
            s_var(2 * k + axis) = mom.variance;
          }
        }
        pic = config_.mode == Mode::MmsePic ? pic_from_gram<double>(gram[n], z[n], s_tilde, s_var, noise_var)
                                            : mmse_pic_estimate<double>(geq[n], y[n], s_tilde, s_var, noise_var);
      }
      const SymbolEstimate<double>& est = use_pic ? pic : first[n];
      for (int k = 0; k < q; ++k) {
        const std::size_t base = std::size_t((n * q + k) * m);
        for (int axis = 0; axis < 2; ++axis) {
          const int p = 2 * k + axis;
          const std::size_t off = base + std::size_t(axis * b);
          const auto prior = it == 0 ? std::span<const double>() : std::span<const double>(priors).subspan(off, b);
          qam_.demap_axis(est.s_hat(p), est.bias(p), std::max(est.variance(p), kMinVariance), prior,
                          std::span<double>(demapped).subspan(off, b));
        }
      }
    }

    Llrs coded = interleaver_.deinterleave<double>(demapped);
    coded.resize(std::size_t(layout_.used_bits));
    const Llrs mother = bics::depuncture(coded, layout_.pattern, layout_.steps);
    bics::SisoOutput dec = bics::siso_decode(conv_, mother);
    result.per_iteration.push_back(dec.info);

    if (it + 1 < config_.iterations) {
      Llrs ext = bics::puncture(std::span<const double>(dec.coded_extrinsic), layout_.pattern);
      for (double& v : ext) v *= config_.extrinsic_scale;
      ext.resize(nbits, 0.0);
      priors = interleaver_.interleave<double>(ext);
    }
  }
  result.info = result.per_iteration.back();
  return result;
}

}  // namespace sfn::receiver
