#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sfn/bics.hpp"
#include "sfn/stcodes.hpp"
#include "sfn/types.hpp"

namespace sfn::receiver {

// ---------------------------------------------------------------------------
// Per-subcarrier linear estimators on y = Geq s + w (real-stacked).

/// Estimates with the Gaussian model s_hat[p] = bias[p] * s[p] + e, var(e) = variance[p].
template <typename Scalar>
struct SymbolEstimate {
  VectorX<Scalar> s_hat;
  VectorX<Scalar> bias;
  VectorX<Scalar> variance;
};

/// s_hat[p] = g_p^T (v Geq Geq^T + noise_var I)^{-1} y, v = per-dimension symbol
/// variance. With v = 1 this is the textbook linear MMSE form. The bias is
/// g_p^T R^{-1} g_p and the error variance bias * (1 - v * bias).
template <typename Scalar>
SymbolEstimate<Scalar> mmse_estimate(const MatrixX<Scalar>& geq, const VectorX<Scalar>& y, Scalar noise_var,
                                     Scalar symbol_var = Scalar(1)) {
  if (y.size() != geq.rows()) throw std::invalid_argument("mmse_estimate: y has wrong length");
  if (noise_var < Scalar(0)) throw std::domain_error("mmse_estimate: negative noise variance");
  MatrixX<Scalar> r = symbol_var * geq * geq.transpose();
  r.diagonal().array() += noise_var;
  MatrixX<Scalar> filt;
  if (noise_var == Scalar(0)) {
    Eigen::FullPivLU<MatrixX<Scalar>> lu(r);
    if (!lu.isInvertible()) throw std::domain_error("mmse_estimate: singular system without noise regularization");
    filt = lu.solve(geq);
  } else {
    Eigen::LLT<MatrixX<Scalar>> llt(r);
    if (llt.info() != Eigen::Success) throw std::domain_error("mmse_estimate: covariance not positive definite");
    filt = llt.solve(geq);
  }
  SymbolEstimate<Scalar> est;
  est.s_hat = filt.transpose() * y;
  est.bias = (geq.array() * filt.array()).colwise().sum().transpose();
  est.variance = (est.bias.array() * (Scalar(1) - symbol_var * est.bias.array())).max(Scalar(0));
  return est;
}

/// Parallel interference cancellation followed by matched filtering, written
/// against the Gram matrix Geq^T Geq and z = Geq^T y:
///   s_hat[p] = (z[p] - sum_{k != p} gram(p,k) s_tilde[k]) / gram(p,p).
/// `feedback_var` holds the residual variance of each s_tilde entry (empty = 0).
template <typename Scalar>
SymbolEstimate<Scalar> pic_from_gram(const MatrixX<Scalar>& gram, const VectorX<Scalar>& z,
                                     const VectorX<Scalar>& s_tilde, const VectorX<Scalar>& feedback_var,
                                     Scalar noise_var) {
  const Eigen::Index n = gram.rows();
  if (s_tilde.size() != n || z.size() != n) throw std::invalid_argument("pic_estimate: feedback has wrong length");
  SymbolEstimate<Scalar> est;
  est.s_hat.resize(n);
  est.bias.setOnes(n);
  est.variance.resize(n);
  const VectorX<Scalar> interference = gram * s_tilde;
  for (Eigen::Index p = 0; p < n; ++p) {
    const Scalar gpp = gram(p, p);
    if (!(gpp > Scalar(0))) throw std::domain_error("pic_estimate: zero-norm column " + std::to_string(p));
    est.s_hat(p) = (z(p) - interference(p) + gpp * s_tilde(p)) / gpp;
    Scalar resid = noise_var * gpp;
    if (feedback_var.size() == n) {
      resid += (gram.row(p).array().square() * feedback_var.transpose().array()).sum() - gpp * gpp * feedback_var(p);
    }
    est.variance(p) = resid / (gpp * gpp);
  }
  return est;
}

template <typename Scalar>
SymbolEstimate<Scalar> pic_estimate(const MatrixX<Scalar>& geq, const VectorX<Scalar>& y, const VectorX<Scalar>& s_tilde,
                                    Scalar noise_var, const VectorX<Scalar>& feedback_var = {}) {
  if (y.size() != geq.rows()) throw std::invalid_argument("pic_estimate: y has wrong length");
  const MatrixX<Scalar> gram = geq.transpose() * geq;
  const VectorX<Scalar> z = geq.transpose() * y;
  return pic_from_gram<Scalar>(gram, z, s_tilde, feedback_var, noise_var);
}

/// Soft interference cancellation followed by a per-symbol MMSE filter. With
/// R = Geq diag(v) Geq^T + noise_var I the filter for p is R^{-1} g_p (the rank-one
/// correction for symbol p only rescales it), so
///   s_hat[p] = g_p^T R^{-1} (y - Geq s_tilde + g_p s_tilde[p]),
///   bias = g_p^T R^{-1} g_p,  variance = bias (1 - v[p] bias).
/// With s_tilde = 0 and v = symbol_var this reduces to mmse_estimate.
template <typename Scalar>
SymbolEstimate<Scalar> mmse_pic_estimate(const MatrixX<Scalar>& geq, const VectorX<Scalar>& y,
                                         const VectorX<Scalar>& s_tilde, const VectorX<Scalar>& feedback_var,
                                         Scalar noise_var) {
  if (y.size() != geq.rows()) throw std::invalid_argument("mmse_pic_estimate: y has wrong length");
  if (s_tilde.size() != geq.cols() || feedback_var.size() != geq.cols()) {
    throw std::invalid_argument("mmse_pic_estimate: feedback has wrong length");
  }
  if (!(noise_var > Scalar(0))) throw std::domain_error("mmse_pic_estimate: noise variance must be positive");
  MatrixX<Scalar> r = geq * feedback_var.asDiagonal() * geq.transpose();
  r.diagonal().array() += noise_var;
  const MatrixX<Scalar> filt = r.llt().solve(geq);
  const VectorX<Scalar> residual = y - geq * s_tilde;
  SymbolEstimate<Scalar> est;
  est.bias = (geq.array() * filt.array()).colwise().sum().transpose();
  est.s_hat = filt.transpose() * residual + est.bias.cwiseProduct(s_tilde);
  est.variance = (est.bias.array() * (Scalar(1) - feedback_var.array() * est.bias.array())).max(Scalar(0));
  return est;
}

/// Exhaustive minimum-distance detection over all constellation^Q vectors.
template <typename Scalar>
CVectorX<Scalar> ml_detect(const MatrixX<Scalar>& geq, const VectorX<Scalar>& y,
                           const std::vector<std::complex<Scalar>>& constellation, double max_enumeration = 1e6) {
  const int q = int(geq.cols() / 2);
  const double count = std::pow(double(constellation.size()), q);
  if (count > max_enumeration) {
    throw std::length_error("ml_detect: " + std::to_string(count) + " candidates exceed the enumeration cap");
  }
  std::vector<int> idx(q, 0);
  VectorX<Scalar> s(2 * q);
  CVectorX<Scalar> best(q);
  Scalar best_d = std::numeric_limits<Scalar>::infinity();
  while (true) {
    for (int k = 0; k < q; ++k) {
      s(2 * k) = constellation[idx[k]].real();
      s(2 * k + 1) = constellation[idx[k]].imag();
    }
    const Scalar d = (y - geq * s).squaredNorm();
    if (d < best_d) {
      best_d = d;
      for (int k = 0; k < q; ++k) best(k) = constellation[idx[k]];
    }
    int k = 0;
    while (k < q && ++idx[k] == int(constellation.size())) idx[k++] = 0;
    if (k == q) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Frame-level iterative detection and decoding.

// MmsePic cancels with a matched filter after the first pass; MmsePicMmse
// uses an MMSE filter after cancellation instead.
enum class Mode { MmseOnly, MmsePic, MmsePicMmse };

Mode parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);

struct ReceiverConfig {
  int iterations = 4;
  Mode mode = Mode::MmsePicMmse;
  // Weight on decoder extrinsics fed back to the detector; max-log-MAP
  // extrinsics are overconfident and the loop diverges at low SNR without it.
  double extrinsic_scale = 0.75;
};

/// How one codeword maps onto a frame: all subcarriers of one ST codeword
/// period, N_c * Q QAM symbols; symbol k sits on subcarrier k / Q, slot k % Q.
struct FrameLayout {
  int subcarriers = 0;
  int st_symbols = 0;       // Q
  int bits_per_symbol = 0;  // m
  int coded_bits = 0;       // subcarriers * Q * m
  int steps = 0;            // trellis length including tail
  int info_bits = 0;        // steps - tail
  int used_bits = 0;        // punctured length, <= coded_bits; the rest is zero padding
  bics::PuncturePattern pattern;

  static FrameLayout make(int subcarriers, int st_symbols, const bics::Qam& qam, bics::CodeRate rate);
};

/// Transmit side: info bits -> QAM symbols in frame order.
std::vector<cd> encode_frame(const FrameLayout& layout, const bics::ConvCode& conv, const bics::Qam& qam,
                             const bics::Interleaver& interleaver, std::span<const std::uint8_t> info);

struct TurboResult {
  Bits info;
  std::vector<Bits> per_iteration;
};

class TurboReceiver {
 public:
  TurboReceiver(FrameLayout layout, const bics::Qam& qam, const bics::Interleaver& interleaver,
                ReceiverConfig config);

  /// One Geq and one real-stacked observation per subcarrier; noise_var is per real dimension.
  TurboResult detect(std::span<const Eigen::MatrixXd> geq, std::span<const Eigen::VectorXd> y,
                     double noise_var) const;

  const ReceiverConfig& config() const { return config_; }
  const FrameLayout& layout() const { return layout_; }

 private:
  FrameLayout layout_;
  const bics::Qam& qam_;
  const bics::Interleaver& interleaver_;
  ReceiverConfig config_;
  bics::ConvCode conv_;
};

}  // namespace sfn::receiver
