#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "sfn/stcodes.hpp"
#include "sfn/types.hpp"

// Real-valued equivalent of Y = H P X + W on one subcarrier:
//   y = G B F s + w = Geq s + w
// with every vector stacked by stcodes::stack_real_imag.
namespace sfn::linmodel {

/// Diagonal of B: sqrt(P_i) repeated over the 2T real entries of antenna i.
template <typename Scalar>
VectorX<Scalar> power_diagonal(std::span<const Scalar> powers, int slots) {
  VectorX<Scalar> b(2 * slots * Eigen::Index(powers.size()));
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (powers[i] < Scalar(0)) throw std::domain_error("power_diagonal: negative power");
    b.segment(Eigen::Index(i) * 2 * slots, 2 * slots).setConstant(std::sqrt(powers[i]));
  }
  return b;
}

/// G built from 2x2 rotation blocks [[hR, -hI], [hI, hR]], T per (j, i) link.
template <typename Scalar>
MatrixX<Scalar> channel_block_matrix(const CMatrixX<Scalar>& h, int slots) {
  const Eigen::Index n_rx = h.rows(), n_tx = h.cols();
  MatrixX<Scalar> g = MatrixX<Scalar>::Zero(2 * n_rx * slots, 2 * n_tx * slots);
  for (Eigen::Index j = 0; j < n_rx; ++j) {
    for (Eigen::Index i = 0; i < n_tx; ++i) {
      const Scalar re = h(j, i).real(), im = h(j, i).imag();
      for (int t = 0; t < slots; ++t) {
        const Eigen::Index r = 2 * (j * slots + t), c = 2 * (i * slots + t);
        g(r, c) = re;
        g(r, c + 1) = -im;
        g(r + 1, c) = im;
        g(r + 1, c + 1) = re;
      }
    }
  }
  return g;
}

template <typename Scalar>
struct EquivalentSystem {
  MatrixX<Scalar> g;
  VectorX<Scalar> b;  // diagonal of B
  MatrixX<Scalar> f;
  MatrixX<Scalar> geq;
  Scalar noise_var_per_dim = 0;
};

template <typename Scalar>
EquivalentSystem<Scalar> build_equivalent(const CMatrixX<Scalar>& h, std::span<const Scalar> powers,
                                          const stcodes::StCode<Scalar>& code, Scalar noise_var_per_dim = 0) {
  if (h.cols() != code.n_tx() || Eigen::Index(powers.size()) != code.n_tx()) {
    throw std::invalid_argument("build_equivalent: channel has " + std::to_string(h.cols()) + " tx columns, code needs " +
                                std::to_string(code.n_tx()));
  }
  EquivalentSystem<Scalar> sys;
  sys.g = channel_block_matrix(h, code.slots());
  sys.b = power_diagonal(powers, code.slots());
  sys.f = code.generator_matrix();
  sys.geq = sys.g * sys.b.asDiagonal() * sys.f;
  sys.noise_var_per_dim = noise_var_per_dim;
  return sys;
}

/// Geq without materializing G: column p is stack(H P X_p) for the p-th real
/// dispersion codeword. Same result as build_equivalent(...).geq.
template <typename Scalar>
MatrixX<Scalar> equivalent_matrix(const CMatrixX<Scalar>& h, std::span<const Scalar> powers,
                                  const stcodes::StCode<Scalar>& code) {
  const int q = code.symbols(), t = code.slots();
  const Eigen::Index n_rx = h.rows();
  CMatrixX<Scalar> hp = h;
  for (Eigen::Index i = 0; i < hp.cols(); ++i) hp.col(i) *= std::sqrt(powers[std::size_t(i)]);
  MatrixX<Scalar> geq(2 * n_rx * t, 2 * q);
  const std::complex<Scalar> j(0, 1);
  for (int k = 0; k < q; ++k) {
    const CMatrixX<Scalar> yu = code.norm_factor() * (hp * code.dispersion_real()[k]);
    const CMatrixX<Scalar> yv = code.norm_factor() * (hp * (j * code.dispersion_imag()[k]));
    geq.col(2 * k) = stcodes::stack_real_imag(yu);
    geq.col(2 * k + 1) = stcodes::stack_real_imag(yv);
  }
  return geq;
}

/// Y = H diag(sqrt(P)) X + W; W has variance n0 per complex entry.
template <typename Scalar>
CMatrixX<Scalar> forward_complex(const CMatrixX<Scalar>& h, std::span<const Scalar> powers, const CMatrixX<Scalar>& x,
                                 const CMatrixX<Scalar>& w) {
  if (h.cols() != x.rows() || Eigen::Index(powers.size()) != h.cols() || w.rows() != h.rows() || w.cols() != x.cols()) {
    throw std::invalid_argument("forward_complex: shape mismatch");
  }
  CMatrixX<Scalar> hp = h;
  for (Eigen::Index i = 0; i < hp.cols(); ++i) hp.col(i) *= std::sqrt(powers[std::size_t(i)]);
  return hp * x + w;
}

template <typename Scalar>
CMatrixX<Scalar> draw_noise(Rng& rng, Eigen::Index rows, Eigen::Index cols, Scalar n0) {
  std::normal_distribution<Scalar> n(Scalar(0), std::sqrt(n0 / Scalar(2)));
  CMatrixX<Scalar> w(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Scalar re = n(rng);
      const Scalar im = n(rng);
      w(r, c) = {re, im};
    }
  }
  return w;
}

template <typename Scalar>
CMatrixX<Scalar> forward_complex(const CMatrixX<Scalar>& h, std::span<const Scalar> powers, const CMatrixX<Scalar>& x,
                                 Rng& rng, Scalar n0) {
  return forward_complex(h, powers, x, draw_noise<Scalar>(rng, h.rows(), x.cols(), n0));
}

}  // namespace sfn::linmodel
