#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sfn/types.hpp"

namespace sfn::stcodes {

enum class CodeKind { Alamouti, SpatialMultiplexing, Golden, ThreeD };

CodeKind parse_code_kind(std::string_view name);
std::string_view code_name(CodeKind kind);

template <typename Scalar>
struct GoldenConstants {
  using C = std::complex<Scalar>;
  Scalar theta = (Scalar(1) + std::sqrt(Scalar(5))) / Scalar(2);
  Scalar theta_bar = Scalar(1) - theta;
  C alpha = C(1, Scalar(1) - theta);
  C alpha_bar = C(1, Scalar(1) - theta_bar);
  Scalar scale = Scalar(1) / std::sqrt(Scalar(5));
};

namespace detail {

// Golden codeword for four symbols, without the 1/sqrt(5) factor.
template <typename Scalar>
CMatrixX<Scalar> golden_block(const std::complex<Scalar>& a, const std::complex<Scalar>& b,
                              const std::complex<Scalar>& c, const std::complex<Scalar>& d) {
  using C = std::complex<Scalar>;
  const GoldenConstants<Scalar> g;
  CMatrixX<Scalar> x(2, 2);
  x(0, 0) = g.alpha * (a + g.theta * b);
  x(0, 1) = g.alpha * (c + g.theta * d);
  x(1, 0) = C(0, 1) * g.alpha_bar * (c + g.theta_bar * d);
  x(1, 1) = g.alpha_bar * (a + g.theta_bar * b);
  return x;
}

// Codeword built straight from the code structure (before normalization).
template <typename Scalar>
CMatrixX<Scalar> structural_codeword(CodeKind kind, const CVectorX<Scalar>& s) {
  const GoldenConstants<Scalar> g;
  switch (kind) {
    case CodeKind::Alamouti: {
      CMatrixX<Scalar> x(2, 2);
      x << s(0), -std::conj(s(1)),
           s(1), std::conj(s(0));
      return x;
    }
    case CodeKind::SpatialMultiplexing: {
      CMatrixX<Scalar> x(2, 1);
      x << s(0), s(1);
      return x;
    }
    case CodeKind::Golden:
      return g.scale * golden_block<Scalar>(s(0), s(1), s(2), s(3));
    case CodeKind::ThreeD: {
      // Inter-site Alamouti over intra-site Golden blocks: [[G1, G2], [-G2*, G1*]].
      // The printed 4x4 layout differs entry-wise (theta in the second row,
      // swapped s1/s3 in the last row); this is the consistent structure.
      const CMatrixX<Scalar> g1 = g.scale * golden_block<Scalar>(s(0), s(1), s(2), s(3));
      const CMatrixX<Scalar> g2 = g.scale * golden_block<Scalar>(s(4), s(5), s(6), s(7));
      CMatrixX<Scalar> x(4, 4);
      x.topLeftCorner(2, 2) = g1;
      x.topRightCorner(2, 2) = g2;
      x.bottomLeftCorner(2, 2) = -g2.conjugate();
      x.bottomRightCorner(2, 2) = g1.conjugate();
      return x;
    }
  }
  throw std::logic_error("unknown code kind");
}

}  // namespace detail

/// Linear space-time block code held as dispersion matrices:
///   X = norm * sum_q (Re(s_q) U_q + j Im(s_q) V_q).
/// Rows of X are transmit antennas, columns are time slots.
template <typename Scalar>
class StCode {
 public:
  using C = std::complex<Scalar>;

  explicit StCode(CodeKind kind) : kind_(kind) {
    switch (kind) {
      case CodeKind::Alamouti: n_tx_ = 2; q_ = 2; t_ = 2; break;
      case CodeKind::SpatialMultiplexing: n_tx_ = 2; q_ = 2; t_ = 1; break;
      case CodeKind::Golden: n_tx_ = 2; q_ = 4; t_ = 2; break;
      case CodeKind::ThreeD: n_tx_ = 4; q_ = 8; t_ = 4; break;
    }
    // Every structural codeword has unit mean energy per entry for unit-energy
    // symbols, so dividing by sqrt(n_tx) gives unit radiated power per slot.
    norm_ = Scalar(1) / std::sqrt(Scalar(n_tx_));
    for (int q = 0; q < q_; ++q) {
      CVectorX<Scalar> e = CVectorX<Scalar>::Zero(q_);
      e(q) = C(1, 0);
      disp_u_.push_back(detail::structural_codeword<Scalar>(kind_, e));
      e(q) = C(0, 1);
      disp_v_.push_back(detail::structural_codeword<Scalar>(kind_, e) * C(0, -1));
    }
    build_generator();
  }

  CodeKind kind() const { return kind_; }
  std::string_view name() const { return code_name(kind_); }
  int n_tx() const { return n_tx_; }
  int symbols() const { return q_; }
  int slots() const { return t_; }
  Scalar rate() const { return Scalar(q_) / Scalar(t_); }
  Scalar norm_factor() const { return norm_; }
  const std::vector<CMatrixX<Scalar>>& dispersion_real() const { return disp_u_; }
  const std::vector<CMatrixX<Scalar>>& dispersion_imag() const { return disp_v_; }

  /// Real generator F with stack(X) = F * stack(s), stacking per stack_real_imag.
  const MatrixX<Scalar>& generator_matrix() const { return f_; }

  CMatrixX<Scalar> encode(const CVectorX<Scalar>& s) const {
    if (s.size() != q_) {
      throw std::invalid_argument("StCode::encode: expected " + std::to_string(q_) + " symbols, got " +
                                  std::to_string(s.size()));
    }
    CMatrixX<Scalar> x = CMatrixX<Scalar>::Zero(n_tx_, t_);
    for (int q = 0; q < q_; ++q) {
      x += s(q).real() * disp_u_[q] + C(0, s(q).imag()) * disp_v_[q];
    }
    return norm_ * x;
  }

 private:
  void build_generator() {
    f_.setZero(2 * n_tx_ * t_, 2 * q_);
    for (int q = 0; q < q_; ++q) {
      for (int i = 0; i < n_tx_; ++i) {
        for (int t = 0; t < t_; ++t) {
          const int row = 2 * (i * t_ + t);
          const C u = norm_ * disp_u_[q](i, t);
          const C v = norm_ * C(0, 1) * disp_v_[q](i, t);
          f_(row, 2 * q) = u.real();
          f_(row + 1, 2 * q) = u.imag();
          f_(row, 2 * q + 1) = v.real();
          f_(row + 1, 2 * q + 1) = v.imag();
        }
      }
    }
  }

  CodeKind kind_;
  int n_tx_ = 0;
  int q_ = 0;
  int t_ = 0;
  Scalar norm_ = 1;
  std::vector<CMatrixX<Scalar>> disp_u_;
  std::vector<CMatrixX<Scalar>> disp_v_;
  MatrixX<Scalar> f_;
};

/// Row-wise real/imaginary interleaved stacking:
/// [Re x(0,0), Im x(0,0), Re x(0,1), Im x(0,1), ...].
template <typename Derived>
VectorX<typename Derived::Scalar::value_type> stack_real_imag(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar::value_type;
  VectorX<Scalar> out(2 * m.size());
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out(k++) = m(r, c).real();
      out(k++) = m(r, c).imag();
    }
  }
  return out;
}

/// Inverse of stack_real_imag for a column vector of complex values.
template <typename Derived>
CVectorX<typename Derived::Scalar> unstack_real_imag(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  CVectorX<Scalar> out(v.size() / 2);
  for (Eigen::Index q = 0; q < out.size(); ++q) out(q) = std::complex<Scalar>(v(2 * q), v(2 * q + 1));
  return out;
}

/// Minimum over distinct codeword pairs of det(D D^H), D = X_a - X_b. For square
/// codes this is |det(D)|^2. Enumerates symbol differences (the code is linear).
template <typename Scalar>
Scalar min_det_difference(const StCode<Scalar>& code, const std::vector<std::complex<Scalar>>& constellation,
                          double max_enumeration = 1e6) {
  using C = std::complex<Scalar>;
  std::vector<C> diffs;
  for (const auto& a : constellation) {
    for (const auto& b : constellation) {
      const C d = a - b;
      bool seen = false;
      for (const auto& e : diffs) seen = seen || std::abs(e - d) < Scalar(1e-12);
      if (!seen) diffs.push_back(d);
    }
  }
  const double count = std::pow(double(diffs.size()), code.symbols());
  if (count > max_enumeration) {
    throw std::length_error("min_det_difference: " + std::to_string(count) + " difference vectors exceed cap");
  }
  const int q = code.symbols();
  std::vector<int> idx(q, 0);
  Scalar best = std::numeric_limits<Scalar>::infinity();
  CVectorX<Scalar> s(q);
  while (true) {
    bool nonzero = false;
    for (int k = 0; k < q; ++k) {
      s(k) = diffs[idx[k]];
      nonzero = nonzero || std::abs(s(k)) > Scalar(1e-12);
    }
    if (nonzero) {
      const CMatrixX<Scalar> d = code.encode(s);
      const CMatrixX<Scalar> dd = d * d.adjoint();
      best = std::min(best, std::abs(dd.determinant()));
    }
    int k = 0;
    while (k < q && ++idx[k] == int(diffs.size())) idx[k++] = 0;
    if (k == q) break;
  }
  return best;
}

}  // namespace sfn::stcodes
