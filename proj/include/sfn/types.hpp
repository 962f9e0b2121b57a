#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace sfn {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatrixX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using cd = std::complex<double>;

using Bits = std::vector<std::uint8_t>;
using Llrs = std::vector<double>;

// All simulation randomness flows through this engine so runs are reproducible
// for a fixed seed on a fixed toolchain.
using Rng = std::mt19937_64;

// Derives an independent stream seed from a base seed and a sequence of indices.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices);

}  // namespace sfn
