#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sfn/bics.hpp"

namespace sfn::bics {

Interleaver::Interleaver(int length, std::uint64_t seed) : seed_(seed), perm_(std::size_t(std::max(length, 0))) {
  if (length <= 0) throw std::invalid_argument("Interleaver: length must be positive");
  std::iota(perm_.begin(), perm_.end(), 0);
  Rng rng(seed);
  std::shuffle(perm_.begin(), perm_.end(), rng);
}

void Interleaver::check(std::size_t n) const {
  if (n != perm_.size()) {
    throw std::invalid_argument("Interleaver: length " + std::to_string(n) + " != " + std::to_string(perm_.size()));
  }
}

}  // namespace sfn::bics
