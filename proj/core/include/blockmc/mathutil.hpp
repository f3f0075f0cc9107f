#ifndef BLOCKMC_MATHUTIL_HPP
#define BLOCKMC_MATHUTIL_HPP

#include <cassert>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace blockmc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(std::span<const double> v) {
  assert(!v.empty());
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Precomputed lgamma(k + shift) for integer k in [0, max]. The sampler hot
// paths only ever evaluate lgamma at integer offsets from the model
// hyperparameters, so a table makes sweeps cheap and bit-stable.
class LgammaTable {
 public:
  LgammaTable() = default;
  LgammaTable(double shift, int max_k) : shift_(shift), v_(max_k + 1) {
    for (int k = 0; k <= max_k; ++k) v_[k] = std::lgamma(shift_ + k);
  }

  double operator()(int k) const {
    assert(k >= 0 && k < static_cast<int>(v_.size()));
    return v_[k];
  }

  int max_k() const { return static_cast<int>(v_.size()) - 1; }
  double shift() const { return shift_; }

 private:
  double shift_ = 0;
  std::vector<double> v_;
};

}  // namespace blockmc

#endif
