#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace sll {

// Fixed-point accumulator for sums whose value must not depend on the order
// of the terms. Each term is quantized to 2^-40 before being added to a
// 128-bit integer, so the accumulated value is exact and permutation
// invariant. Terms must satisfy |v| < 2^22 (~4.1e6); larger terms saturate.
class InvariantSum {
 public:
  static constexpr double kScale = 0x1p40;

  void add(double v) {
    double s = v * kScale;
    // saturation keeps the reduction well-defined for runaway iterates;
    // the simulators guard |x| <= 1e6 long before this triggers
    if (s > kMaxTerm) s = kMaxTerm;
    if (s < -kMaxTerm) s = -kMaxTerm;
    acc_ += static_cast<__int128>(static_cast<long long>(s));
  }

  void merge(const InvariantSum& other) { acc_ += other.acc_; }

  double value() const { return static_cast<double>(acc_) / kScale; }

 private:
  static constexpr double kMaxTerm = 0x1p62;
  __int128 acc_ = 0;
};

inline double invariant_sum(std::span<const double> terms) {
  InvariantSum s;
  for (double t : terms) s.add(t);
  return s.value();
}

// Snap v to the nearest multiple of 2^-30. Sums of snapped terms are exact
// in double arithmetic (hence independent of term order and of accumulator
// striping) as long as every partial sum stays below 2^23 in magnitude --
// amply satisfied by the simulators, whose divergence guards fire long
// before coordinates reach that scale.
inline double snap30(double v) {
  constexpr double shift = 0x1.8p22;  // 1.5 * 2^52 * 2^-30
  return (v + shift) - shift;
}

}  // namespace sll
