#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace sausage {

/// A Monte Carlo (or exact) estimate. Exact values carry se == 0.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;

  double lower95() const { return value - 1.959963984540054 * se; }
  double upper95() const { return value + 1.959963984540054 * se; }
  bool exact() const { return se == 0.0; }
};

/// True when the two 95% confidence intervals intersect.
inline bool ci95_overlap(const Estimate& a, const Estimate& b) {
  return a.lower95() <= b.upper95() && b.lower95() <= a.upper95();
}

/// Welford accumulator. Feed samples in a fixed order to get bit-identical
/// results; see parallel_for.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }
  Estimate estimate() const { return {mean_, standard_error(), n_}; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline Estimate summarize(std::span<const double> samples) {
  RunningStats stats;
  for (double x : samples) stats.add(x);
  return stats.estimate();
}

}  // namespace sausage
