#include <algorithm>
#include <cmath>

#include "sausage/error.hpp"
#include "sausage/spectral.hpp"

namespace sausage {
namespace {

// V(x, r) for many r from one sorted distance row.
class VolumeLookup {
 public:
  VolumeLookup(const MetricMeasureGraph& space, Vertex x) {
    const auto row = space.distances_from(x);
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(row->size());
    for (std::size_t y = 0; y < row->size(); ++y) {
      pairs.emplace_back((*row)[y], space.measure(static_cast<Vertex>(y)));
    }
    std::sort(pairs.begin(), pairs.end());
    double acc = 0.0;
    for (const auto& [d, m] : pairs) {
      acc += m;
      radii_.push_back(d);
      cumulative_.push_back(acc);
    }
  }

  double operator()(double r) const {
    const auto it = std::upper_bound(radii_.begin(), radii_.end(), r + 1e-12);
    if (it == radii_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - radii_.begin()) - 1];
  }

 private:
  std::vector<double> radii_;
  std::vector<double> cumulative_;
};

struct Sample {
  double log_h = 0.0;
  double distance = 0.0;
  double t = 0.0;
  std::size_t center = 0;
};

}  // namespace

GaussianFit fit_ge_beta(const MetricMeasureGraph& space, std::span<const Vertex> centers,
                        std::span<const double> times, const GaussianFitOptions& options) {
  if (centers.empty()) throw InvalidArgument("fit_ge_beta: no centers");
  std::vector<double> grid(times.begin(), times.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() < 2 || !(grid.front() > 0.0) || grid.back() < 10.0 * grid.front()) {
    throw InvalidArgument("fit_ge_beta: time grid needs at least two positive times spanning a decade");
  }
  if (!(options.beta_min > 1.0) || options.beta_max < options.beta_min || !(options.beta_step > 0.0)) {
    throw InvalidArgument("fit_ge_beta: invalid beta range");
  }

  GaussianFit fit;
  const double limit = space.diameter() / 4.0;
  for (double t : grid) {
    const double r = std::pow(t, 1.0 / options.guard_beta);
    if (r <= limit && r >= options.min_radius) fit.times.push_back(t);
  }
  if (fit.times.size() < 2 || fit.times.back() < 10.0 * fit.times.front()) {
    fit.rejected = true;
    fit.reason = "finite-size guard: fewer than a decade of times with min_radius <= t^(1/beta) <= diameter/4";
    return fit;
  }

  const HeatKernel kernel(space, options.mode);
  std::vector<VolumeLookup> volumes;
  std::vector<std::vector<double>> log_diag(centers.size());
  std::vector<Sample> samples;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const Vertex x = centers[c];
    if (!space.contains(x)) throw InvalidArgument("fit_ge_beta: center not in space");
    volumes.emplace_back(space, x);
    const auto dist = space.distances_from(x);
    const auto rows = kernel.rows(fit.times, x);
    for (std::size_t k = 0; k < fit.times.size(); ++k) {
      const Eigen::VectorXd& row = rows[k];
      log_diag[c].push_back(std::log(row(x)));
      for (std::size_t y = 0; y < space.size(); ++y) {
        const double d = (*dist)[y];
        if (d <= 0.0 || !(row(static_cast<Eigen::Index>(y)) > 0.0)) continue;
        samples.push_back({std::log(row(static_cast<Eigen::Index>(y))), d, fit.times[k], c});
      }
    }
  }

  // Stage 1: log h_t(x,x) + log V(x, t^(1/beta)) should not depend on t.
  double best = kInfinity;
  const int steps = static_cast<int>(std::floor((options.beta_max - options.beta_min) / options.beta_step + 1e-9));
  for (int i = 0; i <= steps; ++i) {
    const double beta = options.beta_min + i * options.beta_step;
    double spread = 0.0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      double sum = 0.0, sum2 = 0.0;
      for (std::size_t k = 0; k < fit.times.size(); ++k) {
        const double y = log_diag[c][k] + std::log(volumes[c](std::pow(fit.times[k], 1.0 / beta)));
        sum += y;
        sum2 += y * y;
      }
      const double n = static_cast<double>(fit.times.size());
      spread += std::max(0.0, sum2 / n - (sum / n) * (sum / n));
    }
    if (spread < best) {
      best = spread;
      fit.beta = beta;
    }
  }
  fit.diagonal_residual = best / static_cast<double>(centers.size());

  // Stage 2: off-diagonal constants on alternating train/test samples.
  const double beta = fit.beta;
  std::vector<double> z_train, y_train, z_test, y_test;
  for (const Sample& s : samples) {
    const double ratio = std::pow(s.distance, beta) / s.t;
    if (ratio < options.window_low || ratio > options.window_high) {
      ++fit.out_of_window;
      continue;
    }
    const double z = std::pow(ratio, 1.0 / (beta - 1.0));
    const double y = s.log_h + std::log(volumes[s.center](std::pow(s.t, 1.0 / beta)));
    if ((z_train.size() + z_test.size()) % 2 == 0) {
      z_train.push_back(z);
      y_train.push_back(y);
    } else {
      z_test.push_back(z);
      y_test.push_back(y);
    }
  }
  fit.train_samples = z_train.size();
  fit.test_samples = z_test.size();
  if (z_train.size() < 2) {
    fit.rejected = true;
    fit.reason = "too few off-diagonal samples inside the fit window";
    return fit;
  }
  double mz = 0.0, my = 0.0;
  for (std::size_t i = 0; i < z_train.size(); ++i) {
    mz += z_train[i];
    my += y_train[i];
  }
  mz /= static_cast<double>(z_train.size());
  my /= static_cast<double>(z_train.size());
  double szz = 0.0, szy = 0.0;
  for (std::size_t i = 0; i < z_train.size(); ++i) {
    szz += (z_train[i] - mz) * (z_train[i] - mz);
    szy += (z_train[i] - mz) * (y_train[i] - my);
  }
  const double slope = szz > 0.0 ? -szy / szz : 0.0;
  double hi = -kInfinity, lo = kInfinity;
  for (std::size_t i = 0; i < z_train.size(); ++i) {
    hi = std::max(hi, y_train[i] + slope * z_train[i]);
    lo = std::min(lo, y_train[i] + slope * z_train[i]);
  }
  fit.c_upper = slope;
  fit.C_upper = std::exp(hi);
  fit.C_lower = slope;
  fit.c_lower = std::exp(lo);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < z_test.size(); ++i) {
    const double shifted = y_test[i] + slope * z_test[i];
    if (shifted > hi + 1e-12 || shifted < lo - 1e-12) ++violations;
  }
  fit.violation_fraction =
      z_test.empty() ? 0.0 : static_cast<double>(violations) / static_cast<double>(z_test.size());
  return fit;
}

}  // namespace sausage
