#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "sausage/rng.hpp"
#include "sausage/space.hpp"
#include "sausage/stats.hpp"

namespace sausage {

/// Jump-chain sampler for the continuous-time walk generated by Delta:
/// holding rate q_x = mu(x)^{-1} sum_y w_xy, jump to y with probability
/// w_xy / sum_z w_xz.
class WalkSampler {
 public:
  explicit WalkSampler(const MetricMeasureGraph& space);

  const MetricMeasureGraph& space() const { return *space_; }
  /// Exponential holding time at x (infinite for an isolated vertex).
  double holding_time(Vertex x, Philox4x32& rng) const;
  Vertex jump(Vertex x, Philox4x32& rng) const;

 private:
  const MetricMeasureGraph* space_;
  std::vector<double> cumulative_;  ///< per arc, normalised cumulative weights
};

struct PathEvent {
  Vertex vertex = 0;
  double time = 0.0;  ///< arrival time
};

/// A trajectory on [0, horizon]: the walk sits at events[k].vertex during
/// [events[k].time, events[k+1].time) and at the last vertex until horizon.
struct PathSample {
  Vertex start = 0;
  double horizon = 0.0;
  std::vector<PathEvent> events;
  std::uint64_t stream = 0;

  /// Holding time of event k, truncated at the horizon.
  double holding_time(std::size_t k) const {
    return (k + 1 < events.size() ? events[k + 1].time : horizon) - events[k].time;
  }
  /// Position at time s <= horizon (right-continuous).
  Vertex position(double s) const;
};

PathSample simulate_path(const WalkSampler& sampler, Vertex x, double horizon, Philox4x32& rng);
PathSample simulate_path(const MetricMeasureGraph& space, Vertex x, double horizon,
                         Philox4x32& rng);

/// One event per line: `t vertex`.
void write_path(std::ostream& out, const PathSample& path);

/// Incrementally maintained epsilon-dilation of the visited set.
class SausageTracker {
 public:
  SausageTracker(const MetricMeasureGraph& space, double epsilon);

  void reset();
  /// Adds x to the visited set; returns the new volume.
  double visit(Vertex x);
  double volume() const { return volume_; }
  bool covered(Vertex x) const { return covered_[x] != 0; }
  std::size_t visited_count() const { return visited_; }

 private:
  const MetricMeasureGraph* space_;
  double epsilon_;
  bool trivial_dilation_;
  std::vector<char> visited_mask_;
  std::vector<char> covered_;
  std::vector<Vertex> touched_;
  double volume_ = 0.0;
  std::size_t visited_ = 0;
};

/// mu(C_t^eps): measure of the eps-dilation of the vertices visited by time t.
double sausage_volume(const MetricMeasureGraph& space, const PathSample& path, double epsilon,
                      double t);

/// Volume trajectory: (event time, mu(C^eps)) at each newly covering event.
std::vector<std::pair<double, double>> sausage_trajectory(const MetricMeasureGraph& space,
                                                          const PathSample& path, double epsilon);

/// A stopping time that may be censored by the simulation horizon. A
/// censored time carries the horizon in `time` and must not be read as an
/// observed value.
struct StoppingTime {
  double time = std::numeric_limits<double>::infinity();
  bool censored = true;

  bool exceeds(double s) const { return censored ? time >= s : time > s; }
};

/// First event time with the walk outside `inside` (indicator over all vertices).
StoppingTime exit_time(const PathSample& path, std::span<const char> inside);
/// First event time with the walk in `target`; 0 when the path starts there.
StoppingTime hitting_time(const PathSample& path, std::span<const char> target);

/// Exit tail P^y[sup_{s <= t} d(y, X_s) >= sigma] against
/// C exp(-c (sigma^beta / t)^{1/(beta-1)}).
struct TailBound {
  double beta = 2.0;
  double c = 1.0;
  double C = 1.0;
  /// The bound is void below this value of sigma^beta / t.
  double min_ratio = 1.0;

  double operator()(double sigma, double t) const;
};

struct ExitTailResult {
  double sigma = 0.0;
  double t = 0.0;
  Estimate empirical;
  /// Exact exceedance from the killed semigroup of the open ball.
  double exact = 0.0;
  double bound = 0.0;
  bool in_regime = false;
  bool pass = false;
};

ExitTailResult exit_tail_check(const MetricMeasureGraph& space, Vertex y, double sigma, double t,
                               std::size_t n_paths, const TailBound& bound, std::uint64_t seed,
                               unsigned workers = 1);

}  // namespace sausage
