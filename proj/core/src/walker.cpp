#include "sausage/walker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "sausage/error.hpp"
#include "sausage/parallel.hpp"
#include "sausage/spectral.hpp"

namespace sausage {

WalkSampler::WalkSampler(const MetricMeasureGraph& space) : space_(&space) {
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto arcs = space.neighbors(static_cast<Vertex>(x));
    const double total = space.degree(static_cast<Vertex>(x));
    double acc = 0.0;
    for (const Arc& a : arcs) {
      acc += a.conductance;
      cumulative_.push_back(acc / total);
    }
    if (!arcs.empty()) cumulative_.back() = 1.0;
  }
}

double WalkSampler::holding_time(Vertex x, Philox4x32& rng) const {
  const double rate = space_->holding_rate(x);
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(rng.uniform_positive()) / rate;
}

Vertex WalkSampler::jump(Vertex x, Philox4x32& rng) const {
  const auto arcs = space_->neighbors(x);
  const std::size_t offset = static_cast<std::size_t>(arcs.data() - space_->neighbors(0).data());
  const double u = rng.uniform();
  const auto begin = cumulative_.begin() + static_cast<std::ptrdiff_t>(offset);
  const auto end = begin + static_cast<std::ptrdiff_t>(arcs.size());
  const auto it = std::upper_bound(begin, end, u);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - begin), arcs.size() - 1);
  return arcs[k].to;
}

Vertex PathSample::position(double s) const {
  if (events.empty()) return start;
  auto it = std::upper_bound(events.begin(), events.end(), s,
                             [](double value, const PathEvent& e) { return value < e.time; });
  if (it == events.begin()) return events.front().vertex;
  return std::prev(it)->vertex;
}

PathSample simulate_path(const WalkSampler& sampler, Vertex x, double horizon, Philox4x32& rng) {
  if (!sampler.space().contains(x)) throw InvalidArgument("simulate_path: start not in space");
  if (!(horizon >= 0.0)) throw InvalidArgument("simulate_path: horizon must be >= 0");
  PathSample path;
  path.start = x;
  path.horizon = horizon;
  path.events.push_back({x, 0.0});
  double now = 0.0;
  Vertex v = x;
  for (;;) {
    now += sampler.holding_time(v, rng);
    if (now > horizon) break;
    v = sampler.jump(v, rng);
    path.events.push_back({v, now});
  }
  return path;
}

PathSample simulate_path(const MetricMeasureGraph& space, Vertex x, double horizon,
                         Philox4x32& rng) {
  return simulate_path(WalkSampler(space), x, horizon, rng);
}

void write_path(std::ostream& out, const PathSample& path) {
  char buffer[64];
  for (const PathEvent& e : path.events) {
    std::snprintf(buffer, sizeof buffer, "%.17g %d\n", e.time, e.vertex);
    out << buffer;
  }
}

// ---------------------------------------------------------------------------

SausageTracker::SausageTracker(const MetricMeasureGraph& space, double epsilon)
    : space_(&space),
      epsilon_(epsilon),
      trivial_dilation_(epsilon < space.min_edge_length()),
      visited_mask_(space.size(), 0),
      covered_(space.size(), 0) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("sausage dilation must be >= 0");
}

void SausageTracker::reset() {
  for (Vertex v : touched_) {
    visited_mask_[v] = 0;
    covered_[v] = 0;
  }
  touched_.clear();
  volume_ = 0.0;
  visited_ = 0;
}

double SausageTracker::visit(Vertex x) {
  if (visited_mask_[x]) return volume_;
  visited_mask_[x] = 1;
  ++visited_;
  auto cover = [&](Vertex y) {
    if (covered_[y]) return;
    covered_[y] = 1;
    volume_ += space_->measure(y);
    touched_.push_back(y);
  };
  if (trivial_dilation_) {
    if (!covered_[x]) {
      cover(x);
    } else {
      touched_.push_back(x);
    }
    return volume_;
  }
  touched_.push_back(x);
  for (Vertex y : space_->ball(x, epsilon_)) cover(y);
  return volume_;
}

double sausage_volume(const MetricMeasureGraph& space, const PathSample& path, double epsilon,
                      double t) {
  if (t > path.horizon) throw InvalidArgument("sausage_volume: t beyond the path horizon");
  SausageTracker tracker(space, epsilon);
  tracker.visit(path.start);
  for (const PathEvent& e : path.events) {
    if (e.time > t) break;
    tracker.visit(e.vertex);
  }
  return tracker.volume();
}

std::vector<std::pair<double, double>> sausage_trajectory(const MetricMeasureGraph& space,
                                                          const PathSample& path, double epsilon) {
  SausageTracker tracker(space, epsilon);
  std::vector<std::pair<double, double>> out;
  for (const PathEvent& e : path.events) {
    const double before = tracker.volume();
    const double after = tracker.visit(e.vertex);
    if (out.empty() || after > before) out.emplace_back(e.time, after);
  }
  return out;
}

StoppingTime exit_time(const PathSample& path, std::span<const char> inside) {
  for (const PathEvent& e : path.events) {
    if (!inside[e.vertex]) return {e.time, false};
  }
  return {path.horizon, true};
}

StoppingTime hitting_time(const PathSample& path, std::span<const char> target) {
  for (const PathEvent& e : path.events) {
    if (target[e.vertex]) return {e.time, false};
  }
  return {path.horizon, true};
}

// ---------------------------------------------------------------------------

double TailBound::operator()(double sigma, double t) const {
  const double ratio = std::pow(sigma, beta) / t;
  return C * std::exp(-c * std::pow(ratio, 1.0 / (beta - 1.0)));
}

ExitTailResult exit_tail_check(const MetricMeasureGraph& space, Vertex y, double sigma, double t,
                               std::size_t n_paths, const TailBound& bound, std::uint64_t seed,
                               unsigned workers) {
  if (!(sigma >= 0.0) || !(t > 0.0)) throw InvalidArgument("exit_tail_check: need sigma >= 0, t > 0");
  if (!space.contains(y)) throw InvalidArgument("exit_tail_check: start not in space");
  const auto dist = space.distances_from(y);
  const WalkSampler sampler(space);
  std::vector<double> hits(n_paths, 0.0);
  parallel_for(n_paths, workers, [&](std::size_t k) {
    auto rng = seed_stream(seed, StreamLabel::kPath, k);
    Vertex v = y;
    double now = 0.0;
    if ((*dist)[v] >= sigma) {
      hits[k] = 1.0;
      return;
    }
    for (;;) {
      now += sampler.holding_time(v, rng);
      if (now > t) return;
      v = sampler.jump(v, rng);
      if ((*dist)[v] >= sigma) {
        hits[k] = 1.0;
        return;
      }
    }
  });

  ExitTailResult out;
  out.sigma = sigma;
  out.t = t;
  out.empirical = summarize(hits);
  // sup d >= sigma  <=>  the walk leaves the open ball {d < sigma} by time t.
  VertexSet open_ball;
  for (std::size_t v = 0; v < space.size(); ++v) {
    if ((*dist)[v] < sigma) open_ball.push_back(static_cast<Vertex>(v));
  }
  out.exact = escape_probability(space, open_ball, t, y);
  out.bound = bound(sigma, t);
  out.in_regime = std::pow(sigma, bound.beta) / t >= bound.min_ratio;
  out.pass = !out.in_regime || out.empirical.value <= out.bound + 3.0 * out.empirical.se;
  return out;
}

}  // namespace sausage
