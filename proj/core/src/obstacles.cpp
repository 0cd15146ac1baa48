#include "sausage/obstacles.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "sausage/error.hpp"
#include "sausage/parallel.hpp"
#include "sausage/spectral.hpp"
#include "sausage/walker.hpp"

namespace sausage {

VertexSet ObstacleField::depleted(const MetricMeasureGraph& space, Vertex x, double r) const {
  VertexSet out;
  for (Vertex v : space.ball(x, r)) {
    if (!blocked[v]) out.push_back(v);
  }
  return out;
}

ObstacleField field_from_counts(const MetricMeasureGraph& space, std::vector<int> counts,
                                double nu, double epsilon) {
  if (counts.size() != space.size()) throw InvalidArgument("field counts have the wrong size");
  ObstacleField field;
  field.intensity = nu;
  field.dilation = epsilon;
  field.counts = std::move(counts);
  field.blocked.assign(space.size(), 0);
  const bool trivial = epsilon < space.min_edge_length();
  for (std::size_t v = 0; v < space.size(); ++v) {
    if (field.counts[v] < 0) throw InvalidArgument("negative obstacle count");
    if (field.counts[v] == 0) continue;
    field.arrivals.push_back(static_cast<Vertex>(v));
    if (trivial) {
      field.blocked[v] = 1;
    } else {
      for (Vertex y : space.ball(static_cast<Vertex>(v), epsilon)) field.blocked[y] = 1;
    }
  }
  for (std::size_t v = 0; v < space.size(); ++v) {
    if (field.blocked[v]) field.blocked_mass += space.measure(static_cast<Vertex>(v));
  }
  return field;
}

ObstacleField sample_field(const MetricMeasureGraph& space, double nu, double epsilon,
                           Philox4x32& rng) {
  if (!(nu >= 0.0)) throw InvalidArgument("obstacle intensity must be >= 0");
  if (!(epsilon >= 0.0)) throw InvalidArgument("obstacle dilation must be >= 0");
  std::vector<int> counts(space.size(), 0);
  if (nu > 0.0) {
    for (std::size_t v = 0; v < space.size(); ++v) {
      std::poisson_distribution<int> poisson(nu * space.measure(static_cast<Vertex>(v)));
      counts[v] = poisson(rng);
    }
  }
  return field_from_counts(space, std::move(counts), nu, epsilon);
}

void write_field(std::ostream& out, const ObstacleField& field) {
  for (std::size_t v = 0; v < field.counts.size(); ++v) out << v << ' ' << field.counts[v] << '\n';
}

std::vector<int> read_field_counts(std::istream& in, std::size_t vertex_count) {
  std::vector<int> counts(vertex_count, 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    long long v = 0;
    int count = 0;
    if (!(fields >> v >> count) || v < 0 || static_cast<std::size_t>(v) >= vertex_count ||
        count < 0) {
      throw InvalidArgument("field line " + std::to_string(line_no) + ": expected `v count`");
    }
    counts[static_cast<std::size_t>(v)] = count;
  }
  return counts;
}

// ---------------------------------------------------------------------------

Estimate negative_moment(const MetricMeasureGraph& space, Vertex x, double s, double nu,
                         double epsilon, std::size_t n_paths, std::uint64_t seed,
                         unsigned workers) {
  if (!space.contains(x)) throw InvalidArgument("negative_moment: start not in space");
  if (!(s >= 0.0) || !(nu >= 0.0)) throw InvalidArgument("negative_moment: need s, nu >= 0");
  if (nu == 0.0) return {1.0, 0.0, n_paths};
  const WalkSampler sampler(space);
  std::vector<double> values(n_paths, 0.0);
  parallel_for(n_paths, workers, [&](std::size_t k) {
    auto rng = seed_stream(seed, StreamLabel::kPath, k);
    SausageTracker tracker(space, epsilon);
    Vertex v = x;
    tracker.visit(v);
    double now = 0.0;
    for (;;) {
      now += sampler.holding_time(v, rng);
      if (now > s) break;
      v = sampler.jump(v, rng);
      tracker.visit(v);
    }
    values[k] = std::exp(-nu * tracker.volume());
  });
  return summarize(values);
}

AnnealedSurvival annealed_survival(const MetricMeasureGraph& space, Vertex x, double s, double nu,
                                   double epsilon, std::size_t n_fields, std::size_t n_paths,
                                   std::uint64_t seed, unsigned workers) {
  if (!space.contains(x)) throw InvalidArgument("annealed_survival: start not in space");
  if (!(s >= 0.0) || !(nu >= 0.0)) throw InvalidArgument("annealed_survival: need s, nu >= 0");
  AnnealedSurvival out;
  out.fields = n_fields;
  out.exact_inner = space.size() <= kExactSurvivalLimit;
  out.paths_per_field = out.exact_inner ? 0 : n_paths;
  if (nu == 0.0) {
    out.estimate = {1.0, 0.0, n_fields};
    return out;
  }
  if (!out.exact_inner && n_paths == 0) throw InvalidArgument("annealed_survival: n_paths = 0");
  const WalkSampler sampler(space);
  std::vector<double> per_field(n_fields, 0.0);
  std::vector<double> inner_variance(n_fields, 0.0);
  parallel_for(n_fields, workers, [&](std::size_t f) {
    auto field_rng = seed_stream(seed, StreamLabel::kField, f);
    const ObstacleField field = sample_field(space, nu, epsilon, field_rng);
    if (field.blocked[x]) return;  // T = 0
    if (out.exact_inner) {
      VertexSet free;
      for (std::size_t v = 0; v < space.size(); ++v) {
        if (!field.blocked[v]) free.push_back(static_cast<Vertex>(v));
      }
      per_field[f] = killed_mass(space, free, s, x);
      return;
    }
    RunningStats stats;
    for (std::size_t k = 0; k < n_paths; ++k) {
      auto rng = seed_stream(seed, StreamLabel::kFieldPath, f * n_paths + k);
      Vertex v = x;
      double now = 0.0;
      bool alive = true;
      for (;;) {
        now += sampler.holding_time(v, rng);
        if (now > s) break;
        v = sampler.jump(v, rng);
        if (field.blocked[v]) {
          alive = false;
          break;
        }
      }
      stats.add(alive ? 1.0 : 0.0);
    }
    per_field[f] = stats.mean();
    inner_variance[f] = stats.variance();
  });
  out.estimate = summarize(per_field);
  const Estimate inner = summarize(inner_variance);
  out.path_variance = inner.value;
  const double between = out.estimate.se * out.estimate.se * static_cast<double>(n_fields);
  out.environment_variance =
      std::max(0.0, between - (out.exact_inner ? 0.0 : inner.value / static_cast<double>(n_paths)));
  return out;
}

// ---------------------------------------------------------------------------

CramerTail cramer_tail(const MetricMeasureGraph& space, const VertexSet& block, double nu,
                       double epsilon, double frac, std::size_t n_mc, std::uint64_t seed,
                       unsigned workers) {
  if (block.empty()) throw InvalidArgument("cramer_tail: empty block");
  if (!(nu >= 0.0)) throw InvalidArgument("cramer_tail: nu must be >= 0");
  CramerTail out;
  const double total = space.mass(block);
  double min_mu = kInfinity;
  for (Vertex v : block) {
    const double m = space.measure(v);
    min_mu = std::min(min_mu, m);
    out.mean_proportion += m * -std::expm1(-nu * m);
  }
  out.mean_proportion /= total;
  auto finish = [&](CramerTail& r) {
    r.rate = r.probability > 0.0 ? -std::log(r.probability) / total : kInfinity;
    return r;
  };
  if (frac >= 1.0) {
    out.probability = 1.0;
    return finish(out);
  }
  if (frac < 0.0) {
    out.probability = 0.0;
    return finish(out);
  }

  if (epsilon < space.min_edge_length()) {
    const double step = min_mu / 100.0;
    out.grid_step = step;
    std::vector<long long> units;
    long long capacity = 0;
    for (Vertex v : block) {
      units.push_back(static_cast<long long>(std::floor(space.measure(v) / step + 1e-9)));
    }
    const long long threshold = static_cast<long long>(std::ceil(frac * total / step - 1e-9));
    for (long long u : units) capacity += u;
    const long long top = std::min(capacity, threshold);
    // dist[m] = P[occupied grid mass == m], truncated at the threshold.
    std::vector<double> dist(static_cast<std::size_t>(top + 1), 0.0);
    dist[0] = 1.0;
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double p = -std::expm1(-nu * space.measure(block[i]));
      const long long u = units[i];
      for (long long m = top; m >= 0; --m) {
        const double keep = dist[static_cast<std::size_t>(m)] * (1.0 - p);
        const double add = m >= u ? dist[static_cast<std::size_t>(m - u)] * p : 0.0;
        dist[static_cast<std::size_t>(m)] = keep + add;
      }
    }
    double acc = 0.0;
    for (double d : dist) acc += d;
    out.probability = std::min(1.0, acc);
    return finish(out);
  }

  out.exact = false;
  out.samples = n_mc;
  std::vector<double> hits(n_mc, 0.0);
  parallel_for(n_mc, workers, [&](std::size_t k) {
    auto rng = seed_stream(seed, StreamLabel::kObstacleTail, k);
    const ObstacleField field = sample_field(space, nu, epsilon, rng);
    double blocked = 0.0;
    for (Vertex v : block) {
      if (field.blocked[v]) blocked += space.measure(v);
    }
    hits[k] = blocked / total <= frac ? 1.0 : 0.0;
  });
  const Estimate e = summarize(hits);
  out.probability = e.value;
  out.se = e.se;
  return finish(out);
}

}  // namespace sausage
