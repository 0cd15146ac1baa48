#include "sausage/space.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

#include "sausage/error.hpp"

namespace sausage {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack for comparing accumulated path lengths against a radius.
constexpr double kRadiusSlack = 1e-12;
}  // namespace

struct MetricMeasureGraph::Cache {
  std::mutex mutex;
  std::unordered_map<Vertex, std::shared_ptr<const std::vector<double>>> rows;
  std::optional<double> diameter;
  bool diameter_exact = false;
};

MetricMeasureGraph::MetricMeasureGraph(std::size_t vertex_count, std::vector<Edge> edges,
                                       MeasureRule rule, std::string name)
    : name_(std::move(name)), cache_(std::make_unique<Cache>()) {
  build(vertex_count, std::move(edges));
  measure_.assign(vertex_count, 1.0);
  if (rule == MeasureRule::kIncidentConductance) measure_ = degree_;
  finish_measure();
}

MetricMeasureGraph::MetricMeasureGraph(std::size_t vertex_count, std::vector<Edge> edges,
                                       std::vector<double> measure, std::string name)
    : name_(std::move(name)), cache_(std::make_unique<Cache>()) {
  if (measure.size() != vertex_count) {
    throw InvalidArgument("measure has " + std::to_string(measure.size()) + " entries for " +
                          std::to_string(vertex_count) + " vertices");
  }
  build(vertex_count, std::move(edges));
  measure_ = std::move(measure);
  finish_measure();
}

MetricMeasureGraph::MetricMeasureGraph(const MetricMeasureGraph& other)
    : name_(other.name_),
      offsets_(other.offsets_),
      arcs_(other.arcs_),
      edges_(other.edges_),
      measure_(other.measure_),
      degree_(other.degree_),
      total_measure_(other.total_measure_),
      min_length_(other.min_length_),
      min_measure_(other.min_measure_),
      unit_lengths_(other.unit_lengths_),
      cache_(std::make_unique<Cache>()) {}

MetricMeasureGraph& MetricMeasureGraph::operator=(const MetricMeasureGraph& other) {
  if (this != &other) {
    MetricMeasureGraph copy(other);
    *this = std::move(copy);
  }
  return *this;
}

MetricMeasureGraph::MetricMeasureGraph(MetricMeasureGraph&&) noexcept = default;
MetricMeasureGraph& MetricMeasureGraph::operator=(MetricMeasureGraph&&) noexcept = default;
MetricMeasureGraph::~MetricMeasureGraph() = default;

void MetricMeasureGraph::build(std::size_t n, std::vector<Edge> edges) {
  if (n == 0) throw InvalidArgument("a space needs at least one vertex");
  if (n > static_cast<std::size_t>(std::numeric_limits<Vertex>::max())) {
    throw ResourceLimitError("vertex count exceeds the id range");
  }
  std::map<std::pair<Vertex, Vertex>, Edge> merged;
  for (Edge e : edges) {
    if (e.v < 0 || static_cast<std::size_t>(e.v) >= n || e.u < 0 ||
        static_cast<std::size_t>(e.u) >= n) {
      throw InvalidArgument("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") out of range");
    }
    if (e.u == e.v) throw InvalidArgument("self loop at vertex " + std::to_string(e.u));
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance)) {
      throw InvalidArgument("edge conductance must be positive and finite");
    }
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw InvalidArgument("edge length must be positive and finite");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    auto [it, inserted] = merged.try_emplace({e.u, e.v}, e);
    if (!inserted) {
      it->second.conductance += e.conductance;
      it->second.length = std::min(it->second.length, e.length);
    }
  }

  std::vector<std::size_t> count(n + 1, 0);
  for (const auto& [key, e] : merged) {
    ++count[e.u + 1];
    ++count[e.v + 1];
  }
  offsets_.assign(n + 1, 0);
  std::partial_sum(count.begin(), count.end(), offsets_.begin());
  arcs_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  degree_.assign(n, 0.0);
  edges_.clear();
  edges_.reserve(merged.size());
  min_length_ = merged.empty() ? kInf : std::numeric_limits<double>::max();
  unit_lengths_ = true;
  for (const auto& [key, e] : merged) {
    arcs_[fill[e.u]++] = {e.v, e.conductance, e.length};
    arcs_[fill[e.v]++] = {e.u, e.conductance, e.length};
    degree_[e.u] += e.conductance;
    degree_[e.v] += e.conductance;
    min_length_ = std::min(min_length_, e.length);
    if (e.length != 1.0) unit_lengths_ = false;
    edges_.push_back(e);
  }

  // Connectivity.
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex x = stack.back();
    stack.pop_back();
    for (std::size_t k = offsets_[x]; k < offsets_[x + 1]; ++k) {
      const Vertex y = arcs_[k].to;
      if (!seen[y]) {
        seen[y] = 1;
        ++reached;
        stack.push_back(y);
      }
    }
  }
  if (reached != n) {
    Vertex first_missing = 0;
    while (seen[first_missing]) ++first_missing;
    throw DisconnectedError("space is disconnected: " + std::to_string(n - reached) + " of " +
                            std::to_string(n) + " vertices unreachable from vertex 0 (first: " +
                            std::to_string(first_missing) + ")");
  }
}

void MetricMeasureGraph::finish_measure() {
  total_measure_ = 0.0;
  min_measure_ = kInf;
  for (std::size_t x = 0; x < measure_.size(); ++x) {
    const double m = measure_[x];
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw InvalidArgument("measure of vertex " + std::to_string(x) + " must be positive");
    }
    total_measure_ += m;
    min_measure_ = std::min(min_measure_, m);
  }
}

std::vector<double> MetricMeasureGraph::dijkstra(Vertex source, double radius) const {
  const std::size_t n = size();
  std::vector<double> dist(n, kInf);
  dist[source] = 0.0;
  if (unit_lengths_) {
    std::vector<Vertex> frontier{source}, next;
    double level = 0.0;
    while (!frontier.empty() && level + 1.0 <= radius + kRadiusSlack) {
      level += 1.0;
      next.clear();
      for (Vertex x : frontier) {
        for (const Arc& a : neighbors(x)) {
          if (dist[a.to] == kInf) {
            dist[a.to] = level;
            next.push_back(a.to);
          }
        }
      }
      frontier.swap(next);
    }
    return dist;
  }
  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, x] = queue.top();
    queue.pop();
    if (d > dist[x]) continue;
    for (const Arc& a : neighbors(x)) {
      const double nd = d + a.length;
      if (nd < dist[a.to] && nd <= radius + kRadiusSlack) {
        dist[a.to] = nd;
        queue.emplace(nd, a.to);
      }
    }
  }
  return dist;
}

std::shared_ptr<const std::vector<double>> MetricMeasureGraph::distances_from(Vertex x) const {
  if (!contains(x)) throw InvalidArgument("vertex " + std::to_string(x) + " not in space");
  {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->rows.find(x);
    if (it != cache_->rows.end()) return it->second;
  }
  auto row = std::make_shared<const std::vector<double>>(dijkstra(x, kInf));
  if (size() <= kDistanceCacheLimit) {
    std::lock_guard lock(cache_->mutex);
    cache_->rows.emplace(x, row);
  }
  return row;
}

double MetricMeasureGraph::distance(Vertex x, Vertex y) const {
  if (!contains(y)) throw InvalidArgument("vertex " + std::to_string(y) + " not in space");
  return (*distances_from(x))[y];
}

double MetricMeasureGraph::diameter() const {
  {
    std::lock_guard lock(cache_->mutex);
    if (cache_->diameter) return *cache_->diameter;
  }
  double diam = 0.0;
  bool exact = size() <= kDistanceCacheLimit;
  if (exact) {
    for (std::size_t x = 0; x < size(); ++x) {
      const auto row = distances_from(static_cast<Vertex>(x));
      diam = std::max(diam, *std::max_element(row->begin(), row->end()));
    }
  } else {
    // Double sweep: farthest point from 0, then farthest from that.
    auto row = dijkstra(0, kInf);
    const auto far = static_cast<Vertex>(std::max_element(row.begin(), row.end()) - row.begin());
    row = dijkstra(far, kInf);
    diam = *std::max_element(row.begin(), row.end());
  }
  std::lock_guard lock(cache_->mutex);
  cache_->diameter = diam;
  cache_->diameter_exact = exact;
  return diam;
}

bool MetricMeasureGraph::diameter_is_exact() const {
  diameter();
  std::lock_guard lock(cache_->mutex);
  return cache_->diameter_exact;
}

VertexSet MetricMeasureGraph::ball(Vertex x, double r) const {
  if (!contains(x)) throw InvalidArgument("vertex " + std::to_string(x) + " not in space");
  VertexSet out;
  if (r < 0.0) return out;
  std::shared_ptr<const std::vector<double>> cached;
  {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->rows.find(x);
    if (it != cache_->rows.end()) cached = it->second;
  }
  if (!cached && r < min_length_) return {x};
  const std::vector<double> local = cached ? std::vector<double>{} : dijkstra(x, r);
  const std::vector<double>& dist = cached ? *cached : local;
  for (std::size_t y = 0; y < dist.size(); ++y) {
    if (dist[y] <= r + kRadiusSlack) out.push_back(static_cast<Vertex>(y));
  }
  return out;
}

double MetricMeasureGraph::volume(Vertex x, double r) const { return mass(ball(x, r)); }

double MetricMeasureGraph::mass(std::span<const Vertex> vertices) const {
  double total = 0.0;
  for (Vertex v : vertices) total += measure_[v];
  return total;
}

// ---------------------------------------------------------------------------

VolumeProfile volume_profile(const MetricMeasureGraph& space, Vertex center,
                             std::span<const double> radii) {
  VolumeProfile profile;
  profile.center = center;
  profile.radii.assign(radii.begin(), radii.end());
  std::sort(profile.radii.begin(), profile.radii.end());
  const auto row = space.distances_from(center);
  std::vector<std::size_t> order(space.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return (*row)[a] < (*row)[b]; });
  std::size_t k = 0;
  double acc = 0.0;
  for (double r : profile.radii) {
    while (k < order.size() && (*row)[order[k]] <= r + kRadiusSlack) {
      acc += space.measure(static_cast<Vertex>(order[k]));
      ++k;
    }
    profile.volumes.push_back(r < 0.0 ? 0.0 : acc);
  }
  return profile;
}

DoublingEstimate doubling_constant(const MetricMeasureGraph& space, std::span<const Vertex> centers,
                                   std::span<const double> radii) {
  if (centers.empty() || radii.empty()) {
    throw InvalidArgument("doubling_constant needs at least one center and one radius");
  }
  DoublingEstimate est;
  est.worst_center = centers.front();
  est.worst_radius = radii.front();
  std::vector<double> grid;
  for (double r : radii) {
    if (r < 0.0) continue;
    grid.push_back(r);
    grid.push_back(2.0 * r);
  }
  for (Vertex x : centers) {
    const VolumeProfile profile = volume_profile(space, x, grid);
    for (double r : radii) {
      if (r < 0.0) continue;
      auto at = [&](double radius) {
        const auto it = std::lower_bound(profile.radii.begin(), profile.radii.end(), radius);
        return profile.volumes[it - profile.radii.begin()];
      };
      const double ratio = at(2.0 * r) / at(r);
      if (ratio > est.c_vd) {
        est.c_vd = ratio;
        est.worst_center = x;
        est.worst_radius = r;
      }
    }
  }
  est.alpha = std::log2(est.c_vd);
  return est;
}

LinearGrowthCheck check_linear_growth(const MetricMeasureGraph& space,
                                      std::span<const Vertex> centers,
                                      std::span<const double> radii) {
  LinearGrowthCheck check;
  check.inf_ratio = kInf;
  for (Vertex x : centers) {
    const VolumeProfile profile = volume_profile(space, x, radii);
    for (std::size_t k = 0; k < profile.radii.size(); ++k) {
      const double r = profile.radii[k];
      check.sup_volume = std::max(check.sup_volume, profile.volumes[k]);
      if (r <= 0.0) continue;
      const double ratio = profile.volumes[k] / r;
      if (ratio < check.inf_ratio) {
        check.inf_ratio = ratio;
        check.worst_center = x;
        check.worst_radius = r;
      }
    }
  }
  if (check.inf_ratio == kInf) check.inf_ratio = 0.0;
  check.pass = check.inf_ratio > 0.0;
  return check;
}

RelativeVolumeCheck check_relative_volume(const MetricMeasureGraph& space, Vertex x, double beta,
                                          std::span<const double> radii) {
  if (!(beta > 1.0)) throw InvalidArgument("check_relative_volume requires beta > 1");
  RelativeVolumeCheck check;
  const double diameter = space.diameter();
  for (double r : radii) {
    const double vx = space.volume(x, r);
    const double inner = std::pow(r, beta) * vx;
    if (inner > diameter) check.truncated = true;
    double inf = kInf;
    for (Vertex y : space.ball(x, std::min(inner, diameter))) {
      inf = std::min(inf, space.volume(y, r));
    }
    const double value = inf / vx;
    check.values.push_back(value);
    if (value < check.min_value || check.values.size() == 1) {
      check.min_value = value;
      check.worst_radius = r;
    }
  }
  return check;
}

// ---------------------------------------------------------------------------

NetCover build_net(const MetricMeasureGraph& space, double t) {
  if (!(t > 0.0)) throw InvalidArgument("net scale must be positive");
  const std::size_t n = space.size();
  NetCover net;
  net.scale = t;
  // nearest[v] = distance from v to the closest chosen center, if <= t.
  std::vector<double> nearest(n, kInf);
  for (std::size_t k = 0; k < n; ++k) {
    if (nearest[k] <= t + kRadiusSlack) continue;
    const auto center = static_cast<Vertex>(k);
    net.centers.push_back(center);
    const VertexSet element = space.ball(center, t);
    const auto row = space.distances_from(center);
    for (Vertex v : element) nearest[v] = std::min(nearest[v], (*row)[v]);
    net.elements.push_back(element);
  }
  net.multiplicity.assign(n, 0);
  for (const auto& element : net.elements) {
    for (Vertex v : element) ++net.multiplicity[v];
  }
  net.max_overlap = *std::max_element(net.multiplicity.begin(), net.multiplicity.end());
  return net;
}

bool NetCover::verify(const MetricMeasureGraph& space) const {
  std::vector<int> counted(space.size(), 0);
  for (const auto& element : elements) {
    for (Vertex v : element) ++counted[v];
  }
  if (counted != multiplicity) return false;
  if (std::find(counted.begin(), counted.end(), 0) != counted.end()) return false;
  std::vector<char> half(space.size(), 0);
  for (Vertex k : centers) {
    for (Vertex v : space.ball(k, scale / 2.0)) {
      if (half[v]) return false;
      half[v] = 1;
    }
  }
  return true;
}

OverlapCount count_overlapping(const MetricMeasureGraph& space, const NetCover& net, Vertex x,
                               double s, const DoublingEstimate& doubling) {
  if (s < 0.0) throw InvalidArgument("count_overlapping requires s >= 0");
  OverlapCount out;
  const std::vector<char> in_ball = to_mask(space.size(), space.ball(x, s));
  double min_half = kInf;
  for (std::size_t i = 0; i < net.elements.size(); ++i) {
    const auto& element = net.elements[i];
    if (std::any_of(element.begin(), element.end(), [&](Vertex v) { return in_ball[v]; })) {
      ++out.count;
      min_half = std::min(min_half, space.volume(net.centers[i], net.scale / 2.0));
    }
  }
  const double t = net.scale;
  out.packing_bound = out.count == 0 ? 0.0 : space.volume(x, s + 1.5 * t) / min_half;
  out.polynomial_bound = doubling.c_vd * std::pow((2.0 * s + 2.5 * t) / (t / 2.0), doubling.alpha);
  return out;
}

// ---------------------------------------------------------------------------

void write_edge_list(std::ostream& out, const MetricMeasureGraph& space) {
  const auto precision = out.precision(17);
  for (const Edge& e : space.edges()) {
    out << e.u << ' ' << e.v << ' ' << e.conductance << ' ' << e.length << '\n';
  }
  out.precision(precision);
}

void write_measure(std::ostream& out, const MetricMeasureGraph& space) {
  const auto precision = out.precision(17);
  for (std::size_t v = 0; v < space.size(); ++v) out << v << ' ' << space.measure(v) << '\n';
  out.precision(precision);
}

MetricMeasureGraph read_space(std::istream& edges, std::istream& measure) {
  std::vector<Edge> list;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(edges, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    Edge e;
    if (!(fields >> e.u >> e.v >> e.conductance >> e.length)) {
      throw InvalidArgument("edge list line " + std::to_string(line_no) + " is malformed");
    }
    list.push_back(e);
  }
  std::vector<std::pair<Vertex, double>> entries;
  line_no = 0;
  while (std::getline(measure, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    Vertex v;
    double m;
    if (!(fields >> v >> m) || v < 0) {
      throw InvalidArgument("measure line " + std::to_string(line_no) + " is malformed");
    }
    entries.emplace_back(v, m);
  }
  std::vector<double> mu(entries.size(), 0.0);
  for (auto [v, m] : entries) {
    if (static_cast<std::size_t>(v) >= mu.size()) {
      throw InvalidArgument("measure file skips vertex ids");
    }
    mu[v] = m;
  }
  const std::size_t n = mu.size();
  return MetricMeasureGraph(n, std::move(list), std::move(mu), "imported");
}

// ---------------------------------------------------------------------------

std::vector<char> to_mask(std::size_t n, std::span<const Vertex> set) {
  std::vector<char> mask(n, 0);
  for (Vertex v : set) mask[v] = 1;
  return mask;
}

VertexSet from_mask(std::span<const char> mask) {
  VertexSet out;
  for (std::size_t v = 0; v < mask.size(); ++v) {
    if (mask[v]) out.push_back(static_cast<Vertex>(v));
  }
  return out;
}

VertexSet set_difference(std::span<const Vertex> a, std::span<const Vertex> b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet set_intersection(std::span<const Vertex> a, std::span<const Vertex> b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(std::span<const Vertex> a, std::span<const Vertex> b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool induced_connected(const MetricMeasureGraph& space, std::span<const Vertex> set) {
  if (set.empty()) return false;
  std::vector<char> inside = to_mask(space.size(), set);
  std::vector<Vertex> stack{set.front()};
  inside[set.front()] = 2;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex x = stack.back();
    stack.pop_back();
    for (const Arc& a : space.neighbors(x)) {
      if (inside[a.to] == 1) {
        inside[a.to] = 2;
        ++reached;
        stack.push_back(a.to);
      }
    }
  }
  return reached == set.size();
}

}  // namespace sausage
