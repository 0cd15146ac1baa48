#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "sausage/error.hpp"
#include "sausage/rng.hpp"
#include "sausage/space.hpp"

namespace sausage {
namespace {

void check_cap(double count, std::size_t cap, const std::string& what) {
  if (count > static_cast<double>(cap)) {
    throw ResourceLimitError(what + " would have " + std::to_string(static_cast<long long>(count)) +
                             " vertices (cap " + std::to_string(cap) + ")");
  }
}

// Collects edges between integer grid points and numbers the points in
// lexicographic order, so the generated ids are deterministic.
class PointGraph {
 public:
  using Point = std::pair<long, long>;
  void add(Point a, Point b) {
    points_.emplace(a, 0);
    points_.emplace(b, 0);
    segments_.emplace_back(a, b);
  }
  MetricMeasureGraph finish(MeasureRule rule, std::string name) {
    Vertex id = 0;
    for (auto& [point, index] : points_) index = id++;
    std::vector<Edge> edges;
    edges.reserve(segments_.size());
    for (const auto& [a, b] : segments_) edges.push_back({points_.at(a), points_.at(b), 1.0, 1.0});
    return MetricMeasureGraph(points_.size(), std::move(edges), rule, std::move(name));
  }

 private:
  std::map<Point, Vertex> points_;
  std::vector<std::pair<Point, Point>> segments_;
};

void gasket_cell(PointGraph& g, PointGraph::Point a, PointGraph::Point b, PointGraph::Point c,
                 long size) {
  if (size == 1) {
    g.add(a, b);
    g.add(b, c);
    g.add(a, c);
    return;
  }
  auto mid = [](PointGraph::Point p, PointGraph::Point q) {
    return PointGraph::Point{(p.first + q.first) / 2, (p.second + q.second) / 2};
  };
  const auto ab = mid(a, b), bc = mid(b, c), ac = mid(a, c);
  gasket_cell(g, a, ab, ac, size / 2);
  gasket_cell(g, ab, b, bc, size / 2);
  gasket_cell(g, ac, bc, c, size / 2);
}

void vicsek_cell(PointGraph& g, long ox, long oy, long size) {
  if (size == 2) {
    const PointGraph::Point center{ox + 1, oy + 1};
    g.add(center, {ox, oy});
    g.add(center, {ox + 2, oy});
    g.add(center, {ox, oy + 2});
    g.add(center, {ox + 2, oy + 2});
    return;
  }
  const long b = size / 3;
  for (auto [i, j] : {std::pair{0, 0}, {2, 0}, {0, 2}, {2, 2}, {1, 1}}) {
    vicsek_cell(g, ox + i * b, oy + j * b, b);
  }
}

}  // namespace

Vertex lattice_index(std::span<const int> coords, int side) {
  long index = 0;
  for (int c : coords) index = index * side + c;
  return static_cast<Vertex>(index);
}

MetricMeasureGraph lattice_box(int dims, int side, bool periodic, MeasureRule rule,
                               std::size_t vertex_cap) {
  if (dims < 1 || side < 1) throw InvalidArgument("lattice_box needs dims >= 1 and side >= 1");
  if (periodic && side < 3) throw InvalidArgument("periodic lattice_box needs side >= 3");
  check_cap(std::pow(static_cast<double>(side), dims), vertex_cap, "lattice_box");
  std::size_t n = 1;
  for (int d = 0; d < dims; ++d) n *= static_cast<std::size_t>(side);
  std::vector<Edge> edges;
  std::vector<int> coords(dims);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t rest = v;
    for (int d = dims - 1; d >= 0; --d) {
      coords[d] = static_cast<int>(rest % side);
      rest /= side;
    }
    std::size_t stride = 1;
    for (int d = dims - 1; d >= 0; --d) {
      if (coords[d] + 1 < side) {
        edges.push_back({static_cast<Vertex>(v), static_cast<Vertex>(v + stride)});
      } else if (periodic) {
        edges.push_back({static_cast<Vertex>(v), static_cast<Vertex>(v - stride * (side - 1))});
      }
      stride *= side;
    }
  }
  std::string name = "lattice_box(" + std::to_string(dims) + "," + std::to_string(side) +
                     (periodic ? ",periodic)" : ")");
  return MetricMeasureGraph(n, std::move(edges), rule, std::move(name));
}

MetricMeasureGraph path_graph(int n, MeasureRule rule) { return lattice_box(1, n, false, rule); }

MetricMeasureGraph sierpinski_gasket(int level, MeasureRule rule, std::size_t vertex_cap) {
  if (level < 0 || level > 30) throw InvalidArgument("sierpinski_gasket level out of range");
  check_cap((std::pow(3.0, level + 1) + 3.0) / 2.0, vertex_cap, "sierpinski_gasket");
  PointGraph g;
  const long size = 1L << level;
  gasket_cell(g, {0, 0}, {size, 0}, {0, size}, size);
  return g.finish(rule, "sierpinski_gasket(" + std::to_string(level) + ")");
}

MetricMeasureGraph vicsek_tree(int level, MeasureRule rule, std::size_t vertex_cap) {
  if (level < 0 || level > 25) throw InvalidArgument("vicsek_tree level out of range");
  check_cap(4.0 * std::pow(5.0, level) + 1.0, vertex_cap, "vicsek_tree");
  PointGraph g;
  long size = 2;
  for (int k = 0; k < level; ++k) size *= 3;
  vicsek_cell(g, 0, 0, size);
  return g.finish(rule, "vicsek_tree(" + std::to_string(level) + ")");
}

MetricMeasureGraph cable_refinement(const MetricMeasureGraph& base, int m, std::size_t vertex_cap) {
  if (m < 1) throw InvalidArgument("cable_refinement needs m >= 1");
  const double total = static_cast<double>(base.size()) +
                       static_cast<double>(base.edges().size()) * (m - 1);
  check_cap(total, vertex_cap, "cable_refinement");
  std::vector<double> mu(static_cast<std::size_t>(total), 0.0);
  std::vector<Edge> edges;
  Vertex next = static_cast<Vertex>(base.size());
  for (const Edge& e : base.edges()) {
    const double piece = e.length / m;
    const double conductance = e.conductance * m / e.length;
    const double cell = e.conductance * piece;
    Vertex prev = e.u;
    for (int k = 1; k <= m; ++k) {
      const Vertex cur = k == m ? e.v : next++;
      edges.push_back({prev, cur, conductance, piece});
      mu[prev] += cell / 2.0;
      mu[cur] += cell / 2.0;
      prev = cur;
    }
  }
  const std::size_t n = mu.size();
  return MetricMeasureGraph(n, std::move(edges), std::move(mu),
                            "cable_refinement(" + base.name() + "," + std::to_string(m) + ")");
}

MetricMeasureGraph random_connected(const RandomConnected& params, MeasureRule rule) {
  if (params.vertex_count == 0) throw InvalidArgument("random_connected needs vertices");
  if (!(params.min_conductance > 0.0) || params.max_conductance < params.min_conductance) {
    throw InvalidArgument("random_connected conductance range is invalid");
  }
  auto rng = seed_stream(params.seed, StreamLabel::kGraph, 0);
  const std::size_t n = params.vertex_count;
  auto conductance = [&] {
    return params.min_conductance + (params.max_conductance - params.min_conductance) * rng.uniform();
  };
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v) {
    const auto parent = static_cast<Vertex>(rng.uniform() * static_cast<double>(v));
    edges.push_back({parent, static_cast<Vertex>(v), conductance(), 1.0});
  }
  if (n > 1) {
    for (std::size_t k = 0; k < params.extra_edges; ++k) {
      const auto a = static_cast<Vertex>(rng.uniform() * static_cast<double>(n));
      const auto b = static_cast<Vertex>(rng.uniform() * static_cast<double>(n));
      const double w = conductance();
      if (a != b) edges.push_back({a, b, w, 1.0});
    }
  }
  return MetricMeasureGraph(n, std::move(edges), rule,
                            "random_connected(" + std::to_string(n) + "," +
                                std::to_string(params.seed) + ")");
}

MetricMeasureGraph build_space(const SpaceDescriptor& d) {
  struct Visitor {
    const SpaceDescriptor& d;
    MetricMeasureGraph operator()(const LatticeBox& p) const {
      return lattice_box(p.dims, p.side, p.periodic, d.measure, d.vertex_cap);
    }
    MetricMeasureGraph operator()(const SierpinskiGasket& p) const {
      return sierpinski_gasket(p.level, d.measure, d.vertex_cap);
    }
    MetricMeasureGraph operator()(const VicsekTree& p) const {
      return vicsek_tree(p.level, d.measure, d.vertex_cap);
    }
    MetricMeasureGraph operator()(const ExplicitGraph& p) const {
      check_cap(static_cast<double>(p.vertex_count), d.vertex_cap, "explicit graph");
      if (!p.measure.empty()) return MetricMeasureGraph(p.vertex_count, p.edges, p.measure);
      return MetricMeasureGraph(p.vertex_count, p.edges, d.measure);
    }
    MetricMeasureGraph operator()(const RandomConnected& p) const {
      check_cap(static_cast<double>(p.vertex_count), d.vertex_cap, "random_connected");
      return random_connected(p, d.measure);
    }
    MetricMeasureGraph operator()(const std::shared_ptr<CableRefinement>& p) const {
      if (!p) throw InvalidArgument("cable_refinement descriptor has no base");
      return cable_refinement(build_space(p->base), p->subdivisions, d.vertex_cap);
    }
  };
  return std::visit(Visitor{d}, d.kind);
}

}  // namespace sausage
