#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace sausage {

using Vertex = std::int32_t;

/// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<Vertex>;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  double conductance = 1.0;
  double length = 1.0;
};

/// Neighbour entry in the adjacency structure.
struct Arc {
  Vertex to = 0;
  double conductance = 1.0;
  double length = 1.0;
};

enum class MeasureRule {
  kIncidentConductance,  ///< mu(x) = sum_y w_xy
  kUnit,                 ///< mu(x) = 1
};

/// Default cap on the vertex count of generated spaces.
inline constexpr std::size_t kDefaultVertexCap = 1'000'000;

/// Rows of the distance matrix are cached for spaces up to this size.
inline constexpr std::size_t kDistanceCacheLimit = 5'000;

/// A finite connected weighted graph viewed as a metric measure space:
/// vertex measure mu, symmetric conductances w, and the shortest-path metric
/// induced by the edge lengths.
///
/// Immutable after construction. Distance rows are computed on demand and
/// memoised behind a mutex, so all queries are safe from several threads.
class MetricMeasureGraph {
 public:
  /// Builds the graph and checks every invariant: positive conductances,
  /// lengths and measures, no self loops, connectivity. Parallel edges are
  /// merged (conductances add, the shorter length wins).
  MetricMeasureGraph(std::size_t vertex_count, std::vector<Edge> edges,
                     MeasureRule rule = MeasureRule::kIncidentConductance,
                     std::string name = "explicit");
  MetricMeasureGraph(std::size_t vertex_count, std::vector<Edge> edges,
                     std::vector<double> measure, std::string name = "explicit");

  MetricMeasureGraph(const MetricMeasureGraph& other);
  MetricMeasureGraph& operator=(const MetricMeasureGraph& other);
  MetricMeasureGraph(MetricMeasureGraph&&) noexcept;
  MetricMeasureGraph& operator=(MetricMeasureGraph&&) noexcept;
  ~MetricMeasureGraph();

  std::size_t size() const { return measure_.size(); }
  const std::string& name() const { return name_; }

  std::span<const Arc> neighbors(Vertex x) const {
    return {arcs_.data() + offsets_[x], arcs_.data() + offsets_[x + 1]};
  }
  /// Unique undirected edges with u < v, in adjacency order.
  const std::vector<Edge>& edges() const { return edges_; }

  double measure(Vertex x) const { return measure_[x]; }
  std::span<const double> measures() const { return measure_; }
  double total_measure() const { return total_measure_; }
  /// Sum of conductances at x.
  double degree(Vertex x) const { return degree_[x]; }
  /// Jump rate of the walk generated by the Laplacian: degree / mu.
  double holding_rate(Vertex x) const { return degree_[x] / measure_[x]; }
  double min_edge_length() const { return min_length_; }
  double min_measure() const { return min_measure_; }
  bool unit_lengths() const { return unit_lengths_; }

  /// Shortest-path distances from x to every vertex.
  std::shared_ptr<const std::vector<double>> distances_from(Vertex x) const;
  double distance(Vertex x, Vertex y) const;

  /// Exact diameter for spaces up to kDistanceCacheLimit vertices, otherwise
  /// a double-sweep lower bound (see diameter_is_exact()).
  double diameter() const;
  bool diameter_is_exact() const;

  /// B(x, r) = {y : d(x, y) <= r}; empty for r < 0.
  VertexSet ball(Vertex x, double r) const;
  /// V(x, r) = mu(B(x, r)).
  double volume(Vertex x, double r) const;
  double mass(std::span<const Vertex> vertices) const;

  bool contains(Vertex x) const { return x >= 0 && static_cast<std::size_t>(x) < size(); }

 private:
  void build(std::size_t vertex_count, std::vector<Edge> edges);
  void finish_measure();
  std::vector<double> dijkstra(Vertex source, double radius) const;

  std::string name_;
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;
  std::vector<Edge> edges_;
  std::vector<double> measure_;
  std::vector<double> degree_;
  double total_measure_ = 0.0;
  double min_length_ = 0.0;
  double min_measure_ = 0.0;
  bool unit_lengths_ = true;

  struct Cache;
  std::unique_ptr<Cache> cache_;
};

// ---------------------------------------------------------------------------
// Generators

struct LatticeBox {
  int dims = 1;
  int side = 2;
  bool periodic = false;
};
struct SierpinskiGasket {
  int level = 1;
};
struct VicsekTree {
  int level = 1;
};
struct ExplicitGraph {
  std::size_t vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<double> measure;  ///< empty: use the measure rule
};
struct RandomConnected {
  std::size_t vertex_count = 10;
  std::size_t extra_edges = 10;
  double min_conductance = 0.5;
  double max_conductance = 2.0;
  std::uint64_t seed = 1;
};
struct CableRefinement;

/// Generator descriptor, as read from a run configuration.
struct SpaceDescriptor {
  std::variant<LatticeBox, SierpinskiGasket, VicsekTree, ExplicitGraph, RandomConnected,
               std::shared_ptr<CableRefinement>>
      kind;
  MeasureRule measure = MeasureRule::kIncidentConductance;
  std::size_t vertex_cap = kDefaultVertexCap;
};

struct CableRefinement {
  SpaceDescriptor base;
  int subdivisions = 2;
};

MetricMeasureGraph build_space(const SpaceDescriptor& descriptor);

MetricMeasureGraph lattice_box(int dims, int side, bool periodic = false,
                               MeasureRule rule = MeasureRule::kIncidentConductance,
                               std::size_t vertex_cap = kDefaultVertexCap);
MetricMeasureGraph path_graph(int n, MeasureRule rule = MeasureRule::kIncidentConductance);
MetricMeasureGraph sierpinski_gasket(int level, MeasureRule rule = MeasureRule::kIncidentConductance,
                                     std::size_t vertex_cap = kDefaultVertexCap);
MetricMeasureGraph vicsek_tree(int level, MeasureRule rule = MeasureRule::kIncidentConductance,
                               std::size_t vertex_cap = kDefaultVertexCap);
/// Subdivides each edge into m segments of length l/m and conductance m*w/l
/// (resistance preserved). Each vertex gets half the cable mass w*l/m of
/// every incident segment, so new interior vertices carry w*l/m.
MetricMeasureGraph cable_refinement(const MetricMeasureGraph& base, int m,
                                    std::size_t vertex_cap = kDefaultVertexCap);
MetricMeasureGraph random_connected(const RandomConnected& params,
                                    MeasureRule rule = MeasureRule::kIncidentConductance);

/// Grid coordinate of a lattice_box vertex (row-major, last axis fastest).
Vertex lattice_index(std::span<const int> coords, int side);

// ---------------------------------------------------------------------------
// Volume conditions

struct VolumeProfile {
  Vertex center = 0;
  std::vector<double> radii;
  std::vector<double> volumes;
};

VolumeProfile volume_profile(const MetricMeasureGraph& space, Vertex center,
                             std::span<const double> radii);

struct DoublingEstimate {
  double c_vd = 1.0;
  double alpha = 0.0;
  Vertex worst_center = 0;
  double worst_radius = 0.0;
};

/// max over (x, r) of V(x, 2r) / V(x, r) together with alpha = log2 C_VD.
DoublingEstimate doubling_constant(const MetricMeasureGraph& space, std::span<const Vertex> centers,
                                   std::span<const double> radii);

struct LinearGrowthCheck {
  double inf_ratio = 0.0;   ///< inf V(x, r) / r over r > 0 samples
  double sup_volume = 0.0;  ///< sup V(x, r)
  Vertex worst_center = 0;
  double worst_radius = 0.0;
  bool pass = false;
};

LinearGrowthCheck check_linear_growth(const MetricMeasureGraph& space,
                                      std::span<const Vertex> centers,
                                      std::span<const double> radii);

struct RelativeVolumeCheck {
  double min_value = 1.0;
  double worst_radius = 0.0;
  /// The inner radius r^beta V(x, r) exceeded the diameter at some grid point.
  bool truncated = false;
  std::vector<double> values;  ///< one per radius
};

/// Finite-range version of the nearby-balls condition: for every r on the grid,
/// V(x, r)^{-1} min_{y in B(x, r^beta V(x, r))} V(y, r).
RelativeVolumeCheck check_relative_volume(const MetricMeasureGraph& space, Vertex x, double beta,
                                          std::span<const double> radii);

// ---------------------------------------------------------------------------
// Nets

/// A t-net: centers pairwise more than t apart, elements K_i = B(k_i, t).
struct NetCover {
  double scale = 0.0;
  std::vector<Vertex> centers;
  std::vector<VertexSet> elements;
  /// Number of elements containing each vertex.
  std::vector<int> multiplicity;
  /// Measured max multiplicity.
  int max_overlap = 0;

  /// Checks cover, disjoint half-balls and the multiplicity table.
  bool verify(const MetricMeasureGraph& space) const;
  /// C_VD * 6^alpha.
  static double overlap_bound(const DoublingEstimate& doubling) {
    return doubling.c_vd * std::pow(6.0, doubling.alpha);
  }
};

/// Greedy maximal packing in vertex-id order: k becomes a center iff its
/// distance to every earlier center exceeds t.
NetCover build_net(const MetricMeasureGraph& space, double t);

struct OverlapCount {
  std::size_t count = 0;
  /// V(x, s + 3t/2) / min_i V(k_i, t/2): the packing bound.
  double packing_bound = 0.0;
  /// C_VD ((2s + 5t/2) / (t/2))^alpha: the doubling polynomial Q(s).
  double polynomial_bound = 0.0;
};

OverlapCount count_overlapping(const MetricMeasureGraph& space, const NetCover& net, Vertex x,
                               double s, const DoublingEstimate& doubling);

// ---------------------------------------------------------------------------
// Text export

/// Lines `u v w_uv l_uv`.
void write_edge_list(std::ostream& out, const MetricMeasureGraph& space);
/// Lines `v mu_v`.
void write_measure(std::ostream& out, const MetricMeasureGraph& space);
/// Inverse of write_edge_list + write_measure.
MetricMeasureGraph read_space(std::istream& edges, std::istream& measure);

// ---------------------------------------------------------------------------
// Vertex-set helpers

/// Indicator vector over all vertices.
std::vector<char> to_mask(std::size_t n, std::span<const Vertex> set);
VertexSet from_mask(std::span<const char> mask);
VertexSet set_difference(std::span<const Vertex> a, std::span<const Vertex> b);
VertexSet set_intersection(std::span<const Vertex> a, std::span<const Vertex> b);
bool is_subset(std::span<const Vertex> a, std::span<const Vertex> b);
/// Whether the subgraph induced on `set` is connected (empty set: false).
bool induced_connected(const MetricMeasureGraph& space, std::span<const Vertex> set);

}  // namespace sausage
