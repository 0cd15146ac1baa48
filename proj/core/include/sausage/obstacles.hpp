#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sausage/rng.hpp"
#include "sausage/space.hpp"
#include "sausage/stats.hpp"

namespace sausage {

/// One realisation of the Poisson field with intensity nu dmu, dilated by eps.
struct ObstacleField {
  double intensity = 0.0;
  double dilation = 0.0;
  std::vector<int> counts;     ///< N_v ~ Poisson(nu mu(v)), per vertex
  VertexSet arrivals;          ///< {v : N_v >= 1}
  std::vector<char> blocked;   ///< indicator of the dilated obstacle set
  double blocked_mass = 0.0;

  /// B(x, r) minus the obstacle set.
  VertexSet depleted(const MetricMeasureGraph& space, Vertex x, double r) const;
};

ObstacleField sample_field(const MetricMeasureGraph& space, double nu, double epsilon,
                           Philox4x32& rng);
/// Rebuilds the dilated set from given counts.
ObstacleField field_from_counts(const MetricMeasureGraph& space, std::vector<int> counts,
                                double nu, double epsilon);

/// Lines `v count`, one per vertex.
void write_field(std::ostream& out, const ObstacleField& field);
std::vector<int> read_field_counts(std::istream& in, std::size_t vertex_count);

/// E^x[exp(-nu mu(C_s^eps))] by simulating n_paths independent walks.
Estimate negative_moment(const MetricMeasureGraph& space, Vertex x, double s, double nu,
                         double epsilon, std::size_t n_paths, std::uint64_t seed,
                         unsigned workers = 1);

struct AnnealedSurvival {
  Estimate estimate;
  /// Between-field variance of the per-field survival, corrected for the
  /// inner sampling noise, and the mean inner (path) variance per field.
  double environment_variance = 0.0;
  double path_variance = 0.0;
  bool exact_inner = false;
  std::size_t fields = 0;
  std::size_t paths_per_field = 0;
};

/// Largest space for which the per-field survival is computed exactly from
/// the killed semigroup instead of by paths.
inline constexpr std::size_t kExactSurvivalLimit = 200;

/// E^nu[P^x[T > s]]: fields sampled on stream kField, inner paths on stream
/// kFieldPath.
AnnealedSurvival annealed_survival(const MetricMeasureGraph& space, Vertex x, double s, double nu,
                                   double epsilon, std::size_t n_fields, std::size_t n_paths,
                                   std::uint64_t seed, unsigned workers = 1);

struct CramerTail {
  double probability = 0.0;
  double se = 0.0;  ///< 0 in exact mode
  bool exact = true;
  /// -log(probability) / mu(K); +inf when the probability is 0.
  double rate = 0.0;
  double mean_proportion = 0.0;
  double grid_step = 0.0;
  std::size_t samples = 0;
};

/// P[mu(obstacles cap K) / mu(K) <= frac]. Exact subset-sum DP on a mass grid
/// of step min_K mu / 100 when eps is below the minimum edge length (masses
/// rounded down, threshold rounded up, so the result never undershoots the
/// true tail); Monte Carlo over n_mc fields otherwise.
CramerTail cramer_tail(const MetricMeasureGraph& space, const VertexSet& block, double nu,
                       double epsilon, double frac, std::size_t n_mc = 100'000,
                       std::uint64_t seed = 1, unsigned workers = 1);

}  // namespace sausage
