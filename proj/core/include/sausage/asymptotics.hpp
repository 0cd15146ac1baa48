#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sausage/obstacles.hpp"
#include "sausage/space.hpp"
#include "sausage/spectral.hpp"
#include "sausage/stats.hpp"
#include "sausage/walker.hpp"

namespace sausage {

// ---------------------------------------------------------------------------
// Exact sausage moments on path graphs

/// Vertices of a path graph in order along the path. Throws InvalidArgument
/// when the space is not a simple path (some degree > 2, or a cycle).
std::vector<Vertex> path_order(const MetricMeasureGraph& space);

struct IntervalDpResult {
  double value = 0.0;
  /// Probability mass of the ranges that were enumerated.
  double covered_probability = 0.0;
  /// Upper bound on the contribution of ranges that were not enumerated.
  double truncation_bound = 0.0;
  std::size_t intervals = 0;
  std::size_t eigensolves = 0;
};

/// E^x[exp(-nu mu(C_s^eps))] on a path graph, summed over the law of the
/// visited interval [a, b]. P[range inside [a, b]] is the killed mass of the
/// segment, so P[range == [a, b]] follows by inclusion-exclusion over the
/// four sub-segments. Widths are enumerated outward until the remaining
/// mass times the largest remaining weight drops below `tolerance` times the
/// running sum.
IntervalDpResult interval_dp(const MetricMeasureGraph& space, Vertex x, double s, double nu,
                             double epsilon, double tolerance = 1e-15);

inline double exact_interval_dp(const MetricMeasureGraph& space, Vertex x, double s, double nu,
                                double epsilon) {
  return interval_dp(space, x, s, nu, epsilon).value;
}

// ---------------------------------------------------------------------------
// Scaling experiment

enum class MomentMode { kMonteCarlo, kExactDp, kBoth };

struct ScalingConfig {
  Vertex start = 0;
  double beta = 2.0;
  double nu = 1.0;
  double epsilon = 0.5;
  std::vector<double> times;
  MomentMode mode = MomentMode::kExactDp;
  std::size_t n_paths = 10'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Band limit c_high / c_low used for the pass flag.
  double band_limit = 10.0;
};

struct ScalingRow {
  double t = 0.0;
  double volume = 0.0;  ///< V(x, t)
  double s = 0.0;       ///< t^beta V(x, t)
  Estimate moment;      ///< exact entries have se == 0
  bool exact = false;
  Estimate mc;          ///< MC estimate in kBoth mode
  double log_moment = 0.0;  ///< L(t) = -log moment
  double ratio = 0.0;       ///< L(t) / V(x, t)
  /// nu V(x,t) - log P^x[tau_{B(x, t - eps)} > s]: an upper bound on L(t).
  double upper_L = 0.0;
  bool upper_holds = true;
  /// MC moment indistinguishable from 0: no ratio is reported.
  bool use_exact = false;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  double c_low = 0.0;
  double c_high = 0.0;
  double band_ratio = 0.0;
  bool monotone_divergence = false;
  bool pass = false;
};

ScalingReport run_scaling_experiment(const MetricMeasureGraph& space, const ScalingConfig& config);

/// True when all successive differences share a strict sign and none shrinks
/// in magnitude.
bool monotone_divergence(std::span<const double> sequence);

// ---------------------------------------------------------------------------
// Lower bound

struct LowerBoundOptions {
  std::vector<double> a_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double c_prime = 1.0;
  std::size_t n_paths = 100'000;  ///< used only off path graphs
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct LowerBoundCertificate {
  double t = 0.0;
  double rho = 0.0;    ///< t - eps
  double sigma = 0.0;  ///< s = t^beta V(x, t)
  double volume = 0.0;
  double survival = 0.0;   ///< P^x[tau_{B(x, rho)} > sigma], exact
  Estimate moment;         ///< E^x[exp(-nu mu(C_sigma^eps))]
  bool moment_exact = false;
  double lower = 0.0;      ///< exp(-nu V(x, t)) * survival
  bool confinement_holds = false;
  /// Per A: lambda(B(x, A rho)) and log of the largest c admitted by the survival and eigenvalue inequality.
  std::vector<double> a_values;
  std::vector<double> lambdas;
  std::vector<double> log_c;
  double c_prime = 1.0;
};

LowerBoundCertificate lower_bound_certificate(const MetricMeasureGraph& space, Vertex x, double t,
                                              double nu, double epsilon, double beta,
                                              const LowerBoundOptions& options = {});

/// Constants uniform over a grid of certificates.
struct LowerBoundFit {
  double a = 0.0;      ///< largest admissible A
  double c = 0.0;      ///< largest c holding at every t for that A
  double c_prime = 1.0;
  double window_low = 0.0;   ///< min lambda(B(x, A rho)) (A rho)^beta
  double window_high = 0.0;  ///< max of the same
  bool pass = false;
};

/// Picks the largest A whose lambda (A rho)^beta window has ratio at most
/// `window_limit` and reports the uniform c for it.
LowerBoundFit fit_lower_bound(std::span<const LowerBoundCertificate> certificates, double beta,
                              double window_limit = 8.0);

// ---------------------------------------------------------------------------
// Upper bound

struct UpperBoundConfig {
  double t = 3.0;
  double beta = 2.0;
  double nu = 0.3;
  double epsilon = 0.5;
  double outer_factor = 1.0;  ///< N in B(x, N s)
  TailBound tail;
};

struct UpperBoundDiagnostic {
  double s = 0.0;
  bool start_blocked = false;
  std::size_t domain_size = 0;
  double survival = 0.0;        ///< P^x[T and tau_{B(x,Ns)} > s], exact
  double lambda = 0.0;          ///< lambda(B^omega_{Ns})
  double spectral_bound = 0.0;  ///< exp(-s lambda) sqrt(mu(B^omega) / mu(x))
  double volume_bound = 0.0;    ///< exp(-s lambda) sqrt(V(x, Ns))
  bool spectral_holds = false;
  NetEigenvalueBound net;
  double escape = 0.0;       ///< P^x[tau_{B(x,Ns)} <= s]
  double escape_bound = 0.0;  ///< tail bound at sigma = N s
  bool escape_holds = false;
  bool pass = false;
};

UpperBoundDiagnostic upper_bound_diagnostic(const MetricMeasureGraph& space, Vertex x,
                                            const UpperBoundConfig& config,
                                            const ObstacleField& field, const NetCover& net,
                                            const NetSpectra& spectra);

}  // namespace sausage
