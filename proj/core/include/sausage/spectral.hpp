#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sausage/linalg.hpp"
#include "sausage/space.hpp"

namespace sausage {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// The Dirichlet form E(f, f) = 1/2 sum_{x,y} w_xy (f(x) - f(y))^2 on L2(mu)
/// and its operator Delta f(x) = mu(x)^{-1} sum_y w_xy (f(x) - f(y)).
/// Functions are dense vectors indexed by vertex id.
class DirichletForm {
 public:
  explicit DirichletForm(const MetricMeasureGraph& space) : space_(&space) {}

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
  double energy(const Eigen::VectorXd& f) const;
  double energy(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
  /// <f, g> in L2(mu).
  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
  /// |grad f|^2(x) = (2 mu(x))^{-1} sum_y w_xy (f(x) - f(y))^2, so that
  /// sum_x |grad f|^2(x) mu(x) = E(f, f) = <Delta f, f>.
  Eigen::VectorXd gradient_density(const Eigen::VectorXd& f) const;

 private:
  const MetricMeasureGraph* space_;
};

/// Bottom of a (killed or Neumann) spectrum with an eigenfunction witness.
struct EigenResult {
  double value = 0.0;
  VertexSet domain;
  /// Eigenfunction on the domain (same order), normalised in L2(mu).
  Eigen::VectorXd witness;
  double residual = 0.0;
  bool dense = true;
  int iterations = 0;
};

/// lambda(U) = inf { <Delta^U f, f> / <f, f> : supp f in U }: the bottom of
/// the spectrum of the walk killed on leaving U. Dense for |U| <= 2000,
/// shifted inverse iteration above. Returns 0 for U = X.
EigenResult dirichlet_eigenvalue(const MetricMeasureGraph& space, const VertexSet& domain);

/// Smallest nonzero eigenvalue of the Neumann operator on the induced
/// subgraph of U (the spectral gap). Throws DisconnectedError when the induced
/// subgraph is disconnected and InvalidArgument when |U| < 2.
EigenResult neumann_gap(const MetricMeasureGraph& space, const VertexSet& domain);

enum class KernelMode { kAuto, kDense, kKrylov };

/// Heat kernel h_t(x, y) = (exp(-t Delta))_{xy} / mu(y) of the whole space
/// or, with a domain, the killed kernel h^U_t of the walk killed on leaving U.
///
/// Dense mode diagonalises once and then evaluates any t in O(n^2); Krylov
/// mode applies the exponential to one vector at a time.
class HeatKernel {
 public:
  explicit HeatKernel(const MetricMeasureGraph& space, KernelMode mode = KernelMode::kAuto,
                      double tolerance = 1e-12);
  HeatKernel(const MetricMeasureGraph& space, VertexSet domain, KernelMode mode = KernelMode::kAuto,
             double tolerance = 1e-12);

  const DomainIndex& domain() const { return domain_; }
  bool dense() const { return eigensystem_ != nullptr; }

  /// h_t(x, y); x and y must lie in the domain.
  double operator()(double t, Vertex x, Vertex y) const;
  /// h_t(x, .) on the domain, in local order.
  Eigen::VectorXd row(double t, Vertex x) const;
  /// h_{t_k}(x, .) for an increasing list of times, reusing each step.
  std::vector<Eigen::VectorXd> rows(std::span<const double> times, Vertex x) const;
  /// (H_t f) on the domain; f is given on the domain in local order.
  Eigen::VectorXd apply(double t, const Eigen::VectorXd& f) const;
  /// P^x[walk still inside the domain at t] = sum_y h_t(x, y) mu(y).
  double survival(double t, Vertex x) const;

 private:
  void check_time(double t) const;
  int local_or_throw(Vertex v) const;
  Eigen::VectorXd exp_apply(double t, const Eigen::VectorXd& v) const;

  const MetricMeasureGraph* space_;
  DomainIndex domain_;
  Eigen::VectorXd sqrt_mu_;
  std::shared_ptr<const Eigensystem> eigensystem_;
  Eigen::SparseMatrix<double> sparse_;
  KrylovOptions krylov_;
};

double heat_kernel(const MetricMeasureGraph& space, double t, Vertex x, Vertex y);
/// H_t f for f indexed by vertex id.
Eigen::VectorXd heat_semigroup_apply(const MetricMeasureGraph& space, double t,
                                     const Eigen::VectorXd& f);
/// h^U_t(x, y). Throws InvalidArgument when x or y lies outside U.
double killed_kernel(const MetricMeasureGraph& space, const VertexSet& domain, double t, Vertex x,
                     Vertex y);
/// P^x[tau_U > t].
double killed_mass(const MetricMeasureGraph& space, const VertexSet& domain, double t, Vertex x);

/// P^x[tau_U <= t] by uniformisation. Every term of the series is
/// nonnegative, so tiny probabilities keep full relative accuracy.
double escape_probability(const MetricMeasureGraph& space, const VertexSet& domain, double t,
                          Vertex x);

struct DynkinHuntResult {
  double killed = 0.0;       ///< h^U_t(x, y), exact
  double free = 0.0;         ///< h_t(x, y), exact
  double expectation = 0.0;  ///< MC estimate of E^x[h_{t - tau}(X_tau, y); tau <= t]
  double se = 0.0;
  double residual = 0.0;  ///< |h^U - (h - expectation)|
  std::size_t paths = 0;
  std::size_t exits = 0;
};

DynkinHuntResult dynkin_hunt_residual(const MetricMeasureGraph& space, const VertexSet& domain,
                                      double t, Vertex x, Vertex y, std::size_t n_paths,
                                      std::uint64_t seed, unsigned workers = 1);

struct PoincareResult {
  Vertex center = 0;
  double radius = 0.0;
  double beta = 2.0;
  double neumann_gap = 0.0;
  double c_pi = 0.0;  ///< 1 / (r^beta * gap)
  EigenResult witness;
};

/// C_PI(B) for B = B(center, r).
PoincareResult poincare_constant(const MetricMeasureGraph& space, Vertex center, double radius,
                                 double beta);

struct PoincareCheck {
  double lhs = 0.0;  ///< sum_B (f - f_B)^2 mu
  double rhs = 0.0;  ///< C_PI r^beta E_B(f, f)
  bool holds = false;
};

/// Evaluates both sides of the Poincare inequality on the ball for f given on
/// the ball (local order).
PoincareCheck poincare_check(const MetricMeasureGraph& space, const PoincareResult& constant,
                             const Eigen::VectorXd& f);

struct ThirringResult {
  double lambda_a = 0.0;  ///< +inf when U \ A is empty
  double lambda_u = 0.0;  ///< Neumann gap of U (0 when U is disconnected)
  double rhs = 0.0;       ///< lambda_u mu(A cap U) / mu(U)
  bool holds = false;
};

/// lambda_A(U) >= lambda(U) mu(A cap U) / mu(U), with Neumann behaviour on the
/// boundary of U and Dirichlet conditions on A.
ThirringResult thirring_bound(const MetricMeasureGraph& space, const VertexSet& domain,
                              const VertexSet& removed, double tolerance = 1e-9);

/// Per-element spectral data of a net, shared across obstacle realisations.
struct NetSpectra {
  double scale = 0.0;
  double beta = 2.0;
  std::vector<double> neumann_gaps;  ///< lambda_N(K_i)
  double c_pi = 0.0;                 ///< max_i 1 / (t^beta lambda_N(K_i))
  int c_over = 1;                    ///< measured max multiplicity of the net
};

NetSpectra prepare_net_spectra(const MetricMeasureGraph& space, const NetCover& net, double beta);

struct NetEigenvalueBound {
  /// C_over^{-1} (C_PI t^beta)^{-1} min_i mu(obstacles cap K_i) / mu(K_i).
  double bound = 0.0;
  /// C_over^{-1} min_i lambda_N(K_i) mu(obstacles cap K_i) / mu(K_i).
  double element_bound = 0.0;
  double min_proportion = 0.0;
  std::size_t elements_used = 0;
  bool vacuous = false;
  /// Direct lambda of the depleted domain (+inf when empty).
  double lambda = 0.0;
  bool holds = false;
};

/// Lower bound on lambda(domain) through a net, the Poincare constant and the
/// Thirring inequality, where `obstacles` is an indicator over all vertices
/// and only net elements meeting the domain are used.
NetEigenvalueBound net_eigenvalue_lower_bound(const MetricMeasureGraph& space,
                                              const VertexSet& domain, const NetCover& net,
                                              const NetSpectra& spectra,
                                              std::span<const char> obstacles,
                                              bool compute_lambda = true);

// ---------------------------------------------------------------------------
// Two-sided sub-Gaussian estimate fitting

struct GaussianFitOptions {
  double beta_min = 1.2;
  double beta_max = 3.5;
  double beta_step = 0.005;
  /// beta used only for the finite-size guards before beta is known.
  double guard_beta = 2.0;
  /// Times with t^(1/guard_beta) below this radius are dropped: the ball
  /// volume is still a coarse step there.
  double min_radius = 2.0;
  /// Fit window for d(x,y)^beta / t.
  double window_low = 0.5;
  double window_high = 20.0;
  KernelMode mode = KernelMode::kAuto;
};

/// Fitted GE(beta): upper h <= C_upper / V exp(-c_upper z), lower
/// h >= c_lower / V exp(-C_lower z), z = (d^beta / t)^{1/(beta-1)} and
/// V = V(x, t^{1/beta}).
struct GaussianFit {
  bool rejected = false;
  std::string reason;
  double beta = 0.0;
  double diagonal_residual = 0.0;  ///< variance of log(h V) at the chosen beta
  double c_upper = 0.0;            ///< exponent constant of the upper bound
  double C_upper = 0.0;            ///< prefactor of the upper bound
  double c_lower = 0.0;            ///< prefactor of the lower bound
  double C_lower = 0.0;            ///< exponent constant of the lower bound
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::size_t out_of_window = 0;
  double violation_fraction = 0.0;  ///< on held-out in-window samples
  std::vector<double> times;        ///< grid after the finite-size guard
};

/// Stage 1 picks beta minimising the spread of log h_t(x,x) + log V(x,
/// t^{1/beta}); stage 2 fits the constants on half of the in-window
/// off-diagonal samples and reports violations on the other half.
/// Throws InvalidArgument for a degenerate grid (fewer than two times or less
/// than a decade).
GaussianFit fit_ge_beta(const MetricMeasureGraph& space, std::span<const Vertex> centers,
                        std::span<const double> times, const GaussianFitOptions& options = {});

}  // namespace sausage
