#include "sausage/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "sausage/error.hpp"
#include "sausage/parallel.hpp"
#include "sausage/walker.hpp"

namespace sausage {

// ---------------------------------------------------------------------------
// DirichletForm

Eigen::VectorXd DirichletForm::apply(const Eigen::VectorXd& f) const {
  const auto n = static_cast<Eigen::Index>(space_->size());
  Eigen::VectorXd out(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    double acc = 0.0;
    for (const Arc& a : space_->neighbors(static_cast<Vertex>(x))) {
      acc += a.conductance * (f(x) - f(a.to));
    }
    out(x) = acc / space_->measure(static_cast<Vertex>(x));
  }
  return out;
}

double DirichletForm::energy(const Eigen::VectorXd& f) const { return energy(f, f); }

double DirichletForm::energy(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  double acc = 0.0;
  for (const Edge& e : space_->edges()) {
    acc += e.conductance * (f(e.u) - f(e.v)) * (g(e.u) - g(e.v));
  }
  return acc;
}

double DirichletForm::inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  double acc = 0.0;
  for (Eigen::Index x = 0; x < f.size(); ++x) {
    acc += f(x) * g(x) * space_->measure(static_cast<Vertex>(x));
  }
  return acc;
}

Eigen::VectorXd DirichletForm::gradient_density(const Eigen::VectorXd& f) const {
  const auto n = static_cast<Eigen::Index>(space_->size());
  Eigen::VectorXd out(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    double acc = 0.0;
    for (const Arc& a : space_->neighbors(static_cast<Vertex>(x))) {
      const double d = f(x) - f(a.to);
      acc += a.conductance * d * d;
    }
    out(x) = acc / (2.0 * space_->measure(static_cast<Vertex>(x)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Eigenvalues

namespace {

EigenResult dense_bottom(const MetricMeasureGraph& space, const DomainIndex& index,
                         Boundary boundary, int which) {
  const Eigen::MatrixXd S = symmetric_operator_dense(space, index, boundary);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigensolve failed", 0.0);
  EigenResult out;
  out.domain = index.vertices();
  out.value = std::max(0.0, solver.eigenvalues()(which));
  const Eigen::VectorXd q = solver.eigenvectors().col(which);
  out.residual = (S * q - solver.eigenvalues()(which) * q).norm();
  out.witness = q.cwiseQuotient(sqrt_measure(space, index));
  if (out.witness.sum() < 0.0) out.witness = -out.witness;
  out.dense = true;
  return out;
}

}  // namespace

EigenResult dirichlet_eigenvalue(const MetricMeasureGraph& space, const VertexSet& domain) {
  if (domain.empty()) throw InvalidArgument("dirichlet_eigenvalue: empty domain");
  DomainIndex index(space.size(), domain);
  if (index.size() == space.size()) {
    // Nothing is killed on a finite connected space: constant ground state.
    EigenResult out;
    out.domain = index.vertices();
    out.value = 0.0;
    out.witness = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(space.size()),
                                            1.0 / std::sqrt(space.total_measure()));
    return out;
  }
  if (index.size() <= kDenseLimit) return dense_bottom(space, index, Boundary::kKilled, 0);
  const auto S = symmetric_operator_sparse(space, index, Boundary::kKilled);
  const Eigenpair pair = lowest_eigenpair_sparse(S, 1e-10);
  EigenResult out;
  out.domain = index.vertices();
  out.value = pair.value;
  out.residual = pair.residual;
  out.iterations = pair.iterations;
  out.dense = false;
  out.witness = pair.vector.cwiseQuotient(sqrt_measure(space, index));
  if (out.witness.sum() < 0.0) out.witness = -out.witness;
  return out;
}

EigenResult neumann_gap(const MetricMeasureGraph& space, const VertexSet& domain) {
  DomainIndex index(space.size(), domain);
  if (index.size() < 2) throw InvalidArgument("neumann_gap needs at least two vertices");
  if (!induced_connected(space, index.vertices())) {
    throw DisconnectedError("neumann_gap: induced subgraph is disconnected");
  }
  if (index.size() <= kDenseLimit) return dense_bottom(space, index, Boundary::kNeumann, 1);
  const auto S = symmetric_operator_sparse(space, index, Boundary::kNeumann);
  const Eigenpair pair = lowest_eigenpair_sparse(S, 1e-10, sqrt_measure(space, index));
  EigenResult out;
  out.domain = index.vertices();
  out.value = pair.value;
  out.residual = pair.residual;
  out.iterations = pair.iterations;
  out.dense = false;
  out.witness = pair.vector.cwiseQuotient(sqrt_measure(space, index));
  return out;
}

// ---------------------------------------------------------------------------
// HeatKernel

namespace {

VertexSet all_vertices(const MetricMeasureGraph& space) {
  VertexSet all(space.size());
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<Vertex>(v);
  return all;
}

}  // namespace

HeatKernel::HeatKernel(const MetricMeasureGraph& space, KernelMode mode, double tolerance)
    : HeatKernel(space, all_vertices(space), mode, tolerance) {}

HeatKernel::HeatKernel(const MetricMeasureGraph& space, VertexSet domain, KernelMode mode,
                       double tolerance)
    : space_(&space), domain_(space.size(), std::move(domain)) {
  if (domain_.size() == 0) throw InvalidArgument("HeatKernel: empty domain");
  sqrt_mu_ = sqrt_measure(space, domain_);
  krylov_.tolerance = tolerance;
  const bool dense = mode == KernelMode::kDense ||
                     (mode == KernelMode::kAuto && domain_.size() <= kDenseLimit);
  if (dense) {
    eigensystem_ = std::make_shared<const Eigensystem>(
        symmetric_operator_dense(space, domain_, Boundary::kKilled));
  } else {
    sparse_ = symmetric_operator_sparse(space, domain_, Boundary::kKilled);
  }
}

void HeatKernel::check_time(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("heat kernel time must be >= 0");
}

int HeatKernel::local_or_throw(Vertex v) const {
  if (!space_->contains(v) || !domain_.contains(v)) {
    throw InvalidArgument("vertex " + std::to_string(v) + " is outside the kernel's domain");
  }
  return domain_.local(v);
}

Eigen::VectorXd HeatKernel::exp_apply(double t, const Eigen::VectorXd& v) const {
  if (t == 0.0) return v;
  if (eigensystem_) return eigensystem_->apply_exp(t, v);
  return krylov_exp(sparse_, t, v, krylov_);
}

double HeatKernel::operator()(double t, Vertex x, Vertex y) const {
  check_time(t);
  const int i = local_or_throw(x);
  const int j = local_or_throw(y);
  if (t == 0.0) return i == j ? 1.0 / (sqrt_mu_(i) * sqrt_mu_(i)) : 0.0;
  if (eigensystem_) {
    const auto& Q = eigensystem_->vectors();
    const auto& lambda = eigensystem_->values();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      acc += std::exp(-t * lambda(k)) * Q(i, k) * Q(j, k);
    }
    return acc / (sqrt_mu_(i) * sqrt_mu_(j));
  }
  return row(t, x)(j);
}

Eigen::VectorXd HeatKernel::row(double t, Vertex x) const {
  check_time(t);
  const int i = local_or_throw(x);
  Eigen::VectorXd r = Eigen::VectorXd::Unit(sqrt_mu_.size(), i);
  if (t > 0.0) r = eigensystem_ ? eigensystem_->exp_row(t, i) : krylov_exp(sparse_, t, r, krylov_);
  r.array() /= sqrt_mu_.array() * sqrt_mu_(i);
  return r;
}

std::vector<Eigen::VectorXd> HeatKernel::rows(std::span<const double> times, Vertex x) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(times.size());
  if (eigensystem_) {
    for (double t : times) out.push_back(row(t, x));
    return out;
  }
  const int i = local_or_throw(x);
  Eigen::VectorXd v = Eigen::VectorXd::Unit(sqrt_mu_.size(), i);
  double now = 0.0;
  for (double t : times) {
    check_time(t);
    if (t < now) throw InvalidArgument("HeatKernel::rows needs increasing times");
    v = krylov_exp(sparse_, t - now, v, krylov_);
    now = t;
    Eigen::VectorXd r = v;
    r.array() /= sqrt_mu_.array() * sqrt_mu_(i);
    out.push_back(std::move(r));
  }
  return out;
}

Eigen::VectorXd HeatKernel::apply(double t, const Eigen::VectorXd& f) const {
  check_time(t);
  if (f.size() != sqrt_mu_.size()) throw InvalidArgument("HeatKernel::apply: size mismatch");
  Eigen::VectorXd g = f.cwiseProduct(sqrt_mu_);
  g = exp_apply(t, g);
  return g.cwiseQuotient(sqrt_mu_);
}

double HeatKernel::survival(double t, Vertex x) const {
  check_time(t);
  const int i = local_or_throw(x);
  if (t == 0.0) return 1.0;
  if (eigensystem_) {
    const auto& Q = eigensystem_->vectors();
    const auto& lambda = eigensystem_->values();
    const Eigen::VectorXd overlap = Q.transpose() * sqrt_mu_;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      acc += std::exp(-t * lambda(k)) * Q(i, k) * overlap(k);
    }
    return std::clamp(acc / sqrt_mu_(i), 0.0, 1.0);
  }
  const Eigen::VectorXd g = krylov_exp(sparse_, t, sqrt_mu_, krylov_);
  return std::clamp(g(i) / sqrt_mu_(i), 0.0, 1.0);
}

double heat_kernel(const MetricMeasureGraph& space, double t, Vertex x, Vertex y) {
  return HeatKernel(space)(t, x, y);
}

Eigen::VectorXd heat_semigroup_apply(const MetricMeasureGraph& space, double t,
                                     const Eigen::VectorXd& f) {
  return HeatKernel(space).apply(t, f);
}

double killed_kernel(const MetricMeasureGraph& space, const VertexSet& domain, double t, Vertex x,
                     Vertex y) {
  return HeatKernel(space, domain)(t, x, y);
}

double killed_mass(const MetricMeasureGraph& space, const VertexSet& domain, double t, Vertex x) {
  return HeatKernel(space, domain).survival(t, x);
}

double escape_probability(const MetricMeasureGraph& space, const VertexSet& domain, double t,
                          Vertex x) {
  if (t < 0.0) throw InvalidArgument("escape_probability requires t >= 0");
  const DomainIndex index(space.size(), domain);
  if (!index.contains(x)) return 1.0;  // already outside: tau = 0 <= t
  if (index.size() == space.size() || t == 0.0) return 0.0;
  const std::size_t n = index.size();
  double rate = 0.0;
  for (Vertex v : index.vertices()) rate = std::max(rate, space.holding_rate(v));
  if (rate == 0.0) return 0.0;
  // Uniformised one-step kernel: stay / move inside / leave.
  std::vector<double> stay(n), leave(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex v = index.vertex(i);
    const double denom = space.measure(v) * rate;
    stay[i] = 1.0 - space.holding_rate(v) / rate;
    double out = 0.0;
    for (const Arc& a : space.neighbors(v)) {
      if (!index.contains(a.to)) out += a.conductance;
    }
    leave[i] = out / denom;
  }
  std::vector<double> p(n, 0.0), next(n);
  p[index.local(x)] = 1.0;
  const double lambda = rate * t;
  double absorbed = 0.0;
  double total = 0.0;
  // log Poisson pmf at k = 0.
  double log_pmf = -lambda;
  for (std::size_t k = 1;; ++k) {
    double step_absorbed = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double mass = p[i];
      if (mass == 0.0) continue;
      step_absorbed += mass * leave[i];
      next[i] += mass * stay[i];
      const Vertex v = index.vertex(i);
      const double denom = space.measure(v) * rate;
      for (const Arc& a : space.neighbors(v)) {
        const int j = index.local(a.to);
        if (j >= 0) next[j] += mass * a.conductance / denom;
      }
    }
    p.swap(next);
    absorbed += step_absorbed;
    log_pmf += std::log(lambda) - std::log(static_cast<double>(k));
    total += std::exp(log_pmf) * absorbed;
    // Tail of the Poisson series beyond k, bounded geometrically once k > lambda.
    if (static_cast<double>(k) + 1.0 > lambda) {
      const double ratio = lambda / (static_cast<double>(k) + 1.0);
      const double tail = std::exp(log_pmf) * ratio / (1.0 - ratio) * absorbed;
      if ((absorbed > 0.0 && tail <= 1e-17 * total) || (absorbed > 0.0 && std::exp(log_pmf) < 1e-300)) break;
      if (absorbed == 0.0 && log_pmf < -745.0) break;
    }
    if (k > 100'000'000) throw ConvergenceError("escape_probability: series too long", total);
  }
  return std::min(total, 1.0);
}

// ---------------------------------------------------------------------------
// Dynkin-Hunt

DynkinHuntResult dynkin_hunt_residual(const MetricMeasureGraph& space, const VertexSet& domain,
                                      double t, Vertex x, Vertex y, std::size_t n_paths,
                                      std::uint64_t seed, unsigned workers) {
  const DomainIndex index(space.size(), domain);
  if (!space.contains(x) || !space.contains(y) || !index.contains(x) || !index.contains(y)) {
    throw InvalidArgument("dynkin_hunt_residual: x and y must lie in U");
  }
  if (t < 0.0) throw InvalidArgument("dynkin_hunt_residual requires t >= 0");
  const HeatKernel free_kernel(space);
  const HeatKernel killed_kernel(space, index.vertices());
  DynkinHuntResult out;
  out.free = free_kernel(t, x, y);
  out.killed = killed_kernel(t, x, y);
  out.paths = n_paths;

  const WalkSampler sampler(space);
  std::vector<double> samples(n_paths, 0.0);
  std::vector<char> exited(n_paths, 0);
  const std::vector<char> inside = to_mask(space.size(), index.vertices());
  parallel_for(n_paths, workers, [&](std::size_t k) {
    auto rng = seed_stream(seed, StreamLabel::kPath, k);
    Vertex v = x;
    double now = 0.0;
    for (;;) {
      now += sampler.holding_time(v, rng);
      if (now > t) return;
      v = sampler.jump(v, rng);
      if (!inside[v]) {
        exited[k] = 1;
        samples[k] = free_kernel(t - now, v, y);
        return;
      }
    }
  });
  const Estimate est = summarize(samples);
  out.expectation = est.value;
  out.se = est.se;
  out.exits = static_cast<std::size_t>(std::count(exited.begin(), exited.end(), 1));
  out.residual = std::abs(out.killed - (out.free - out.expectation));
  return out;
}

// ---------------------------------------------------------------------------
// Poincare

PoincareResult poincare_constant(const MetricMeasureGraph& space, Vertex center, double radius,
                                 double beta) {
  if (!(radius > 0.0)) throw InvalidArgument("poincare_constant requires r > 0");
  const VertexSet ball = space.ball(center, radius);
  if (ball.size() < 2) throw InvalidArgument("poincare_constant: ball has fewer than 2 vertices");
  PoincareResult out;
  out.center = center;
  out.radius = radius;
  out.beta = beta;
  out.witness = neumann_gap(space, ball);
  out.neumann_gap = out.witness.value;
  out.c_pi = 1.0 / (std::pow(radius, beta) * out.neumann_gap);
  return out;
}

PoincareCheck poincare_check(const MetricMeasureGraph& space, const PoincareResult& constant,
                             const Eigen::VectorXd& f) {
  const VertexSet& ball = constant.witness.domain;
  if (static_cast<std::size_t>(f.size()) != ball.size()) {
    throw InvalidArgument("poincare_check: f must be given on the ball");
  }
  const DomainIndex index(space.size(), ball);
  double mass = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const double m = space.measure(ball[i]);
    mass += m;
    weighted += m * f(static_cast<Eigen::Index>(i));
  }
  const double mean = weighted / mass;
  PoincareCheck out;
  double energy = 0.0;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const double d = f(static_cast<Eigen::Index>(i)) - mean;
    out.lhs += space.measure(ball[i]) * d * d;
    for (const Arc& a : space.neighbors(ball[i])) {
      const int j = index.local(a.to);
      if (j > static_cast<int>(i)) {
        const double g = f(static_cast<Eigen::Index>(i)) - f(j);
        energy += a.conductance * g * g;
      }
    }
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    norm += space.measure(ball[i]) * f(static_cast<Eigen::Index>(i)) * f(static_cast<Eigen::Index>(i));
  }
  out.rhs = constant.c_pi * std::pow(constant.radius, constant.beta) * energy;
  // Rounding in the mean leaves ~eps |f|^2 on the left even for constant f.
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9) + 1e-12 * norm;
  return out;
}

// ---------------------------------------------------------------------------
// Thirring

ThirringResult thirring_bound(const MetricMeasureGraph& space, const VertexSet& domain,
                              const VertexSet& removed, double tolerance) {
  if (domain.empty()) throw InvalidArgument("thirring_bound: empty U");
  if (!is_subset(removed, domain)) throw InvalidArgument("thirring_bound: A must be a subset of U");
  const DomainIndex index(space.size(), domain);
  const Eigen::MatrixXd S = symmetric_operator_dense(space, index, Boundary::kNeumann);
  ThirringResult out;
  if (index.size() >= 2) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    out.lambda_u = std::max(0.0, solver.eigenvalues()(1));
  }
  const VertexSet keep = set_difference(index.vertices(), removed);
  if (keep.empty()) {
    out.lambda_a = kInfinity;
  } else {
    std::vector<Eigen::Index> rows;
    for (Vertex v : keep) rows.push_back(index.local(v));
    Eigen::MatrixXd sub(rows.size(), rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = 0; b < rows.size(); ++b) sub(a, b) = S(rows[a], rows[b]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sub, Eigen::EigenvaluesOnly);
    out.lambda_a = std::max(0.0, solver.eigenvalues()(0));
  }
  out.rhs = out.lambda_u * space.mass(removed) / space.mass(index.vertices());
  out.holds = out.lambda_a >= out.rhs - tolerance * std::max(1.0, out.rhs);
  return out;
}

// ---------------------------------------------------------------------------
// Net bound

NetSpectra prepare_net_spectra(const MetricMeasureGraph& space, const NetCover& net, double beta) {
  NetSpectra out;
  out.scale = net.scale;
  out.beta = beta;
  out.c_over = std::max(1, net.max_overlap);
  const double scale_pow = std::pow(net.scale, beta);
  for (const VertexSet& element : net.elements) {
    // A one-vertex element has no Neumann gap; it cannot carry energy either.
    const double gap = element.size() < 2 ? kInfinity : neumann_gap(space, element).value;
    out.neumann_gaps.push_back(gap);
    if (std::isfinite(gap)) out.c_pi = std::max(out.c_pi, 1.0 / (scale_pow * gap));
  }
  return out;
}

NetEigenvalueBound net_eigenvalue_lower_bound(const MetricMeasureGraph& space,
                                              const VertexSet& domain, const NetCover& net,
                                              const NetSpectra& spectra,
                                              std::span<const char> obstacles,
                                              bool compute_lambda) {
  if (obstacles.size() != space.size()) {
    throw InvalidArgument("net_eigenvalue_lower_bound: obstacle mask has the wrong size");
  }
  NetEigenvalueBound out;
  const std::vector<char> in_domain = to_mask(space.size(), domain);
  out.min_proportion = kInfinity;
  double min_element = kInfinity;
  for (std::size_t i = 0; i < net.elements.size(); ++i) {
    const VertexSet& element = net.elements[i];
    if (std::none_of(element.begin(), element.end(), [&](Vertex v) { return in_domain[v]; })) {
      continue;
    }
    ++out.elements_used;
    double blocked = 0.0;
    for (Vertex v : element) {
      if (obstacles[v]) blocked += space.measure(v);
    }
    const double proportion = blocked / space.mass(element);
    out.min_proportion = std::min(out.min_proportion, proportion);
    const double gap = spectra.neumann_gaps[i];
    // A one-vertex element only forces energy when it is fully blocked.
    const double weighted = std::isfinite(gap) ? gap * proportion : (proportion >= 1.0 ? kInfinity : 0.0);
    min_element = std::min(min_element, weighted);
  }
  if (out.elements_used == 0) {
    out.min_proportion = 0.0;
    min_element = 0.0;
  }
  const double pi_factor =
      spectra.c_pi > 0.0 ? 1.0 / (spectra.c_pi * std::pow(spectra.scale, spectra.beta)) : 0.0;
  out.bound = pi_factor * out.min_proportion / spectra.c_over;
  out.element_bound = std::isfinite(min_element) ? min_element / spectra.c_over : 0.0;
  out.vacuous = out.min_proportion == 0.0;
  if (compute_lambda) {
    out.lambda = domain.empty() ? kInfinity : dirichlet_eigenvalue(space, domain).value;
    const double strongest = std::max(out.bound, out.element_bound);
    out.holds = out.lambda >= strongest * (1.0 - 1e-9) - 1e-12;
  }
  return out;
}

}  // namespace sausage
