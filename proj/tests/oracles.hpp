#pragma once

// Independent reference computations for the test suites. None of these
// share code paths with the library's solvers: kernels go through the
// non-symmetric generator and Eigen's matrix exponential, eigenvalues through
// the generalized problem L f = lambda M f.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <limits>
#include <map>
#include <algorithm>
#include <vector>

#include "sausage/space.hpp"

namespace oracle {

using sausage::MetricMeasureGraph;
using sausage::Vertex;
using sausage::VertexSet;

/// Markov generator Q restricted to `domain` (killed outside).
inline Eigen::MatrixXd generator(const MetricMeasureGraph& g, const VertexSet& domain) {
  const auto n = static_cast<Eigen::Index>(domain.size());
  std::map<Vertex, Eigen::Index> pos;
  for (Eigen::Index i = 0; i < n; ++i) pos[domain[static_cast<std::size_t>(i)]] = i;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vertex v = domain[static_cast<std::size_t>(i)];
    double out = 0.0;
    for (const auto& a : g.neighbors(v)) {
      out += a.conductance;
      auto it = pos.find(a.to);
      if (it != pos.end()) Q(i, it->second) += a.conductance / g.measure(v);
    }
    Q(i, i) -= out / g.measure(v);
  }
  return Q;
}

inline VertexSet everything(const MetricMeasureGraph& g) {
  VertexSet all(g.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Vertex>(i);
  return all;
}

/// Transition matrix P_t = exp(t Q) on the domain.
inline Eigen::MatrixXd transition(const MetricMeasureGraph& g, const VertexSet& domain, double t) {
  const Eigen::MatrixXd tQ = t * generator(g, domain);
  return tQ.exp();
}

/// h_t(x, y) = P_t(x, y) / mu(y), local indices.
inline Eigen::MatrixXd kernel(const MetricMeasureGraph& g, const VertexSet& domain, double t) {
  Eigen::MatrixXd P = transition(g, domain, t);
  for (Eigen::Index j = 0; j < P.cols(); ++j) P.col(j) /= g.measure(domain[static_cast<std::size_t>(j)]);
  return P;
}

/// Weighted Laplacian on the domain: killed keeps every incident edge on the
/// diagonal, Neumann only the edges inside the domain.
inline Eigen::MatrixXd laplacian(const MetricMeasureGraph& g, const VertexSet& domain, bool neumann) {
  const auto n = static_cast<Eigen::Index>(domain.size());
  std::map<Vertex, Eigen::Index> pos;
  for (Eigen::Index i = 0; i < n; ++i) pos[domain[static_cast<std::size_t>(i)]] = i;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& a : g.neighbors(domain[static_cast<std::size_t>(i)])) {
      auto it = pos.find(a.to);
      if (it != pos.end()) {
        L(i, it->second) -= a.conductance;
        L(i, i) += a.conductance;
      } else if (!neumann) {
        L(i, i) += a.conductance;
      }
    }
  }
  return L;
}

/// Ascending eigenvalues of L f = lambda M f.
inline Eigen::VectorXd generalized_spectrum(const MetricMeasureGraph& g, const VertexSet& domain,
                                            const Eigen::MatrixXd& L) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(L.rows(), L.cols());
  for (Eigen::Index i = 0; i < L.rows(); ++i) M(i, i) = g.measure(domain[static_cast<std::size_t>(i)]);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(L, M, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

inline double killed_lambda(const MetricMeasureGraph& g, const VertexSet& domain) {
  return generalized_spectrum(g, domain, laplacian(g, domain, false))(0);
}

/// Second Neumann eigenvalue with multiplicity.
inline double neumann_second(const MetricMeasureGraph& g, const VertexSet& domain) {
  if (domain.size() < 2) return 0.0;
  return std::max(0.0, generalized_spectrum(g, domain, laplacian(g, domain, true))(1));
}

/// Smallest eigenvalue of the Neumann-on-U form among functions vanishing on A.
inline double thirring_lambda_a(const MetricMeasureGraph& g, const VertexSet& U, const VertexSet& A) {
  VertexSet keep;
  for (Vertex v : U) {
    if (!std::binary_search(A.begin(), A.end(), v)) keep.push_back(v);
  }
  if (keep.empty()) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd L = laplacian(g, U, true);
  std::vector<Eigen::Index> idx;
  for (Vertex v : keep) idx.push_back(std::lower_bound(U.begin(), U.end(), v) - U.begin());
  Eigen::MatrixXd sub(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < idx.size(); ++b) sub(a, b) = L(idx[a], idx[b]);
  }
  return std::max(0.0, generalized_spectrum(g, keep, sub)(0));
}

/// P[sum_v mu(v) 1[occupied] <= frac mu(K)] by enumerating all patterns.
inline double cramer_brute_force(const MetricMeasureGraph& g, const VertexSet& block, double nu,
                                 double frac) {
  const std::size_t n = block.size();
  const double total = g.mass(block);
  double acc = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double prob = 1.0, mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = 1.0 - std::exp(-nu * g.measure(block[i]));
      if (mask >> i & 1u) {
        prob *= p;
        mass += g.measure(block[i]);
      } else {
        prob *= 1.0 - p;
      }
    }
    if (mass <= frac * total + 1e-12) acc += prob;
  }
  return acc;
}

/// E[exp(-nu mu(C_s))] on the pair {a, b} started from a.
inline double two_state_moment(double w, double mu_a, double mu_b, double nu, double s) {
  const double q = w / mu_a;
  return std::exp(-nu * mu_a) * (std::exp(-q * s) + (1.0 - std::exp(-q * s)) * std::exp(-nu * mu_b));
}

/// Two-vertex kernel h_t(a, b) with eigenvalues {0, w/mu_a + w/mu_b}.
inline double two_state_kernel(double w, double mu_a, double mu_b, double t, bool same) {
  const double total = mu_a + mu_b;
  const double decay = std::exp(-t * (w / mu_a + w / mu_b));
  if (same) return (1.0 / total) + decay * mu_b / (mu_a * total);
  return (1.0 - decay) / total;
}

/// Walk dimension from on-diagonal decay and volume growth: h_t(x,x) ~ t^{-a/b}
/// with V(x, r) ~ r^a, so b = a / (decay exponent). Both exponents are plain
/// log-log least-squares slopes. Times are t0 2^k, reached by squaring
/// exp(t0 Q), so keep the graph to a couple of thousand vertices.
inline double diagonal_decay_beta(const MetricMeasureGraph& g, Vertex x, double t0, int doublings,
                                  const std::vector<double>& radii) {
  auto slope = [](const std::vector<double>& u, const std::vector<double>& v) {
    double mu = 0, mv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      mu += u[i];
      mv += v[i];
    }
    mu /= static_cast<double>(u.size());
    mv /= static_cast<double>(u.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      num += (u[i] - mu) * (v[i] - mv);
      den += (u[i] - mu) * (u[i] - mu);
    }
    return num / den;
  };
  std::vector<double> lt, lh, lr, lv;
  Eigen::MatrixXd P = (t0 * generator(g, everything(g))).exp();
  double t = t0;
  for (int k = 0; k <= doublings; ++k) {
    if (k > 0) {
      P = P * P;
      t *= 2.0;
    }
    lt.push_back(std::log(t));
    lh.push_back(std::log(P(x, x) / g.measure(x)));
  }
  for (double r : radii) {
    lr.push_back(std::log(r));
    lv.push_back(std::log(g.volume(x, r)));
  }
  return slope(lr, lv) / -slope(lt, lh);
}

/// Connected subset grown breadth-first from `seed` up to `size` vertices.
template <class Rng>
VertexSet grow_connected(const MetricMeasureGraph& g, Vertex seed, std::size_t size, Rng& rng) {
  std::vector<char> in(g.size(), 0);
  VertexSet frontier{seed}, out{seed};
  in[seed] = 1;
  while (out.size() < size && !frontier.empty()) {
    const std::size_t k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(frontier.size()));
    const Vertex v = frontier[std::min(k, frontier.size() - 1)];
    bool grew = false;
    for (const auto& a : g.neighbors(v)) {
      if (!in[a.to]) {
        in[a.to] = 1;
        out.push_back(a.to);
        frontier.push_back(a.to);
        grew = true;
        break;
      }
    }
    if (!grew) frontier.erase(std::find(frontier.begin(), frontier.end(), v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
