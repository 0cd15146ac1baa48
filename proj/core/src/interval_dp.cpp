#include <algorithm>
#include <cmath>
#include <map>

#include "sausage/asymptotics.hpp"
#include "sausage/error.hpp"

namespace sausage {

std::vector<Vertex> path_order(const MetricMeasureGraph& space) {
  const std::size_t n = space.size();
  if (n == 1) return {0};
  if (space.edges().size() != n - 1) throw InvalidArgument("interval DP needs a path graph (found a cycle)");
  Vertex end = -1;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t deg = space.neighbors(static_cast<Vertex>(v)).size();
    if (deg > 2) throw InvalidArgument("interval DP needs a path graph (vertex of degree > 2)");
    if (deg == 1 && end < 0) end = static_cast<Vertex>(v);
  }
  std::vector<Vertex> order{end};
  Vertex prev = -1, cur = end;
  while (order.size() < n) {
    Vertex next = -1;
    for (const Arc& a : space.neighbors(cur)) {
      if (a.to != prev) next = a.to;
    }
    prev = cur;
    cur = next;
    order.push_back(cur);
  }
  return order;
}

namespace {

struct Segment {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd overlap;  ///< Q^T sqrt(mu)
  Eigen::VectorXd sqrt_mu;
};

class PathSegments {
 public:
  PathSegments(const MetricMeasureGraph& space, std::vector<Vertex> order)
      : space_(space), order_(std::move(order)) {
    const std::size_t n = order_.size();
    link_.assign(n + 1, 0.0);
    length_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (const Arc& a : space.neighbors(order_[i])) {
        if (a.to == order_[i + 1]) {
          link_[i + 1] = a.conductance;
          length_[i + 1] = a.length;
        }
      }
    }
    coord_.assign(n, 0.0);
    prefix_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) coord_[i] = coord_[i - 1] + length_[i];
      prefix_[i + 1] = prefix_[i] + space.measure(order_[i]);
    }
  }

  std::size_t size() const { return order_.size(); }
  std::size_t index_of(Vertex v) const {
    return static_cast<std::size_t>(std::find(order_.begin(), order_.end(), v) - order_.begin());
  }

  /// mu of the eps-dilation of order[a..b].
  double dilated_mass(std::size_t a, std::size_t b, double eps) const {
    const double lo = coord_[a] - eps - 1e-12;
    const double hi = coord_[b] + eps + 1e-12;
    const auto left = std::lower_bound(coord_.begin(), coord_.end(), lo) - coord_.begin();
    const auto right = std::upper_bound(coord_.begin(), coord_.end(), hi) - coord_.begin();
    return prefix_[static_cast<std::size_t>(right)] - prefix_[static_cast<std::size_t>(left)];
  }

  /// P[walk from order[p] stays in order[a..b] up to time s].
  double stay(std::size_t a, std::size_t b, std::size_t p, double s) {
    const Segment& seg = segment(a, b);
    const Eigen::Index i = static_cast<Eigen::Index>(p - a);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < seg.values.size(); ++k) {
      acc += std::exp(-s * seg.values(k)) * seg.vectors(i, k) * seg.overlap(k);
    }
    return std::clamp(acc / seg.sqrt_mu(i), 0.0, 1.0);
  }

  void clear_cache() { cache_.clear(); }
  std::size_t eigensolves() const { return solves_; }

 private:
  const Segment& segment(std::size_t a, std::size_t b) {
    std::vector<double> key;
    key.reserve(2 * (b - a) + 3);
    key.push_back(link_[a]);
    key.push_back(link_[b + 1]);
    for (std::size_t i = a; i <= b; ++i) {
      key.push_back(space_.measure(order_[i]));
      if (i < b) key.push_back(link_[i + 1]);
    }
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    const Eigen::Index m = static_cast<Eigen::Index>(b - a + 1);
    Eigen::VectorXd diag(m), sub(std::max<Eigen::Index>(m - 1, 0)), sqrt_mu(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::size_t g = a + static_cast<std::size_t>(i);
      const double mu = space_.measure(order_[g]);
      sqrt_mu(i) = std::sqrt(mu);
      diag(i) = (link_[g] + link_[g + 1]) / mu;
    }
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
      sub(i) = -link_[a + static_cast<std::size_t>(i) + 1] / (sqrt_mu(i) * sqrt_mu(i + 1));
    }
    Segment seg;
    if (m == 1) {
      seg.values = diag;
      seg.vectors = Eigen::MatrixXd::Ones(1, 1);
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
      solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      if (solver.info() != Eigen::Success) throw ConvergenceError("segment eigensolve failed", 0.0);
      seg.values = solver.eigenvalues();
      seg.vectors = solver.eigenvectors();
    }
    seg.overlap = seg.vectors.transpose() * sqrt_mu;
    seg.sqrt_mu = sqrt_mu;
    ++solves_;
    return cache_.emplace(std::move(key), std::move(seg)).first->second;
  }

  const MetricMeasureGraph& space_;
  std::vector<Vertex> order_;
  std::vector<double> link_;    ///< link_[i] joins order[i-1] and order[i]; 0 past the ends
  std::vector<double> length_;
  std::vector<double> coord_;
  std::vector<double> prefix_;
  std::map<std::vector<double>, Segment> cache_;
  std::size_t solves_ = 0;
};

}  // namespace

IntervalDpResult interval_dp(const MetricMeasureGraph& space, Vertex x, double s, double nu,
                             double epsilon, double tolerance) {
  if (!space.contains(x)) throw InvalidArgument("interval_dp: start not in space");
  if (!(s >= 0.0) || !(nu >= 0.0) || !(epsilon >= 0.0)) {
    throw InvalidArgument("interval_dp: need s, nu, eps >= 0");
  }
  PathSegments path(space, path_order(space));
  IntervalDpResult out;
  if (nu == 0.0) {
    out.value = 1.0;
    out.covered_probability = 1.0;
    return out;
  }
  const std::size_t n = path.size();
  const std::size_t p = path.index_of(x);

  // stay() values; only the last three widths are kept.
  std::map<std::pair<std::size_t, std::size_t>, double> memo;
  auto S = [&](std::size_t a, std::size_t b) -> double {
    if (a > b || a > p || b < p) return 0.0;
    auto it = memo.find({a, b});
    if (it != memo.end()) return it->second;
    const double v = path.stay(a, b, p, s);
    memo.emplace(std::make_pair(a, b), v);
    return v;
  };

  double sum = 0.0;
  double covered = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    const std::size_t a_lo = p >= w ? p - w : 0;
    const std::size_t a_hi = std::min(p, n - 1 - w);
    for (std::size_t a = a_lo; a <= a_hi; ++a) {
      const std::size_t b = a + w;
      double prob = S(a, b);
      if (w > 0) prob += -S(a + 1, b) - S(a, b - 1) + (w > 1 ? S(a + 1, b - 1) : 0.0);
      prob = std::max(prob, 0.0);
      covered += prob;
      sum += prob * std::exp(-nu * path.dilated_mass(a, b, epsilon));
      ++out.intervals;
    }
    // Drop values two widths back; they are never needed again.
    for (auto it = memo.begin(); it != memo.end();) {
      const std::size_t width = it->first.second - it->first.first;
      it = width + 1 < w ? memo.erase(it) : std::next(it);
    }
    path.clear_cache();
    if (w + 1 >= n) {
      out.truncation_bound = 0.0;
      break;
    }
    double g_max = 0.0;
    const std::size_t next_lo = p >= w + 1 ? p - (w + 1) : 0;
    const std::size_t next_hi = std::min(p, n - 2 - w);
    for (std::size_t a = next_lo; a <= next_hi; ++a) {
      g_max = std::max(g_max, std::exp(-nu * path.dilated_mass(a, a + w + 1, epsilon)));
    }
    const double remaining = std::max(0.0, 1.0 - covered);
    out.truncation_bound = g_max * remaining;
    if (out.truncation_bound <= tolerance * sum) break;
  }
  out.value = sum;
  out.covered_probability = covered;
  out.eigensolves = path.eigensolves();
  return out;
}

}  // namespace sausage
