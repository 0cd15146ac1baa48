#include "sausage/linalg.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "sausage/error.hpp"
#include "sausage/rng.hpp"

namespace sausage {

DomainIndex::DomainIndex(std::size_t space_size, VertexSet vertices)
    : vertices_(std::move(vertices)), local_(space_size, -1) {
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vertex v = vertices_[i];
    if (v < 0 || static_cast<std::size_t>(v) >= space_size) {
      throw InvalidArgument("domain vertex " + std::to_string(v) + " not in space");
    }
    local_[v] = static_cast<int>(i);
  }
}

namespace {

template <class Emit>
void for_each_entry(const MetricMeasureGraph& space, const DomainIndex& domain, Boundary boundary,
                    Emit&& emit) {
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const Vertex x = domain.vertex(i);
    const double mx = space.measure(x);
    double diagonal = boundary == Boundary::kKilled ? space.degree(x) : 0.0;
    for (const Arc& a : space.neighbors(x)) {
      const int j = domain.local(a.to);
      if (j < 0) continue;
      if (boundary == Boundary::kNeumann) diagonal += a.conductance;
      emit(i, static_cast<std::size_t>(j), -a.conductance / std::sqrt(mx * space.measure(a.to)));
    }
    emit(i, i, diagonal / mx);
  }
}

}  // namespace

Eigen::MatrixXd symmetric_operator_dense(const MetricMeasureGraph& space, const DomainIndex& domain,
                                         Boundary boundary) {
  const auto n = static_cast<Eigen::Index>(domain.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for_each_entry(space, domain, boundary, [&](std::size_t i, std::size_t j, double value) {
    S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += value;
  });
  return S;
}

Eigen::SparseMatrix<double> symmetric_operator_sparse(const MetricMeasureGraph& space,
                                                      const DomainIndex& domain, Boundary boundary) {
  std::vector<Eigen::Triplet<double>> triplets;
  for_each_entry(space, domain, boundary, [&](std::size_t i, std::size_t j, double value) {
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), value);
  });
  const auto n = static_cast<Eigen::Index>(domain.size());
  Eigen::SparseMatrix<double> S(n, n);
  S.setFromTriplets(triplets.begin(), triplets.end());
  return S;
}

Eigen::VectorXd sqrt_measure(const MetricMeasureGraph& space, const DomainIndex& domain) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(domain.size()));
  for (std::size_t i = 0; i < domain.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = std::sqrt(space.measure(domain.vertex(i)));
  }
  return out;
}

// ---------------------------------------------------------------------------

Eigensystem::Eigensystem(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) {
    values_.resize(0);
    vectors_.resize(0, 0);
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense symmetric eigensolver failed", 0.0);
  }
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Eigen::VectorXd Eigensystem::apply_exp(double t, const Eigen::VectorXd& v) const {
  Eigen::VectorXd coeff = vectors_.transpose() * v;
  coeff.array() *= (-t * values_.array()).exp();
  return vectors_ * coeff;
}

Eigen::MatrixXd Eigensystem::exp(double t) const {
  const Eigen::VectorXd decay = (-t * values_.array()).exp();
  return vectors_ * decay.asDiagonal() * vectors_.transpose();
}

Eigen::VectorXd Eigensystem::exp_row(double t, Eigen::Index i) const {
  Eigen::VectorXd coeff = vectors_.row(i).transpose();
  coeff.array() *= (-t * values_.array()).exp();
  return vectors_ * coeff;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd krylov_exp(const Eigen::SparseMatrix<double>& S, double t,
                           const Eigen::VectorXd& v, const KrylovOptions& options) {
  if (t < 0.0) throw InvalidArgument("krylov_exp requires t >= 0");
  const Eigen::Index n = S.rows();
  Eigen::VectorXd w = v;
  const double norm0 = v.norm();
  if (t == 0.0 || norm0 == 0.0 || n == 0) return w;
  const int max_m = static_cast<int>(std::min<Eigen::Index>(options.max_dimension, n));

  Eigen::MatrixXd basis(n, max_m + 1);
  std::vector<double> alpha(max_m), beta(max_m + 1);
  double done = 0.0;
  double step = t;
  int guard = 0;
  while (done < t) {
    if (++guard > 1'000'000) throw ConvergenceError("krylov_exp: too many substeps", step);
    const double bnorm = w.norm();
    if (bnorm == 0.0) break;
    basis.col(0) = w / bnorm;
    int m = 0;
    bool happy = false;
    for (int j = 0; j < max_m; ++j) {
      Eigen::VectorXd u = S * basis.col(j);
      alpha[j] = basis.col(j).dot(u);
      u -= alpha[j] * basis.col(j);
      if (j > 0) u -= beta[j] * basis.col(j - 1);
      // Full reorthogonalisation, twice is enough.
      for (int pass = 0; pass < 2; ++pass) {
        u -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * u);
      }
      beta[j + 1] = u.norm();
      m = j + 1;
      if (beta[j + 1] <= 1e-13 * std::max(1.0, std::abs(alpha[j]))) {
        happy = true;
        break;
      }
      basis.col(j + 1) = u / beta[j + 1];
    }
    Eigen::VectorXd diag(m), sub(std::max(m - 1, 0));
    for (int j = 0; j < m; ++j) diag(j) = alpha[j];
    for (int j = 0; j + 1 < m; ++j) sub(j) = beta[j + 1];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& Q = tri.eigenvectors();
    const Eigen::VectorXd& theta = tri.eigenvalues();

    const double remaining = t - done;
    step = std::min(step, remaining);
    for (;;) {
      Eigen::VectorXd coeff = Q.row(0).transpose();
      coeff.array() *= (-step * theta.array()).exp();
      const Eigen::VectorXd small = Q * coeff;  // exp(-step T) e1
      const double error = happy ? 0.0 : bnorm * beta[m] * std::abs(small(m - 1));
      if (error <= options.tolerance * norm0 * step / t || step < 1e-14 * t) {
        w = bnorm * (basis.leftCols(m) * small);
        done += step;
        if (done >= t * (1.0 - 1e-15)) done = t;
        if (error < 0.1 * options.tolerance * norm0 * step / t) step *= 1.5;
        break;
      }
      step *= 0.5;
    }
  }
  return w;
}

// ---------------------------------------------------------------------------

Eigenpair lowest_eigenpair_sparse(const Eigen::SparseMatrix<double>& S, double tolerance,
                                  const std::optional<Eigen::VectorXd>& deflate,
                                  int max_iterations) {
  const Eigen::Index n = S.rows();
  if (n == 0) throw InvalidArgument("lowest_eigenpair_sparse on an empty operator");
  Eigen::VectorXd null_dir;
  if (deflate) null_dir = deflate->normalized();
  auto project = [&](Eigen::VectorXd& x) {
    if (deflate) x -= null_dir.dot(x) * null_dir;
  };
  const double scale = std::max(1e-300, S.diagonal().cwiseAbs().maxCoeff());
  // A small shift keeps the factorisation nonsingular when S has a kernel.
  const double shift = deflate ? 1e-8 * scale : 0.0;
  Eigen::SparseMatrix<double> shifted = S;
  if (shift != 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
  if (factor.info() != Eigen::Success) {
    throw ConvergenceError("sparse factorisation failed in inverse iteration", 0.0);
  }

  auto rng = seed_stream(0x5EED5EEDULL, StreamLabel::kTestFunction, 0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 0.25 * rng.uniform();
  project(x);
  x.normalize();

  Eigenpair out;
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd y = factor.solve(x);
    project(y);
    const double norm = y.norm();
    if (!(norm > 0.0)) throw ConvergenceError("inverse iteration collapsed", 0.0);
    x = y / norm;
    const Eigen::VectorXd Sx = S * x;
    const double rq = x.dot(Sx);
    const double residual = (Sx - rq * x).norm();
    out = {rq, x, residual, it};
    if (residual <= tolerance * std::max(std::abs(rq), 1e-300) || residual <= 1e-15 * scale) {
      return out;
    }
  }
  throw ConvergenceError("inverse iteration did not converge", out.residual);
}

}  // namespace sausage
