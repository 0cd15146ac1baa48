#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <span>
#include <vector>

#include "sausage/space.hpp"

namespace sausage {

/// Largest domain handled by dense symmetric eigensolves.
inline constexpr std::size_t kDenseLimit = 2000;

/// Local numbering of a vertex subset.
class DomainIndex {
 public:
  DomainIndex(std::size_t space_size, VertexSet vertices);

  std::size_t size() const { return vertices_.size(); }
  const VertexSet& vertices() const { return vertices_; }
  Vertex vertex(std::size_t local) const { return vertices_[local]; }
  /// Local index of v, or -1 when v is outside the domain.
  int local(Vertex v) const { return local_[v]; }
  bool contains(Vertex v) const { return local_[v] >= 0; }

 private:
  VertexSet vertices_;
  std::vector<int> local_;
};

/// How the operator treats edges leaving the domain.
enum class Boundary {
  kKilled,   ///< keep the full degree on the diagonal: walk dies on exit
  kNeumann,  ///< induced subgraph only: walk reflects at the boundary
};

/// S = M^{-1/2} L M^{-1/2} restricted to the domain. S is symmetric and
/// unitarily equivalent (in L2(mu)) to the Laplacian Delta = M^{-1} L.
Eigen::MatrixXd symmetric_operator_dense(const MetricMeasureGraph& space, const DomainIndex& domain,
                                         Boundary boundary);
Eigen::SparseMatrix<double> symmetric_operator_sparse(const MetricMeasureGraph& space,
                                                      const DomainIndex& domain, Boundary boundary);
/// sqrt(mu) on the domain.
Eigen::VectorXd sqrt_measure(const MetricMeasureGraph& space, const DomainIndex& domain);

/// Full eigendecomposition of a dense symmetric operator, ascending order.
class Eigensystem {
 public:
  explicit Eigensystem(const Eigen::MatrixXd& symmetric);

  const Eigen::VectorXd& values() const { return values_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }
  /// exp(-t S) v
  Eigen::VectorXd apply_exp(double t, const Eigen::VectorXd& v) const;
  /// exp(-t S)
  Eigen::MatrixXd exp(double t) const;
  /// Row i of exp(-t S).
  Eigen::VectorXd exp_row(double t, Eigen::Index i) const;

 private:
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
};

struct KrylovOptions {
  double tolerance = 1e-12;  ///< relative to ||v||
  int max_dimension = 60;
};

/// exp(-t S) v for sparse symmetric positive semidefinite S by Lanczos with
/// full reorthogonalisation and adaptive substeps.
Eigen::VectorXd krylov_exp(const Eigen::SparseMatrix<double>& S, double t,
                           const Eigen::VectorXd& v, const KrylovOptions& options = {});

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;  ///< unit Euclidean norm
  double residual = 0.0;   ///< ||S v - value v||
  int iterations = 0;
};

/// Lowest eigenpair of sparse symmetric S by shifted inverse iteration with a
/// deterministic start vector. `deflate`, if given, is projected out at every
/// step (it must be an exact null vector of S). Throws ConvergenceError when
/// the relative residual stays above `tolerance`.
Eigenpair lowest_eigenpair_sparse(const Eigen::SparseMatrix<double>& S, double tolerance = 1e-10,
                                  const std::optional<Eigen::VectorXd>& deflate = std::nullopt,
                                  int max_iterations = 5000);

}  // namespace sausage
