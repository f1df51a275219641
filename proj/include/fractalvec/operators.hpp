#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fractalvec/fields.hpp"

namespace fractalvec {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Edge-vertex incidence G: (G f)[e] = f(dst) - f(src). Rows are edges.
SparseMatrix incidence_matrix(const LevelGraph& graph);

/// Stiffness matrix L = G^T C G, so that energy(f, g) = f^T L g.
SparseMatrix laplacian_matrix(const LevelGraph& graph);

/// Conductances as a vector indexed by edge.
Eigen::VectorXd conductance_vector(const LevelGraph& graph);

/// Matrix of the generator A = -M^{-1} L (dense).
Eigen::MatrixXd generator_matrix(const MeasureWeights& m);

/// Solver for L x = b on a connected graph with sum(b) = 0. Grounds vertex 0 and
/// factors the reduced SPD system once; solutions are returned with zero m-mean.
class LaplacianSolver {
 public:
  explicit LaplacianSolver(const LevelGraph& graph);

  /// Solves L x = b and shifts x to zero mean under `weights` (any positive vector).
  Eigen::VectorXd solve(const Eigen::VectorXd& b, const Eigen::VectorXd& weights) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Eigenvalues (ascending) of the symmetric pencil K x = lambda diag(w) x, w > 0.
Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& stiffness, const Eigen::VectorXd& weights);

}  // namespace fractalvec
