#include "fractalvec/operators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace fractalvec {

SparseMatrix incidence_matrix(const LevelGraph& graph) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * static_cast<std::size_t>(graph.edge_count()));
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [s, d] = graph.edges()[static_cast<std::size_t>(e)];
    t.emplace_back(e, s, -1.0);
    t.emplace_back(e, d, 1.0);
  }
  SparseMatrix g(graph.edge_count(), graph.vertex_count());
  g.setFromTriplets(t.begin(), t.end());
  return g;
}

SparseMatrix laplacian_matrix(const LevelGraph& graph) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * static_cast<std::size_t>(graph.edge_count()));
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [s, d] = graph.edges()[static_cast<std::size_t>(e)];
    const double c = graph.conductance()[static_cast<std::size_t>(e)];
    t.emplace_back(s, s, c);
    t.emplace_back(d, d, c);
    t.emplace_back(s, d, -c);
    t.emplace_back(d, s, -c);
  }
  SparseMatrix l(graph.vertex_count(), graph.vertex_count());
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

Eigen::VectorXd conductance_vector(const LevelGraph& graph) {
  return Eigen::Map<const Eigen::VectorXd>(graph.conductance().data(), graph.edge_count());
}

Eigen::MatrixXd generator_matrix(const MeasureWeights& m) {
  m.require_positive("generator_matrix");
  const Eigen::MatrixXd l = Eigen::MatrixXd(laplacian_matrix(*m.graph()));
  return -(m.values().cwiseInverse().asDiagonal() * l);
}

struct LaplacianSolver::Impl {
  int n = 0;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
};

LaplacianSolver::LaplacianSolver(const LevelGraph& graph) {
  if (!graph.is_connected()) throw PreconditionError("Laplacian solve needs a connected graph");
  auto impl = std::make_shared<Impl>();
  impl->n = graph.vertex_count();
  if (impl->n > 1) {
    const SparseMatrix l = laplacian_matrix(graph);
    const SparseMatrix reduced = l.bottomRightCorner(impl->n - 1, impl->n - 1);
    impl->ldlt.compute(reduced);
    if (impl->ldlt.info() != Eigen::Success) throw SolverError("grounded Laplacian factorization failed");
  }
  impl_ = std::move(impl);
}

Eigen::VectorXd LaplacianSolver::solve(const Eigen::VectorXd& b, const Eigen::VectorXd& weights) const {
  const int n = impl_->n;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (n > 1) {
    x.tail(n - 1) = impl_->ldlt.solve(b.tail(n - 1));
    if (impl_->ldlt.info() != Eigen::Success) throw SolverError("grounded Laplacian solve failed");
  }
  x.array() -= weights.dot(x) / weights.sum();
  return x;
}

Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& stiffness, const Eigen::VectorXd& weights) {
  const Eigen::VectorXd s = weights.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd sym = s.asDiagonal() * stiffness * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolverError("dense symmetric eigensolver failed");
  return solver.eigenvalues();
}

}  // namespace fractalvec
