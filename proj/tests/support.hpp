#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "fractalvec/energy.hpp"
#include "fractalvec/fields.hpp"
#include "fractalvec/forms.hpp"
#include "fractalvec/graph.hpp"

namespace testsupport {

using namespace fractalvec;

inline GraphRef gasket(int n) { return build_level(FractalSpec::sierpinski_gasket(), n); }
inline GraphRef interval(int n) { return build_level(FractalSpec::interval(), n); }
inline GraphRef triangle() { return gasket(0); }

inline Eigen::VectorXd random_vector(std::mt19937& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline ScalarField random_field(const GraphRef& g, std::mt19937& rng) {
  return ScalarField(g, random_vector(rng, g->vertex_count()));
}

inline OneForm random_form(const GraphRef& g, std::mt19937& rng) {
  return OneForm(g, random_vector(rng, g->edge_count()));
}

inline MeasureWeights uniform(const GraphRef& g) {
  return MeasureWeights(g, Eigen::VectorXd::Constant(g->vertex_count(), 1.0 / g->vertex_count()));
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

inline double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// Dense stiffness matrix straight from the edge list (oracle, independent of operators.cpp).
inline Eigen::MatrixXd dense_stiffness(const LevelGraph& g) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(g.vertex_count(), g.vertex_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [x, y] = g.edges()[static_cast<std::size_t>(e)];
    const double c = g.conductance()[static_cast<std::size_t>(e)];
    l(x, x) += c;
    l(y, y) += c;
    l(x, y) -= c;
    l(y, x) -= c;
  }
  return l;
}

/// Eigenvalues of -A = M^{-1} L by a dense generalized eigensolver (oracle).
inline Eigen::VectorXd dense_generator_spectrum(const LevelGraph& g, const Eigen::VectorXd& m) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_stiffness(g), Eigen::MatrixXd(m.asDiagonal()));
  return es.eigenvalues();
}

/// Mean-zero solution of L u = b via the bordered system [L m; m^T 0].
inline Eigen::VectorXd bordered_solve(const LevelGraph& g, const Eigen::VectorXd& m, const Eigen::VectorXd& b) {
  const int n = g.vertex_count();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + 1, n + 1);
  k.topLeftCorner(n, n) = dense_stiffness(g);
  k.block(0, n, n, 1) = m;
  k.block(n, 0, 1, n) = m.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs.head(n) = b;
  return k.fullPivLu().solve(rhs).head(n);
}

/// Value of the 1-form on the oriented pair (x, y).
inline double oriented(const OneForm& v, int x, int y) {
  const int e = v.graph()->find_edge(x, y);
  return v.graph()->edges()[static_cast<std::size_t>(e)].src == x ? v[e] : -v[e];
}

}  // namespace testsupport
