#include "fractalvec/forms.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <Eigen/Dense>

#include "fractalvec/operators.hpp"

namespace fractalvec {

OneForm derivation(const ScalarField& f) {
  const auto& graph = *f.graph();
  Eigen::VectorXd out(graph.edge_count());
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    out[e] = f[y] - f[x];
  }
  return OneForm(f.graph(), std::move(out));
}

double inner(const OneForm& v, const OneForm& w) {
  require_same_graph(v.graph(), w.graph(), "inner");
  return (conductance_vector(*v.graph()).array() * v.values().array() * w.values().array()).sum();
}

double norm(const OneForm& v) { return std::sqrt(inner(v, v)); }

std::complex<double> inner(const ComplexOneForm& v, const ComplexOneForm& w) {
  require_same_graph(v.graph(), w.graph(), "inner");
  const Eigen::VectorXcd c = conductance_vector(*v.graph()).cast<std::complex<double>>();
  return (c.array() * v.values().array() * w.values().conjugate().array()).sum();
}

OneForm action_scalar(const ScalarField& g, const OneForm& v) {
  require_same_graph(g.graph(), v.graph(), "action_scalar");
  const auto& graph = *g.graph();
  OneForm out = v;
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    out[e] *= 0.5 * (g[x] + g[y]);
  }
  return out;
}

OneForm embed_simple_tensor(const ScalarField& a, const ScalarField& b) { return action_scalar(b, derivation(a)); }

ScalarField divergence(const MeasureWeights& m, const OneForm& v) {
  require_same_graph(m.graph(), v.graph(), "divergence");
  m.require_positive("divergence");
  const auto& graph = *v.graph();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(graph.vertex_count());
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    const double flux = graph.conductance()[static_cast<std::size_t>(e)] * v[e];
    out[x] += flux;  // v(x,y) = v[e]
    out[y] -= flux;  // v(y,x) = -v[e]
  }
  return ScalarField(v.graph(), out.cwiseQuotient(m.values()));
}

HodgeParts hodge_decompose(const MeasureWeights& m, const OneForm& v) {
  require_same_graph(m.graph(), v.graph(), "hodge_decompose");
  m.require_positive("hodge_decompose");
  const auto& graph = *m.graph();
  if (!graph.is_connected()) throw PreconditionError("hodge_decompose: graph is disconnected");

  // A f = d* v  <=>  L f = G^T C v.
  const Eigen::VectorXd rhs = incidence_matrix(graph).transpose() * conductance_vector(graph).cwiseProduct(v.values());
  ScalarField potential(m.graph(), LaplacianSolver(graph).solve(rhs, m.values()));
  OneForm exact = derivation(potential);
  OneForm harmonic = v - exact;
  const double residual = divergence(m, harmonic).values().cwiseAbs().maxCoeff();
  const double scale = divergence(m, v).values().cwiseAbs().maxCoeff() + v.values().cwiseAbs().maxCoeff() *
                                                                              conductance_vector(graph).maxCoeff() /
                                                                              m.values().minCoeff();
  if (residual > 1e-8 * std::max(scale, 1e-300))
    throw SolverError("hodge_decompose: harmonic part has divergence residual " + std::to_string(residual));
  return HodgeParts{std::move(potential), std::move(exact), std::move(harmonic), residual};
}

std::vector<OneForm> harmonic_basis(const GraphRef& graph_ref) {
  const auto& graph = *graph_ref;
  if (!graph.is_connected()) throw PreconditionError("harmonic_basis: graph is disconnected");
  const int n = graph.vertex_count();
  const int edges = graph.edge_count();

  // BFS spanning tree rooted at vertex 0.
  std::vector<int> parent(static_cast<std::size_t>(n), -1), parent_edge(static_cast<std::size_t>(n), -1),
      depth(static_cast<std::size_t>(n), 0);
  std::vector<bool> in_tree(static_cast<std::size_t>(edges), false), seen(static_cast<std::size_t>(n), false);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = true;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop();
    for (const auto& inc : graph.neighbors(x)) {
      const auto y = static_cast<std::size_t>(inc.neighbor);
      if (seen[y]) continue;
      seen[y] = true;
      parent[y] = x;
      parent_edge[y] = inc.edge;
      depth[y] = depth[static_cast<std::size_t>(x)] + 1;
      in_tree[static_cast<std::size_t>(inc.edge)] = true;
      queue.push(inc.neighbor);
    }
  }
  // +1 if traversing u -> parent(u) follows the canonical orientation.
  auto up_sign = [&](int u) {
    return graph.edges()[static_cast<std::size_t>(parent_edge[static_cast<std::size_t>(u)])].src == u ? 1.0 : -1.0;
  };

  std::vector<Eigen::VectorXd> cycles;
  for (int e = 0; e < edges; ++e) {
    if (in_tree[static_cast<std::size_t>(e)]) continue;
    Eigen::VectorXd flow = Eigen::VectorXd::Zero(edges);
    const auto& [s, d] = graph.edges()[static_cast<std::size_t>(e)];
    flow[e] = 1.0;  // s -> d, then back to s through the tree
    int a = d, b = s;
    while (a != b) {
      if (depth[static_cast<std::size_t>(a)] >= depth[static_cast<std::size_t>(b)]) {
        flow[parent_edge[static_cast<std::size_t>(a)]] += up_sign(a);
        a = parent[static_cast<std::size_t>(a)];
      } else {
        flow[parent_edge[static_cast<std::size_t>(b)]] -= up_sign(b);
        b = parent[static_cast<std::size_t>(b)];
      }
    }
    cycles.push_back(std::move(flow));
  }

  std::vector<OneForm> basis;
  if (cycles.empty()) return basis;
  const Eigen::VectorXd c = conductance_vector(graph);
  const Eigen::VectorXd sqrt_c = c.cwiseSqrt();
  const auto k = static_cast<Eigen::Index>(cycles.size());
  // Circulation J gives the form v = J / c; orthonormalize sqrt(c) v = J / sqrt(c).
  Eigen::MatrixXd z(edges, k);
  for (Eigen::Index j = 0; j < k; ++j) z.col(j) = cycles[static_cast<std::size_t>(j)].cwiseQuotient(sqrt_c);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(edges, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd form = q.col(j).cwiseQuotient(sqrt_c);
    Eigen::Index arg = 0;
    form.cwiseAbs().maxCoeff(&arg);
    if (form[arg] < 0) form = -form;
    basis.emplace_back(graph_ref, std::move(form));
  }
  return basis;
}

std::vector<OneForm> harmonic_basis(const MeasureWeights& m) { return harmonic_basis(m.graph()); }

OneForm form_laplacian_apply(const MeasureWeights& m, const OneForm& v) { return derivation(divergence(m, v)); }

Eigen::VectorXd form_laplacian_spectrum(const MeasureWeights& m) {
  m.require_positive("form_laplacian_spectrum");
  const auto& graph = *m.graph();
  const Eigen::MatrixXd g = Eigen::MatrixXd(incidence_matrix(graph));
  const Eigen::VectorXd sqrt_c = conductance_vector(graph).cwiseSqrt();
  // -Delta_1 = G M^{-1} G^T C, symmetrized by C^{1/2}.
  const Eigen::MatrixXd half = sqrt_c.asDiagonal() * g * m.values().cwiseSqrt().cwiseInverse().asDiagonal();
  const Eigen::MatrixXd sym = half * half.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolverError("form_laplacian_spectrum: eigensolver failed");
  return solver.eigenvalues();
}

Eigen::VectorXd fiber_inner(const MeasureWeights& m, const OneForm& v, const OneForm& w) {
  require_same_graph(m.graph(), v.graph(), "fiber_inner");
  require_same_graph(v.graph(), w.graph(), "fiber_inner");
  m.require_positive("fiber_inner");
  const auto& graph = *v.graph();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(graph.vertex_count());
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    const double term = graph.conductance()[static_cast<std::size_t>(e)] * v[e] * w[e];
    out[x] += term;
    out[y] += term;
  }
  return out.cwiseQuotient(2.0 * m.values());
}

double FiberView::integrated_square() const { return measure.values().dot(norms.cwiseAbs2()); }

FiberView fiber_view(const MeasureWeights& m, const OneForm& v) {
  const Eigen::VectorXd sq = fiber_inner(m, v, v);
  FiberView view{sq.cwiseMax(0.0).cwiseSqrt(), m, 0.0, true};
  view.sup_norm = view.norms.size() ? view.norms.maxCoeff() : 0.0;
  view.bounded = std::isfinite(view.sup_norm);
  return view;
}

}  // namespace fractalvec
