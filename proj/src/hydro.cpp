#include "fractalvec/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fractalvec/energy.hpp"
#include "fractalvec/forms.hpp"
#include "fractalvec/operators.hpp"

namespace fractalvec {

double convection(const MeasureWeights& m, const OneForm& u, const OneForm& v) {
  require_same_graph(m.graph(), u.graph(), "convection");
  require_same_graph(u.graph(), v.graph(), "convection");
  return -inner(action_scalar(divergence(m, v), u), u);
}

NSReport verify_weak_ns(const MeasureWeights& m, const OneForm& u0, double tol) {
  require_same_graph(m.graph(), u0.graph(), "verify_weak_ns");
  NSReport report;
  const ScalarField div_u = divergence(m, u0);
  report.harmonic_residual = l2_norm(m, div_u);
  bool ok = report.harmonic_residual <= tol;
  // u(t) = u0 for all t: the time derivative drops out, leaving
  // <d* u0, d* w> + convection(u0)(w) = 0 for every harmonic w.
  for (const auto& w : harmonic_basis(m)) {
    const double c = convection(m, u0, w);
    const double d = l2_inner(m, div_u, divergence(m, w));
    report.convection_values.push_back(c);
    report.dissipation_values.push_back(d);
    ok = ok && std::abs(c) <= tol && std::abs(d) <= tol;
  }
  report.is_weak_solution = ok;
  std::ostringstream os;
  os << "stationary trajectory u(t) = u0; ||d* u0|| = " << report.harmonic_residual << "; tested against "
     << report.convection_values.size() << " harmonic forms";
  if (report.convection_values.empty()) os << " (cycle rank 0: only u0 = 0 can pass)";
  report.note = os.str();
  return report;
}

double neumann_derivative(const ScalarField& h, int p) {
  const auto& graph = *h.graph();
  if (p < 0 || p >= graph.vertex_count()) throw PreconditionError("neumann_derivative: vertex out of range");
  double sum = 0.0;
  for (const auto& inc : graph.neighbors(p))
    sum += graph.conductance()[static_cast<std::size_t>(inc.edge)] * (h[p] - h[inc.neighbor]);
  return sum;
}

namespace {

void check_neumann(const NeumannData& data) {
  if (!data.graph) throw PreconditionError("solve_neumann: no graph");
  if (data.boundary.empty()) throw PreconditionError("solve_neumann: boundary set is empty");
  if (data.boundary.size() != data.flux.size())
    throw PreconditionError("solve_neumann: " + std::to_string(data.flux.size()) + " fluxes for " +
                            std::to_string(data.boundary.size()) + " boundary vertices");
  std::set<int> seen;
  double sum = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < data.boundary.size(); ++i) {
    const int p = data.boundary[i];
    if (p < 0 || p >= data.graph->vertex_count())
      throw PreconditionError("solve_neumann: boundary vertex " + std::to_string(p) + " out of range");
    if (!seen.insert(p).second) throw PreconditionError("solve_neumann: repeated boundary vertex");
    if (!std::isfinite(data.flux[i])) throw PreconditionError("solve_neumann: non-finite flux");
    sum += data.flux[i];
    scale += std::abs(data.flux[i]);
  }
  if (std::abs(sum) > 1e-12 * scale + 1e-300)
    throw PreconditionError("solve_neumann: fluxes must sum to zero (got " + std::to_string(sum) + ")");
  if (!data.graph->is_connected()) throw PreconditionError("solve_neumann: graph is disconnected");
}

}  // namespace

ScalarField solve_neumann(const NeumannData& data, const MeasureWeights& m) {
  check_neumann(data);
  require_same_graph(data.graph, m.graph(), "solve_neumann");
  m.require_positive("solve_neumann");
  // (L h)(x) = sum_y c (h(x) - h(y)) is (dh)_x on B and -m(x)(Ah)(x) off B.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(data.graph->vertex_count());
  for (std::size_t i = 0; i < data.boundary.size(); ++i) rhs[data.boundary[i]] = data.flux[i];
  rhs.array() -= rhs.mean();  // removes the rounding left in sum(flux)
  const LaplacianSolver solver(*data.graph);
  return ScalarField(data.graph, solver.solve(rhs, m.values()));
}

ScalarField solve_neumann(const NeumannData& data) {
  check_neumann(data);
  const auto m = data.graph->cells().empty() ? MeasureWeights::counting(data.graph) : self_similar_measure(data.graph);
  return solve_neumann(data, m);
}

NSBoundarySolution ns_boundary_solution(const MeasureWeights& m, const NeumannData& data) {
  ScalarField h = solve_neumann(data, m);
  OneForm u = derivation(h);
  MeasureWeights pressure = energy_measure(h, h).scaled(-0.5);
  const auto& graph = *data.graph;
  const Eigen::VectorXd lh = laplacian_matrix(graph) * h.values();
  std::vector<bool> on_b(static_cast<std::size_t>(graph.vertex_count()), false);
  double flux_residual = 0.0;
  for (std::size_t i = 0; i < data.boundary.size(); ++i) {
    on_b[static_cast<std::size_t>(data.boundary[i])] = true;
    flux_residual = std::max(flux_residual, std::abs(neumann_derivative(h, data.boundary[i]) - data.flux[i]));
  }
  // <u, d 1_x>_H = (L h)(x) for the indicator of x.
  double boundary_residual = 0.0;
  for (int x = 0; x < graph.vertex_count(); ++x)
    if (!on_b[static_cast<std::size_t>(x)]) boundary_residual = std::max(boundary_residual, std::abs(lh[x]));
  return NSBoundarySolution{std::move(h), std::move(u), std::move(pressure), boundary_residual, flux_residual};
}

}  // namespace fractalvec
