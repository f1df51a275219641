#include "fractalvec/energy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "fractalvec/operators.hpp"

namespace fractalvec {

namespace {

// Solves L_FF u_F = rhs_F - L_FB u_B for the vertices not in `fixed`.
Eigen::VectorXd solve_with_fixed(const LevelGraph& graph, const SparseMatrix& l, const std::vector<int>& fixed,
                                 const Eigen::VectorXd& fixed_values, const Eigen::VectorXd& rhs) {
  const int n = graph.vertex_count();
  std::vector<int> free_index(static_cast<std::size_t>(n), -1);
  std::vector<bool> is_fixed(static_cast<std::size_t>(n), false);
  for (int v : fixed) is_fixed[static_cast<std::size_t>(v)] = true;
  std::vector<int> free;
  for (int v = 0; v < n; ++v)
    if (!is_fixed[static_cast<std::size_t>(v)]) {
      free_index[static_cast<std::size_t>(v)] = static_cast<int>(free.size());
      free.push_back(v);
    }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < fixed.size(); ++i) u[fixed[i]] = fixed_values[static_cast<Eigen::Index>(i)];
  if (free.empty()) return u;

  const auto nf = static_cast<Eigen::Index>(free.size());
  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd b(nf);
  for (Eigen::Index i = 0; i < nf; ++i) b[i] = rhs[free[static_cast<std::size_t>(i)]];
  for (int k = 0; k < l.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(l, k); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      const int fr = free_index[static_cast<std::size_t>(r)];
      if (fr < 0) continue;
      const int fc = free_index[static_cast<std::size_t>(c)];
      if (fc >= 0)
        t.emplace_back(fr, fc, it.value());
      else
        b[fr] -= it.value() * u[c];
    }
  SparseMatrix lff(nf, nf);
  lff.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(lff);
  if (ldlt.info() != Eigen::Success) throw SolverError("interior system is singular");
  const Eigen::VectorXd x = ldlt.solve(b);
  if (ldlt.info() != Eigen::Success || !x.allFinite()) throw SolverError("interior solve failed");
  for (Eigen::Index i = 0; i < nf; ++i) u[free[static_cast<std::size_t>(i)]] = x[i];
  return u;
}

// Unit-conductance Laplacian assembled from the cells of a graph.
Eigen::MatrixXd raw_cell_laplacian(const LevelGraph& graph) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(graph.vertex_count(), graph.vertex_count());
  for (const auto& cell : graph.cells())
    for (std::size_t p = 0; p < cell.vertices.size(); ++p)
      for (std::size_t q = p + 1; q < cell.vertices.size(); ++q) {
        const int x = cell.vertices[p], y = cell.vertices[q];
        l(x, x) += 1.0;
        l(y, y) += 1.0;
        l(x, y) -= 1.0;
        l(y, x) -= 1.0;
      }
  return l;
}

struct TraceData {
  Eigen::MatrixXd level0;  // K_b, unit conductances
  Eigen::MatrixXd trace;   // level-1 raw energy traced onto the boundary
};

TraceData trace_onto_boundary(const FractalSpec& spec) {
  const GraphRef g1 = build_level(spec, 1);
  const Eigen::MatrixXd l1 = raw_cell_laplacian(*g1);
  const int b = spec.boundary_size;
  const int n = g1->vertex_count();
  std::vector<int> interior;
  for (int v = 0; v < n; ++v)
    if (!g1->is_boundary(v)) interior.push_back(v);
  const auto& bd = g1->boundary();

  auto pick = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = l1(rows[i], cols[j]);
    return out;
  };
  TraceData data;
  data.trace = pick(bd, bd);
  if (!interior.empty()) {
    const Eigen::MatrixXd lii = pick(interior, interior);
    const Eigen::MatrixXd lib = pick(interior, bd);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(lii);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw SolverError("extension_energy_factor: singular interior system");
    data.trace -= lib.transpose() * ldlt.solve(lib);
  }
  data.level0 = Eigen::MatrixXd::Constant(b, b, -1.0);
  data.level0.diagonal().setConstant(b - 1.0);
  return data;
}

}  // namespace

double energy(const ScalarField& g1, const ScalarField& g2) {
  require_same_graph(g1.graph(), g2.graph(), "energy");
  const auto& graph = *g1.graph();
  double sum = 0.0;
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    sum += graph.conductance()[static_cast<std::size_t>(e)] * (g1[x] - g1[y]) * (g2[x] - g2[y]);
  }
  return sum;
}

double energy(const ScalarField& f) { return energy(f, f); }

EnergyReport energy_report(const ScalarField& f) {
  const auto& graph = *f.graph();
  EnergyReport report;
  report.per_edge.resize(graph.edge_count());
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    const double d = f[x] - f[y];
    report.per_edge[e] = graph.conductance()[static_cast<std::size_t>(e)] * d * d;
  }
  report.energy = report.per_edge.sum();
  return report;
}

MeasureWeights energy_measure(const ScalarField& g, const ScalarField& h) {
  require_same_graph(g.graph(), h.graph(), "energy_measure");
  const auto& graph = *g.graph();
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(graph.vertex_count());
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    const double half = 0.5 * graph.conductance()[static_cast<std::size_t>(e)] * (g[x] - g[y]) * (h[x] - h[y]);
    gamma[x] += half;
    gamma[y] += half;
  }
  return MeasureWeights(g.graph(), std::move(gamma), MeasureWeights::Kind::energy);
}

ScalarField generator_apply(const MeasureWeights& m, const ScalarField& f) {
  require_same_graph(m.graph(), f.graph(), "generator_apply");
  m.require_positive("generator_apply");
  const auto& graph = *f.graph();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(graph.vertex_count());
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    const double flow = graph.conductance()[static_cast<std::size_t>(e)] * (f[y] - f[x]);
    out[x] += flow;
    out[y] -= flow;
  }
  return ScalarField(f.graph(), out.cwiseQuotient(m.values()));
}

Eigen::VectorXd generator_spectrum(const MeasureWeights& m) {
  m.require_positive("generator_spectrum");
  return generalized_eigenvalues(Eigen::MatrixXd(laplacian_matrix(*m.graph())), m.values());
}

namespace {

// Smallest nonzero eigenvalue of L x = lambda M x by Lanczos on the shift-invert
// operator (L + sigma M)^{-1} M in the M-inner product, with constants deflated.
double lanczos_gap(const MeasureWeights& m, const SpectralOptions& options) {
  const auto& graph = *m.graph();
  const SparseMatrix l = laplacian_matrix(graph);
  const Eigen::VectorXd& w = m.values();
  const Eigen::Index n = w.size();

  double scale = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) scale = std::min(scale, l.coeff(i, i) / w[i]);
  const double sigma = 1e-3 * scale;

  SparseMatrix shifted = l;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += sigma * w[i];
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw SolverError("spectral_gap: shifted factorization failed");

  const double mass = w.sum();
  auto deflate = [&](Eigen::VectorXd& x) { x.array() -= w.dot(x) / mass; };
  auto m_dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(w.cwiseProduct(b)); };

  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> normal;
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = normal(rng);
  deflate(q);
  q /= std::sqrt(m_dot(q, q));

  const int max_steps = static_cast<int>(std::min<Eigen::Index>(options.max_lanczos_steps, n - 1));
  Eigen::MatrixXd basis(n, max_steps + 1);
  std::vector<double> alpha, beta;
  basis.col(0) = q;
  double best_theta = 0.0;
  Eigen::VectorXd best_vector;
  double last_residual = std::numeric_limits<double>::infinity();

  for (int k = 0; k < max_steps; ++k) {
    Eigen::VectorXd z = ldlt.solve(w.cwiseProduct(basis.col(k)));
    deflate(z);
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j <= k; ++j) {
        const double coef = m_dot(basis.col(j), z);
        if (pass == 0 && j == k) alpha.push_back(coef);
        z -= coef * basis.col(j);
      }
    const double b = std::sqrt(std::max(m_dot(z, z), 0.0));

    const int dim = k + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < dim; ++i) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(t);
    const double theta = tri.eigenvalues()[dim - 1];
    const Eigen::VectorXd s = tri.eigenvectors().col(dim - 1);
    best_theta = theta;
    best_vector = basis.leftCols(dim) * s;

    const double lambda = 1.0 / theta - sigma;
    const Eigen::VectorXd lx = l * best_vector;
    const Eigen::VectorXd mx = w.cwiseProduct(best_vector);
    last_residual = (lx - lambda * mx).norm() / (lx.norm() + std::abs(lambda) * mx.norm());
    if (last_residual <= options.tolerance || b <= 1e-14 * theta) return lambda;

    beta.push_back(b);
    basis.col(k + 1) = z / b;
  }
  const double lambda = 1.0 / best_theta - sigma;
  const Eigen::VectorXd lx = l * best_vector;
  const Eigen::VectorXd mx = w.cwiseProduct(best_vector);
  last_residual = (lx - lambda * mx).norm() / (lx.norm() + std::abs(lambda) * mx.norm());
  if (last_residual <= options.tolerance) return lambda;
  throw SolverError("spectral_gap: Lanczos did not converge, relative residual " + std::to_string(last_residual));
}

}  // namespace

double spectral_gap(const MeasureWeights& m, const SpectralOptions& options) {
  m.require_positive("spectral_gap");
  const auto& graph = *m.graph();
  if (!graph.is_connected()) throw PreconditionError("spectral_gap: graph is disconnected");
  if (graph.vertex_count() < 2) throw PreconditionError("spectral_gap: graph has a single vertex");
  if (graph.vertex_count() > options.dense_limit) return lanczos_gap(m, options);
  return generator_spectrum(m)[1];
}

double poincare_constant(const MeasureWeights& m, const SpectralOptions& options) {
  return 1.0 / spectral_gap(m, options);
}

double extension_energy_factor(const FractalSpec& spec) {
  const TraceData data = trace_onto_boundary(spec);
  const double rho = data.trace.trace() / data.level0.trace();
  const double defect = (data.trace - rho * data.level0).norm();
  if (defect > 1e-10 * data.trace.norm())
    throw ConstructionError("fractal spec '" + spec.name +
                            "': level-1 trace is not a multiple of the level-0 energy (defect " +
                            std::to_string(defect) + ")");
  return rho;
}

double extension_energy_ratio(const FractalSpec& spec, const std::vector<double>& boundary_values) {
  if (static_cast<int>(boundary_values.size()) != spec.boundary_size)
    throw PreconditionError("extension_energy_ratio: one value per boundary vertex required");
  const TraceData data = trace_onto_boundary(spec);
  const Eigen::Map<const Eigen::VectorXd> f(boundary_values.data(), spec.boundary_size);
  const double e0 = f.dot(data.level0 * f);
  const double scale = f.squaredNorm() * static_cast<double>(spec.boundary_size);
  if (e0 <= 1e-14 * std::max(scale, 1e-300)) return extension_energy_factor(spec);
  // Minimal level-1 energy of an extension equals the traced form.
  return f.dot(data.trace * f) / e0;
}

ScalarField harmonic_extension(const GraphRef& graph, const std::vector<double>& boundary_values) {
  if (boundary_values.size() != graph->boundary().size())
    throw PreconditionError("harmonic_extension: one value per boundary vertex required");
  const Eigen::Map<const Eigen::VectorXd> values(boundary_values.data(), static_cast<Eigen::Index>(boundary_values.size()));
  const Eigen::VectorXd u = solve_with_fixed(*graph, laplacian_matrix(*graph), graph->boundary(), values,
                                             Eigen::VectorXd::Zero(graph->vertex_count()));
  return ScalarField(graph, u);
}

MeasureWeights kusuoka_measure(const GraphRef& graph) {
  std::vector<int> order(graph->boundary().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  return kusuoka_measure(graph, order);
}

MeasureWeights kusuoka_measure(const GraphRef& graph, const std::vector<int>& boundary_order) {
  const std::size_t b = graph->boundary().size();
  if (b < 2) throw PreconditionError("kusuoka_measure: needs at least two boundary vertices");
  if (boundary_order.size() != b) throw PreconditionError("kusuoka_measure: order must list every boundary index");

  std::vector<ScalarField> basis;
  for (int k : boundary_order) {
    if (k < 0 || static_cast<std::size_t>(k) >= b) throw PreconditionError("kusuoka_measure: bad boundary index");
    std::vector<double> data(b, 0.0);
    data[static_cast<std::size_t>(k)] = 1.0;
    ScalarField h = harmonic_extension(graph, data);
    const double initial = energy(h);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) h -= energy(h, q) * q;
    const double e = energy(h);
    if (e <= 1e-10 * initial) continue;  // dependent modulo constants
    h *= 1.0 / std::sqrt(e);
    basis.push_back(std::move(h));
  }

  Eigen::VectorXd nu = Eigen::VectorXd::Zero(graph->vertex_count());
  for (const auto& h : basis) nu += energy_measure(h, h).values();
  const auto kind = nu.minCoeff() > 0.0 ? MeasureWeights::Kind::reference : MeasureWeights::Kind::energy;
  return MeasureWeights(graph, std::move(nu), kind);
}

ScalarField dirichlet_solve(const MeasureWeights& m, const std::vector<int>& dirichlet, const ScalarField& f) {
  require_same_graph(m.graph(), f.graph(), "dirichlet_solve");
  m.require_positive("dirichlet_solve");
  if (dirichlet.empty()) throw PreconditionError("dirichlet_solve: boundary set must be nonempty");
  const auto& graph = *m.graph();
  std::vector<int> fixed = dirichlet;
  std::sort(fixed.begin(), fixed.end());
  fixed.erase(std::unique(fixed.begin(), fixed.end()), fixed.end());
  for (int v : fixed)
    if (v < 0 || v >= graph.vertex_count()) throw PreconditionError("dirichlet_solve: vertex out of range");
  // (Au)(x) = f(x) off B  <=>  (L u)(x) = -m(x) f(x).
  const Eigen::VectorXd rhs = -m.values().cwiseProduct(f.values());
  return ScalarField(m.graph(), solve_with_fixed(graph, laplacian_matrix(graph), fixed,
                                                 Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fixed.size())), rhs));
}

}  // namespace fractalvec
