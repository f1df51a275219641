#include "fractalvec/quantum.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "fractalvec/forms.hpp"
#include "fractalvec/operators.hpp"

namespace fractalvec {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

void check_config(const MagneticConfig& cfg, const GraphRef& graph, const char* op) {
  require_same_graph(cfg.a.graph(), graph, op);
  require_same_graph(cfg.V.graph(), graph, op);
}

// Coefficients of (-i d - a) on edge (x, y): value = kx f(x) + ky f(y).
std::pair<cd, cd> edge_coefficients(MagneticConvention convention, double a) {
  if (convention == MagneticConvention::linear) return {I - 0.5 * a, -I - 0.5 * a};
  return {I * std::exp(0.5 * I * a), -I * std::exp(-0.5 * I * a)};
}

}  // namespace

ComplexScalarField complexify(const ScalarField& f) { return ComplexScalarField(f.graph(), f.values().cast<cd>()); }

ComplexOneForm magnetic_derivative(const MagneticConfig& cfg, const ComplexScalarField& f) {
  check_config(cfg, f.graph(), "magnetic_derivative");
  const auto& graph = *f.graph();
  Eigen::VectorXcd out(graph.edge_count());
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    const auto [kx, ky] = edge_coefficients(cfg.convention, cfg.a[e]);
    out[e] = kx * f[x] + ky * f[y];
  }
  return ComplexOneForm(f.graph(), std::move(out));
}

std::complex<double> magnetic_form(const MagneticConfig& cfg, const MeasureWeights& m, const ComplexScalarField& f,
                                   const ComplexScalarField& g) {
  check_config(cfg, m.graph(), "magnetic_form");
  require_same_graph(f.graph(), m.graph(), "magnetic_form");
  require_same_graph(g.graph(), m.graph(), "magnetic_form");
  const ComplexScalarField vf(f.graph(), cfg.V.values().cast<cd>().cwiseProduct(f.values()));
  return inner(magnetic_derivative(cfg, f), magnetic_derivative(cfg, g)) + l2_inner(m, vf, g);
}

ComplexMatrix assemble_magnetic_hamiltonian(const MagneticConfig& cfg, const MeasureWeights& m) {
  check_config(cfg, m.graph(), "assemble_magnetic_hamiltonian");
  m.require_positive("assemble_magnetic_hamiltonian");
  const auto& graph = *m.graph();
  const int n = graph.vertex_count();
  // M H = K^* C K + M V, accumulated edge by edge.
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    const double c = graph.conductance()[static_cast<std::size_t>(e)];
    const auto [kx, ky] = edge_coefficients(cfg.convention, cfg.a[e]);
    h(x, x) += c * std::norm(kx);
    h(y, y) += c * std::norm(ky);
    h(x, y) += c * std::conj(kx) * ky;
    h(y, x) += c * std::conj(ky) * kx;
  }
  for (int x = 0; x < n; ++x) {
    h.row(x) /= m[x];
    h(x, x) += cfg.V[x];
  }
  return h;
}

Eigen::VectorXd magnetic_spectrum(const MagneticConfig& cfg, const MeasureWeights& m) {
  const ComplexMatrix h = assemble_magnetic_hamiltonian(cfg, m);
  // M^{1/2} H M^{-1/2} is Hermitian with the same eigenvalues.
  const Eigen::VectorXd s = m.values().cwiseSqrt();
  ComplexMatrix sym = s.cast<cd>().asDiagonal() * h * s.cwiseInverse().cast<cd>().asDiagonal();
  sym = 0.5 * (sym + sym.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolverError("magnetic_spectrum: eigensolver failed");
  return solver.eigenvalues();
}

MagneticConfig gauge_transform(const MagneticConfig& cfg, const ScalarField& lambda) {
  require_same_graph(cfg.a.graph(), lambda.graph(), "gauge_transform");
  return MagneticConfig{cfg.a + derivation(lambda), cfg.V, cfg.convention};
}

double potential_sup_norm(const MagneticConfig& cfg, const MeasureWeights& m) {
  return fiber_view(m, cfg.a).sup_norm;
}

DiracOperator::DiracOperator(const MeasureWeights& m)
    : m_(m), vertex_count_(m.graph()->vertex_count()), edge_count_(m.graph()->edge_count()) {
  m_.require_positive("DiracOperator");
  const auto& graph = *m_.graph();
  matrix_ = Eigen::MatrixXd::Zero(dimension(), dimension());
  for (int e = 0; e < edge_count_; ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    const double c = graph.conductance()[static_cast<std::size_t>(e)];
    const int row = vertex_count_ + e;
    matrix_(row, y) = 1.0;  // d
    matrix_(row, x) = -1.0;
    matrix_(y, row) = c / m_[y];  // d^dagger = M^{-1} G^T C
    matrix_(x, row) = -c / m_[x];
  }
}

Eigen::VectorXd DiracOperator::weights() const {
  Eigen::VectorXd w(dimension());
  w << m_.values(), conductance_vector(*m_.graph());
  return w;
}

std::pair<ScalarField, OneForm> DiracOperator::apply(const ScalarField& f, const OneForm& v) const {
  require_same_graph(m_.graph(), f.graph(), "DiracOperator::apply");
  require_same_graph(m_.graph(), v.graph(), "DiracOperator::apply");
  Eigen::VectorXd x(dimension());
  x << f.values(), v.values();
  const Eigen::VectorXd y = matrix_ * x;
  return {ScalarField(m_.graph(), y.head(vertex_count_)), OneForm(m_.graph(), y.tail(edge_count_))};
}

double DiracOperator::inner(const ScalarField& f, const OneForm& v, const ScalarField& g, const OneForm& w) const {
  return l2_inner(m_, f, g) + fractalvec::inner(v, w);
}

DiracOperator dirac_assemble(const MeasureWeights& m) { return DiracOperator(m); }

Eigen::VectorXd dirac_spectrum(const DiracOperator& d) {
  const Eigen::VectorXd s = d.weights().cwiseSqrt();
  Eigen::MatrixXd sym = s.asDiagonal() * d.matrix() * s.cwiseInverse().asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolverError("dirac_spectrum: eigensolver failed");
  return solver.eigenvalues();
}

int zero_multiplicity(const Eigen::VectorXd& spectrum, double tol) {
  return static_cast<int>((spectrum.array().abs() <= tol).count());
}

}  // namespace fractalvec
