#include "fractalvec/pde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/MatrixFunctions>

#include "fractalvec/energy.hpp"
#include "fractalvec/forms.hpp"
#include "fractalvec/operators.hpp"

namespace fractalvec {

namespace {

std::vector<double> sample_grid() {
  std::vector<double> grid{0.0};
  constexpr int points = 400;
  for (int i = 0; i <= points; ++i) grid.push_back(std::pow(10.0, -6.0 + 10.0 * i / points));
  return grid;
}

}  // namespace

EdgeNonlinearity::EdgeNonlinearity(Kind kind, std::function<double(double)> phi, std::string description)
    : kind_(kind), phi_(std::move(phi)), description_(std::move(description)) {
  const auto grid = sample_grid();
  std::vector<double> psi;
  for (double t : grid) {
    const double p = phi_(t);
    if (!std::isfinite(p)) throw PreconditionError("nonlinearity '" + description_ + "' is not finite on [0, inf)");
    psi.push_back(p * t);
  }
  monotone_ = std::numeric_limits<double>::infinity();
  lipschitz_ = 0.0;
  coercive_ = std::numeric_limits<double>::infinity();
  growth_ = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i + 1 < grid.size()) {
      const double slope = (psi[i + 1] - psi[i]) / (grid[i + 1] - grid[i]);
      monotone_ = std::min(monotone_, slope);
      lipschitz_ = std::max(lipschitz_, slope);
    }
    if (grid[i] > 0.0) coercive_ = std::min(coercive_, psi[i] / grid[i]);
    growth_ = std::max(growth_, std::abs(psi[i]) / (1.0 + grid[i]));
  }
  // psi is odd, so the chord through 0 has slope phi(t); it is covered by the
  // first grid interval together with the coercive bound.
  monotone_ = std::min(monotone_, coercive_);

  if (monotone_ < -1e-12)
    throw PreconditionError("nonlinearity '" + description_ + "' is not monotone (sampled slope " +
                            std::to_string(monotone_) + ")");
  if (!(coercive_ > 0.0))
    throw PreconditionError("nonlinearity '" + description_ + "' is not coercive (min phi " +
                            std::to_string(coercive_) + ")");
  const auto n = grid.size();
  const double far = std::abs(psi[n - 1]) / (1.0 + grid[n - 1]);
  const double near = std::abs(psi[n - 41]) / (1.0 + grid[n - 41]);
  if (far > 1.5 * near + 1e-12)
    throw PreconditionError("nonlinearity '" + description_ + "' grows superlinearly");
}

EdgeNonlinearity EdgeNonlinearity::identity() {
  EdgeNonlinearity a(Kind::identity, [](double) { return 1.0; }, "identity");
  a.growth_ = a.coercive_ = a.monotone_ = a.lipschitz_ = 1.0;
  return a;
}

EdgeNonlinearity EdgeNonlinearity::scaled_monotone(double alpha, double beta) {
  std::ostringstream d;
  d << "phi(s) = " << alpha << " + " << beta << "/(1+s)";
  EdgeNonlinearity a(Kind::scaled_monotone, [alpha, beta](double s) { return alpha + beta / (1.0 + s); }, d.str());
  // psi'(t) = alpha + beta / (1+t)^2 ranges between alpha and alpha + beta.
  a.monotone_ = std::min(alpha, alpha + beta);
  a.lipschitz_ = std::max(alpha, alpha + beta);
  if (!(a.monotone_ >= 0.0)) throw PreconditionError("nonlinearity '" + d.str() + "' is not monotone");
  return a;
}

EdgeNonlinearity EdgeNonlinearity::scaled_monotone(std::function<double(double)> phi, std::string description) {
  return EdgeNonlinearity(Kind::scaled_monotone, std::move(phi), std::move(description));
}

EdgeNonlinearity EdgeNonlinearity::user_table(std::vector<double> s, std::vector<double> phi) {
  if (s.size() != phi.size() || s.empty()) throw PreconditionError("user_table: need matching nonempty s and phi");
  if (s.front() != 0.0) throw PreconditionError("user_table: first node must be s = 0");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1])) throw PreconditionError("user_table: nodes must increase strictly");
  auto table = [s = std::move(s), phi = std::move(phi)](double x) {
    if (x >= s.back()) return phi.back();
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    const auto i = static_cast<std::size_t>(it - s.begin()) - 1;
    const double w = (x - s[i]) / (s[i + 1] - s[i]);
    return (1.0 - w) * phi[i] + w * phi[i + 1];
  };
  return EdgeNonlinearity(Kind::user_table, std::move(table), "user table");
}

double EdgeNonlinearity::edge_value(double t) const { return phi_(std::abs(t)) * t; }

OneForm EdgeNonlinearity::apply(const OneForm& v) const {
  OneForm out = v;
  if (kind_ == Kind::identity) return out;
  for (Eigen::Index e = 0; e < out.size(); ++e) out[e] = edge_value(v[e]);
  return out;
}

EdgeNonlinearity::FormConstants EdgeNonlinearity::form_constants(const LevelGraph& graph) const {
  const double unit = std::sqrt(conductance_vector(graph).sum());
  return FormConstants{growth_ * std::max(1.0, unit), coercive_, 0.0, monotone_};
}

std::string EdgeNonlinearity::condition_report() const {
  std::ostringstream os;
  os << "nonlinearity: " << description_ << "\n"
     << "  monotone slope (c3, edgewise): " << monotone_ << "\n"
     << "  lipschitz (edgewise): " << lipschitz_ << "\n"
     << "  growth (c0, edgewise): " << growth_ << "\n"
     << "  coercive (c1, edgewise, c2 = 0): " << coercive_ << "\n";
  return os.str();
}

QuasilinearResult solve_quasilinear(const MeasureWeights& m, const EdgeNonlinearity& a, const ScalarField& f,
                                    const QuasilinearOptions& options) {
  require_same_graph(m.graph(), f.graph(), "solve_quasilinear");
  m.require_positive("solve_quasilinear");
  const auto& graph = *m.graph();
  const double balance = m.values().dot(f.values());
  const double scale = m.values().dot(f.values().cwiseAbs());
  if (std::abs(balance) > 1e-11 * scale + 1e-300)
    throw PreconditionError("solve_quasilinear: right-hand side must satisfy sum f m = 0 (got " +
                            std::to_string(balance) + ")");
  if (!(a.monotone_constant() > 0.0))
    throw PreconditionError("solve_quasilinear: nonlinearity must be strictly monotone");
  if (!(options.tol > 0.0)) throw PreconditionError("solve_quasilinear: tolerance must be positive");

  const LaplacianSolver solver(graph);
  const SparseMatrix l = laplacian_matrix(graph);
  double tau = options.step.value_or(a.monotone_constant() / (a.lipschitz_constant() * a.lipschitz_constant()));

  ScalarField u = options.initial ? mean_zero(m, *options.initial) : ScalarField::zero(m.graph());
  require_same_graph(u.graph(), m.graph(), "solve_quasilinear initial guess");

  // r = d* a(du) - f; correction z solves A z = r, i.e. L z = -M r.
  auto strong_residual = [&](const ScalarField& w) { return divergence(m, a.apply(derivation(w))) - f; };
  auto weak = [&](const ScalarField& r) { return m.values().cwiseProduct(r.values()).cwiseAbs().maxCoeff(); };

  SolveDiagnostics diag;
  ScalarField r = strong_residual(u);
  diag.residual = weak(r);
  diag.residual_history.push_back(diag.residual);
  double previous_step = std::numeric_limits<double>::infinity();
  while (diag.residual > options.tol && diag.iterations < options.max_iterations) {
    const Eigen::VectorXd z = solver.solve(-m.values().cwiseProduct(r.values()), m.values());
    const double step_energy = std::sqrt(std::max(z.dot(l * z), 0.0));
    if (step_energy > previous_step * (1.0 + 1e-9) && tau > 1e-12) {
      tau *= 0.5;  // lost contraction: damp harder
    }
    if (std::isfinite(previous_step) && previous_step > 0.0) diag.contraction = step_energy / previous_step;
    previous_step = step_energy;
    u.values() -= tau * z;
    r = strong_residual(u);
    diag.residual = weak(r);
    diag.residual_history.push_back(diag.residual);
    ++diag.iterations;
    if (!std::isfinite(diag.residual)) break;
  }
  diag.converged = diag.residual <= options.tol;
  diag.step = tau;
  const auto k = a.form_constants(graph);
  std::ostringstream os;
  os << a.condition_report() << "  form constants: c0=" << k.c0 << " c1=" << k.c1 << " c2=" << k.c2
     << " c3=" << k.c3 << "\n"
     << "  damping tau: " << tau << "\n";
  diag.report = os.str();
  return QuasilinearResult{mean_zero(m, u), std::move(diag)};
}

DriftCoefficient DriftCoefficient::zero(const GraphRef& graph) {
  return DriftCoefficient{ScalarField::zero(graph), OneForm::zero(graph), {}, 1.0, 0.0};
}

DriftCoefficient DriftCoefficient::affine(ScalarField offset, OneForm direction) {
  require_same_graph(offset.graph(), direction.graph(), "DriftCoefficient::affine");
  return DriftCoefficient{std::move(offset), std::move(direction), {}, 1.0, 0.0};
}

ScalarField DriftCoefficient::apply(const MeasureWeights& m, const OneForm& v) const {
  require_same_graph(m.graph(), v.graph(), "DriftCoefficient::apply");
  OneForm mapped = v;
  if (edge_map)
    for (Eigen::Index e = 0; e < mapped.size(); ++e) mapped[e] = edge_map(v[e]);
  return ScalarField(m.graph(), offset.values() + fiber_inner(m, direction, mapped));
}

double DriftCoefficient::growth_constant(const MeasureWeights& m) const {
  const double sup = fiber_view(m, direction).sup_norm;
  const double unit = std::sqrt(conductance_vector(*m.graph()).sum());
  return std::max({l2_norm(m, offset) + sup * edge_bound * unit, sup * edge_lipschitz, 1e-300});
}

double DriftCoefficient::sampled_growth_ratio(const MeasureWeights& m, int samples, unsigned seed) const {
  const double c5 = growth_constant(m);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  const auto edges = m.graph()->edge_count();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd values(edges);
    for (auto& x : values) x = normal(rng);
    values *= std::pow(10.0, -3.0 + 6.0 * s / std::max(samples - 1, 1));
    const OneForm v(m.graph(), values);
    worst = std::max(worst, l2_norm(m, apply(m, v)) / (c5 * (1.0 + norm(v))));
  }
  return worst;
}

DriftResult solve_drift(const MeasureWeights& m, const DriftCoefficient& b, double rho, const DriftOptions& options) {
  require_same_graph(m.graph(), b.offset.graph(), "solve_drift");
  require_same_graph(m.graph(), b.direction.graph(), "solve_drift");
  m.require_positive("solve_drift");
  if (!(rho > 0.0)) throw PreconditionError("solve_drift: rho must be positive");
  if (b.sampled_growth_ratio(m, 16, 7) > 1.0 + 1e-9)
    throw PreconditionError("solve_drift: drift violates its growth bound");

  const auto& graph = *m.graph();
  const SparseMatrix l = laplacian_matrix(graph);
  SparseMatrix k = l;
  for (Eigen::Index i = 0; i < k.rows(); ++i) k.coeffRef(i, i) += rho * m[i];
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(k);
  if (ldlt.info() != Eigen::Success) throw SolverError("solve_drift: (L + rho M) factorization failed");

  // Weak residual against vertex indicators: L u + M b(du) + rho M u.
  auto residual = [&](const ScalarField& u, const Eigen::VectorXd& mb) {
    return (l * u.values() + mb + rho * m.values().cwiseProduct(u.values())).cwiseAbs().maxCoeff();
  };

  ScalarField u = ScalarField::zero(m.graph());
  Eigen::VectorXd mb = m.values().cwiseProduct(b.apply(m, derivation(u)).values());
  SolveDiagnostics diag;
  diag.residual = residual(u, mb);
  diag.residual_history.push_back(diag.residual);
  const double initial = diag.residual;
  double previous_update = 0.0;
  bool diverged = false;
  while (diag.residual > options.tol && diag.iterations < options.max_iterations) {
    const Eigen::VectorXd next = ldlt.solve(-mb);
    const double update = (next - u.values()).cwiseAbs().maxCoeff();
    if (previous_update > 0.0) diag.contraction = update / previous_update;
    previous_update = update;
    u.values() = next;
    mb = m.values().cwiseProduct(b.apply(m, derivation(u)).values());
    diag.residual = residual(u, mb);
    diag.residual_history.push_back(diag.residual);
    ++diag.iterations;
    if (!std::isfinite(diag.residual) || diag.residual > 1e12 * (initial + 1.0)) {
      diverged = true;
      break;
    }
  }
  diag.converged = !diverged && diag.residual <= options.tol;
  std::ostringstream os;
  os << "drift: rho=" << rho << " c5=" << b.growth_constant(m) << " contraction estimate=" << diag.contraction << "\n";
  if (!diag.converged) os << "  not converged; increase rho (Picard needs contraction)\n";
  diag.report = os.str();
  if (!u.values().allFinite()) u = ScalarField::zero(m.graph());
  return DriftResult{std::move(u), std::move(diag)};
}

Eigen::MatrixXd perturbed_generator(const MeasureWeights& m, const OneForm& b) {
  require_same_graph(m.graph(), b.graph(), "perturbed_generator");
  m.require_positive("perturbed_generator");
  const auto& graph = *m.graph();
  const int n = graph.vertex_count();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [x, y] = graph.edges()[static_cast<std::size_t>(e)];
    const double c = graph.conductance()[static_cast<std::size_t>(e)];
    const double from_x = c / m[x] * (1.0 + 0.5 * b[e]);  // b(x,y) = b[e]
    const double from_y = c / m[y] * (1.0 - 0.5 * b[e]);  // b(y,x) = -b[e]
    out(x, y) += from_x;
    out(x, x) -= from_x;
    out(y, x) += from_y;
    out(y, y) -= from_y;
  }
  return out;
}

double q_form(const MeasureWeights& m, const OneForm& b, const ScalarField& f, const ScalarField& g) {
  require_same_graph(m.graph(), f.graph(), "q_form");
  require_same_graph(f.graph(), g.graph(), "q_form");
  const Eigen::VectorXd drift = fiber_inner(m, b, derivation(f));
  return energy(f, g) - (m.values().array() * g.values().array() * drift.array()).sum();
}

PositivityReport semigroup_positivity(const Eigen::MatrixXd& generator, double t) {
  if (!(t > 0.0)) throw PreconditionError("semigroup_positivity: t must be positive");
  if (generator.rows() != generator.cols()) throw PreconditionError("semigroup_positivity: matrix must be square");
  PositivityReport report;
  const Eigen::MatrixXd semigroup = (t * generator).exp();
  Eigen::Index r = 0, c = 0;
  report.min_entry = semigroup.minCoeff(&r, &c);
  report.min_row = static_cast<int>(r);
  report.min_col = static_cast<int>(c);
  report.positive = report.min_entry >= -1e-12;
  for (Eigen::Index i = 0; i < generator.rows(); ++i)
    for (Eigen::Index j = 0; j < generator.cols(); ++j)
      if (i != j && generator(i, j) < report.offdiag_value) {
        report.offdiag_value = generator(i, j);
        report.offdiag_row = static_cast<int>(i);
        report.offdiag_col = static_cast<int>(j);
      }
  report.offdiagonal_nonnegative = report.offdiag_row < 0;
  return report;
}

}  // namespace fractalvec
