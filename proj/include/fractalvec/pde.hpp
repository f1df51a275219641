#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fractalvec/fields.hpp"

namespace fractalvec {

/// Edgewise nonlinearity a(v)(x,y) = phi(|v(x,y)|) v(x,y).
///
/// Construction samples psi(t) = phi(|t|) t on a logarithmic grid and derives
/// the discrete constants of the monotone / growth / coercive conditions.
/// Non-monotone, non-coercive or superlinear maps are rejected.
class EdgeNonlinearity {
 public:
  enum class Kind { identity, scaled_monotone, user_table };

  static EdgeNonlinearity identity();
  /// phi(s) = alpha + beta / (1 + s).
  static EdgeNonlinearity scaled_monotone(double alpha, double beta);
  /// Arbitrary phi on [0, inf).
  static EdgeNonlinearity scaled_monotone(std::function<double(double)> phi, std::string description = "custom");
  /// Piecewise linear phi through (s_i, phi_i), s_0 = 0, constant beyond the last node.
  static EdgeNonlinearity user_table(std::vector<double> s, std::vector<double> phi);

  Kind kind() const { return kind_; }
  const std::string& description() const { return description_; }
  double phi(double s) const { return phi_(s); }
  double edge_value(double t) const;
  OneForm apply(const OneForm& v) const;

  /// Edgewise constants: |psi(t)| <= growth (1 + |t|), psi(t) t >= coercive t^2,
  /// (psi(t) - psi(s)) / (t - s) in [monotone, lipschitz].
  double growth_constant() const { return growth_; }
  double coercive_constant() const { return coercive_; }
  double monotone_constant() const { return monotone_; }
  double lipschitz_constant() const { return lipschitz_; }

  /// Same constants lifted to H for a given graph: c0, c1, c2, c3.
  struct FormConstants {
    double c0, c1, c2, c3;
  };
  FormConstants form_constants(const LevelGraph& graph) const;

  /// Human-readable report on the sampled conditions.
  std::string condition_report() const;

 private:
  EdgeNonlinearity(Kind kind, std::function<double(double)> phi, std::string description);

  Kind kind_;
  std::function<double(double)> phi_;
  std::string description_;
  double growth_ = 0, coercive_ = 0, monotone_ = 0, lipschitz_ = 0;
};

struct SolveDiagnostics {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double step = 0.0;
  double contraction = 0.0;
  std::vector<double> residual_history;
  std::string report;
};

struct QuasilinearOptions {
  double tol = 1e-10;
  int max_iterations = 20000;
  std::optional<ScalarField> initial;
  /// Damping; defaults to c3 / Lip^2.
  std::optional<double> step;
};

struct QuasilinearResult {
  ScalarField u;
  SolveDiagnostics diagnostics;
};

/// Weak solution of d* a(du) = f: <a(du), dv>_H = -<f, v>_{L2(m)} for all v.
/// Requires sum_x f(x) m(x) = 0 and a strictly monotone a. Returns the zero-mean
/// solution; the weak residual is max_x |m(x) (d* a(du) - f)(x)|.
QuasilinearResult solve_quasilinear(const MeasureWeights& m, const EdgeNonlinearity& a, const ScalarField& f,
                                    const QuasilinearOptions& options = {});

/// b(v)(x) = offset(x) + <direction_x, chi(v)_x>_{H_x} with chi applied edgewise.
struct DriftCoefficient {
  ScalarField offset;
  OneForm direction;
  /// Edgewise map chi; identity when empty (affine drift).
  std::function<double(double)> edge_map;
  /// |chi(t)| <= edge_lipschitz |t| + edge_bound.
  double edge_lipschitz = 1.0;
  double edge_bound = 0.0;

  static DriftCoefficient zero(const GraphRef& graph);
  static DriftCoefficient affine(ScalarField offset, OneForm direction);

  ScalarField apply(const MeasureWeights& m, const OneForm& v) const;
  /// c5 with ||b(v)||_{L2(m)} <= c5 (1 + ||v||_H).
  double growth_constant(const MeasureWeights& m) const;
  /// Largest sampled ||b(v)|| / (c5 (1 + ||v||)) over random v; must be <= 1.
  double sampled_growth_ratio(const MeasureWeights& m, int samples, unsigned seed) const;
};

struct DriftOptions {
  double tol = 1e-10;
  int max_iterations = 5000;
};

struct DriftResult {
  ScalarField u;
  SolveDiagnostics diagnostics;
};

/// Weak solution of -Au + b(du) + rho u = 0 by Picard iteration
/// (L + rho M) u_{k+1} = -M b(du_k).
DriftResult solve_drift(const MeasureWeights& m, const DriftCoefficient& b, double rho,
                        const DriftOptions& options = {});

/// Matrix of L^Q u = Au + <b_x, d_x u>_{H_x}.
Eigen::MatrixXd perturbed_generator(const MeasureWeights& m, const OneForm& b);

/// Q(f,g) = E(f,g) - sum_x m(x) g(x) <b_x, d_x f>_{H_x}.
double q_form(const MeasureWeights& m, const OneForm& b, const ScalarField& f, const ScalarField& g);

struct PositivityReport {
  bool positive = true;
  double min_entry = 0.0;
  int min_row = -1, min_col = -1;
  /// Sufficient condition for positivity at every t: all off-diagonal entries of L >= 0.
  bool offdiagonal_nonnegative = true;
  int offdiag_row = -1, offdiag_col = -1;
  double offdiag_value = 0.0;
};

/// Computes exp(tL) by scaling and squaring and checks all entries >= -1e-12.
PositivityReport semigroup_positivity(const Eigen::MatrixXd& generator, double t);

}  // namespace fractalvec
