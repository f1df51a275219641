#pragma once

#include <complex>

#include <Eigen/Core>

#include "fractalvec/fields.hpp"

namespace fractalvec {

using ComplexMatrix = Eigen::MatrixXcd;

enum class MagneticConvention { linear, exponential };

/// Real vector potential a (a 1-form) and electric potential V.
///
/// linear:      ((-i d - a) f)(x,y) = -i (f(y) - f(x)) - a(x,y) (f(x) + f(y)) / 2
/// exponential: ((-i d - a) f)(x,y) = -i (e^{-i a(x,y)/2} f(y) - e^{i a(x,y)/2} f(x))
/// Both are antisymmetric under edge reversal and agree to first order in a.
struct MagneticConfig {
  OneForm a;
  ScalarField V;
  MagneticConvention convention = MagneticConvention::exponential;
};

ComplexScalarField complexify(const ScalarField& f);

ComplexOneForm magnetic_derivative(const MagneticConfig& cfg, const ComplexScalarField& f);

/// E^{a,V}(f,g) = <(-i d - a) f, (-i d - a) g>_H + <f V, g>_{L2(m)}.
std::complex<double> magnetic_form(const MagneticConfig& cfg, const MeasureWeights& m, const ComplexScalarField& f,
                                   const ComplexScalarField& g);

/// Matrix of H^{a,V} with <H f, g>_{L2(m)} = E^{a,V}(f, g).
ComplexMatrix assemble_magnetic_hamiltonian(const MagneticConfig& cfg, const MeasureWeights& m);

/// Ascending eigenvalues of H^{a,V} (self-adjoint in L2(m)).
Eigen::VectorXd magnetic_spectrum(const MagneticConfig& cfg, const MeasureWeights& m);

/// a -> a + d lambda, V unchanged.
MagneticConfig gauge_transform(const MagneticConfig& cfg, const ScalarField& lambda);

/// sup_x ||a_x||_{H,x}.
double potential_sup_norm(const MagneticConfig& cfg, const MeasureWeights& m);

/// D = [[0, d^dagger], [d, 0]] on L2(m) (+) H, where d^dagger = -d* is the true
/// adjoint of d. D is symmetric for the combined inner product and
/// D^2 = diag(-A, -Delta_1).
class DiracOperator {
 public:
  explicit DiracOperator(const MeasureWeights& m);

  const MeasureWeights& measure() const { return m_; }
  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return edge_count_; }
  int dimension() const { return vertex_count_ + edge_count_; }

  /// Dense matrix on coordinates (vertex values, edge values).
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  /// Diagonal of the combined inner product: (m, c).
  Eigen::VectorXd weights() const;

  std::pair<ScalarField, OneForm> apply(const ScalarField& f, const OneForm& v) const;
  /// <(f,v), (g,w)> = <f,g>_{L2(m)} + <v,w>_H.
  double inner(const ScalarField& f, const OneForm& v, const ScalarField& g, const OneForm& w) const;

 private:
  MeasureWeights m_;
  int vertex_count_;
  int edge_count_;
  Eigen::MatrixXd matrix_;
};

DiracOperator dirac_assemble(const MeasureWeights& m);

/// Ascending eigenvalues of D with multiplicity.
Eigen::VectorXd dirac_spectrum(const DiracOperator& d);

/// Number of eigenvalues with |lambda| <= tol.
int zero_multiplicity(const Eigen::VectorXd& spectrum, double tol = 1e-8);

}  // namespace fractalvec
