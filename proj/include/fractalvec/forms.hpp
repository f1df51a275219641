#pragma once

#include <vector>

#include "fractalvec/fields.hpp"

namespace fractalvec {

/// (df)(x,y) = f(y) - f(x) on each canonical edge.
OneForm derivation(const ScalarField& f);

/// <v, w>_H = sum over edges of c_xy v(x,y) w(x,y).
double inner(const OneForm& v, const OneForm& w);
double norm(const OneForm& v);
/// Complex version, linear in the first argument.
std::complex<double> inner(const ComplexOneForm& v, const ComplexOneForm& w);

/// Midpoint module action (g.v)(x,y) = (g(x) + g(y))/2 * v(x,y). Left and right
/// actions coincide.
OneForm action_scalar(const ScalarField& g, const OneForm& v);

/// The class of a (x) b in H: b . da.
OneForm embed_simple_tensor(const ScalarField& a, const ScalarField& b);

/// (d*v)(x) = 1/m(x) sum_{y~x} c_xy v(x,y). -d* is the L2(m)/H adjoint of d.
ScalarField divergence(const MeasureWeights& m, const OneForm& v);

/// v = d(potential) + harmonic, harmonic in ker d*, potential with zero m-mean.
struct HodgeParts {
  ScalarField potential;
  OneForm exact;
  OneForm harmonic;
  /// max |d* harmonic|.
  double divergence_residual = 0.0;
};

HodgeParts hodge_decompose(const MeasureWeights& m, const OneForm& v);

/// H-orthonormal basis of ker d* (harmonic 1-forms); size = cycle rank. Built
/// from fundamental cycles of a BFS spanning tree, orthonormalized by QR; each
/// element's largest entry is positive.
std::vector<OneForm> harmonic_basis(const GraphRef& graph);
/// The measure does not enter ker d*; accepted for interface symmetry.
std::vector<OneForm> harmonic_basis(const MeasureWeights& m);

/// Delta_1 v = d(d* v).
OneForm form_laplacian_apply(const MeasureWeights& m, const OneForm& v);

/// Eigenvalues of -Delta_1 on H, ascending.
Eigen::VectorXd form_laplacian_spectrum(const MeasureWeights& m);

/// Pointwise representation of a 1-form over the vertex measure m:
/// ||v_x||^2 = 1/(2 m(x)) sum_{y~x} c_xy v(x,y)^2, so that
/// sum_x m(x) ||v_x||^2 = ||v||^2_H.
struct FiberView {
  Eigen::VectorXd norms;
  MeasureWeights measure;
  /// sup_x ||v_x||; finite on every finite graph, so v is in H_infinity.
  double sup_norm = 0.0;
  bool bounded = true;

  double integrated_square() const;
};

FiberView fiber_view(const MeasureWeights& m, const OneForm& v);

/// <v_x, w_x>_{H_x} at every vertex.
Eigen::VectorXd fiber_inner(const MeasureWeights& m, const OneForm& v, const OneForm& w);

}  // namespace fractalvec
