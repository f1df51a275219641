#pragma once

#include <vector>

#include "fractalvec/fields.hpp"

namespace fractalvec {

/// Energy split per edge, for diagnostics.
struct EnergyReport {
  double energy = 0.0;
  Eigen::VectorXd per_edge;
};

/// E(g1, g2) = sum over edges of c_xy (g1(x) - g1(y)) (g2(x) - g2(y)).
/// No 1/2 prefactor: each undirected edge is counted once.
double energy(const ScalarField& g1, const ScalarField& g2);
double energy(const ScalarField& f);
EnergyReport energy_report(const ScalarField& f);

/// Mutual energy measure Gamma(g,h)(x) = 1/2 sum_{y~x} c_xy (g(x)-g(y)) (h(x)-h(y)).
/// Satisfies 2 sum_x f Gamma(g,h) = E(fg,h) + E(fh,g) - E(gh,f) exactly.
MeasureWeights energy_measure(const ScalarField& g, const ScalarField& h);

/// (Af)(x) = 1/m(x) sum_{y~x} c_xy (f(y) - f(x)).
ScalarField generator_apply(const MeasureWeights& m, const ScalarField& f);

/// Eigenvalues of -A in L2(m), ascending, with multiplicity. Dense.
Eigen::VectorXd generator_spectrum(const MeasureWeights& m);

struct SpectralOptions {
  /// Graphs with more vertices than this use shift-invert Lanczos.
  int dense_limit = 2000;
  double tolerance = 1e-10;
  int max_lanczos_steps = 300;
};

/// Smallest nonzero eigenvalue lambda_1 of -A in L2(m). The variance inequality
/// int (f - f_X)^2 dm <= (1/lambda_1) E(f) holds with this constant and is sharp.
double spectral_gap(const MeasureWeights& m, const SpectralOptions& options = {});

/// Best constant c_P in ||f||^2_{L2(m)} <= c_P E(f) over m-mean-zero f.
/// On a finite connected graph this is exactly 1 / spectral_gap(m).
double poincare_constant(const MeasureWeights& m, const SpectralOptions& options = {});

/// Energy scaling of the renormalization map: the level-1 energy (unit
/// conductances) of the harmonic extension of boundary data, divided by the
/// level-0 energy of that data. A consistent spec gives 1 / r_c for every
/// boundary datum; throws ConstructionError otherwise.
double extension_energy_factor(const FractalSpec& spec);

/// The same ratio for one boundary datum. Constant data have zero energy at both
/// levels; the ratio is then taken from the indicator basis instead.
double extension_energy_ratio(const FractalSpec& spec, const std::vector<double>& boundary_values);

/// nu = sum_i Gamma(h_i, h_i) over an energy-orthonormal basis of functions
/// harmonic off the boundary, modulo constants. Total mass = |boundary| - 1.
MeasureWeights kusuoka_measure(const GraphRef& graph);
/// As above with the Gram-Schmidt pass run over boundary positions (indices into
/// graph->boundary()) in the given order.
MeasureWeights kusuoka_measure(const GraphRef& graph, const std::vector<int>& boundary_order);

/// Harmonic extension of boundary values (indexed like graph.boundary()).
ScalarField harmonic_extension(const GraphRef& graph, const std::vector<double>& boundary_values);

/// u with u = 0 on `dirichlet` and (Au)(x) = f(x) off it.
ScalarField dirichlet_solve(const MeasureWeights& m, const std::vector<int>& dirichlet, const ScalarField& f);

}  // namespace fractalvec
