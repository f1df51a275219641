#pragma once

#include <vector>

#include "fractalvec/fields.hpp"

namespace fractalvec {

/// Boundary fluxes for the Neumann problem. Solvable iff sum of fluxes is 0.
struct NeumannData {
  GraphRef graph;
  std::vector<int> boundary;
  std::vector<double> flux;
};

/// -<(d*v) u, u>_H with the midpoint action.
double convection(const MeasureWeights& m, const OneForm& u, const OneForm& v);

struct NSReport {
  bool is_weak_solution = false;
  /// ||d* u0||_{L2(m)}.
  double harmonic_residual = 0.0;
  /// Convection functional of u0 against each harmonic test form.
  std::vector<double> convection_values;
  /// <d* u0, d* v> against each harmonic test form.
  std::vector<double> dissipation_values;
  std::string note;
};

/// Checks that the constant trajectory u(t) = u0 satisfies the boundary-free weak
/// Navier-Stokes identity against the harmonic basis, and that d* u0 = 0.
NSReport verify_weak_ns(const MeasureWeights& m, const OneForm& u0, double tol);

/// (dh)_p = sum_{y~p} c_py (h(p) - h(y)).
double neumann_derivative(const ScalarField& h, int p);

/// h harmonic off B with (dh)_p = flux(p), zero mean under m.
ScalarField solve_neumann(const NeumannData& data, const MeasureWeights& m);
/// Uses the self-similar measure (counting measure for graphs without cells).
ScalarField solve_neumann(const NeumannData& data);

struct NSBoundarySolution {
  ScalarField potential;
  OneForm velocity;
  /// p = -1/2 Gamma(h, h).
  MeasureWeights pressure;
  /// max over interior vertices x of |<u, d 1_x>_H|.
  double boundary_residual = 0.0;
  /// max over boundary points of |(dh)_p - flux(p)|.
  double flux_residual = 0.0;
};

NSBoundarySolution ns_boundary_solution(const MeasureWeights& m, const NeumannData& data);

}  // namespace fractalvec
