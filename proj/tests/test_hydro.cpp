#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fractalvec/hydro.hpp"
#include "fractalvec/operators.hpp"
#include "support.hpp"

using namespace fractalvec;
using namespace testsupport;

namespace {

Eigen::VectorXd x_coordinate(const LevelGraph& g) {
  Eigen::VectorXd x(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) x[v] = g.coordinates()[static_cast<std::size_t>(v)][0];
  return x;
}

int vertex_at(const LevelGraph& g, double x) {
  for (int v = 0; v < g.vertex_count(); ++v)
    if (std::abs(g.coordinates()[static_cast<std::size_t>(v)][0] - x) < 1e-12) return v;
  return -1;
}

}  // namespace

TEST_CASE("convection functional") {
  const auto i1 = interval(1);
  const auto m = self_similar_measure(i1);
  CHECK(convection(m, OneForm(i1, Eigen::Vector2d(1, 1)), derivation(ScalarField(i1, Eigen::Vector3d(0, 1, 0)))) ==
        doctest::Approx(0.0));
  // d*(dg) = (-8, 4, 0), midpoints (-2, 2), g.u = (-2, 4), <g.u, u> = 2(-2) + 2(8) = 12
  CHECK(convection(m, OneForm(i1, Eigen::Vector2d(1, 2)), derivation(ScalarField(i1, Eigen::Vector3d(1, 0, 0)))) ==
        doctest::Approx(-12.0));

  std::mt19937 rng(31);
  const auto g = gasket(2);
  const auto mg = self_similar_measure(g);
  for (const auto& w : harmonic_basis(g)) {
    const auto u = random_form(g, rng);
    CHECK(std::abs(convection(mg, u, w)) <= 1e-12);
  }
  CHECK(convection(mg, OneForm::zero(g), random_form(g, rng)) == 0.0);
}

TEST_CASE("weak Navier-Stokes verification") {
  const auto t = triangle();
  const auto circ = harmonic_basis(t)[0];
  const auto ok = verify_weak_ns(uniform(t), circ, 1e-10);
  CHECK(ok.is_weak_solution);
  CHECK(ok.harmonic_residual <= 1e-12);

  std::mt19937 rng(32);
  const auto g = gasket(2);
  const auto m = self_similar_measure(g);
  for (const auto& w : harmonic_basis(g)) CHECK(verify_weak_ns(m, w, 1e-10).is_weak_solution);
  const auto bad = verify_weak_ns(m, derivation(random_field(g, rng)), 1e-10);
  CHECK_FALSE(bad.is_weak_solution);
  CHECK(bad.harmonic_residual > 1e-3);

  const auto iv = interval(3);
  const auto mi = self_similar_measure(iv);
  CHECK(verify_weak_ns(mi, OneForm::zero(iv), 1e-10).is_weak_solution);
  for (int trial = 0; trial < 10; ++trial) CHECK_FALSE(verify_weak_ns(mi, random_form(iv, rng), 1e-10).is_weak_solution);
}

TEST_CASE("Neumann derivative and Gauss-Green") {
  for (int n : {1, 3}) {
    const auto g = interval(n);
    const ScalarField h(g, -x_coordinate(*g));
    CHECK(neumann_derivative(h, vertex_at(*g, 0.0)) == doctest::Approx(1.0));
    CHECK(neumann_derivative(ScalarField::constant(g, 2.0), 0) == 0.0);
  }

  std::mt19937 rng(33);
  const auto g = gasket(3);
  const auto m = self_similar_measure(g);
  const auto h = harmonic_extension(g, {0.3, -1.0, 0.7});
  double flux_sum = 0;
  for (int p : g->boundary()) flux_sum += neumann_derivative(h, p);
  CHECK(std::abs(flux_sum) <= 1e-11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_field(g, rng), f = random_field(g, rng);
    double boundary_sum = 0;
    for (int p : g->boundary()) boundary_sum += neumann_derivative(h, p) * v[p];
    CHECK(std::abs(energy(h, v) - boundary_sum) <= 1e-10);
    // general Gauss-Green: interior generator term plus boundary fluxes
    const auto af = generator_apply(m, f);
    double rhs = 0;
    for (int x = 0; x < g->vertex_count(); ++x)
      rhs += g->is_boundary(x) ? neumann_derivative(f, x) * v[x] : -m[x] * af[x] * v[x];
    CHECK(rel_err(energy(f, v), rhs) <= 1e-11);
  }
}

TEST_CASE("Neumann solve") {
  for (int n : {1, 2, 4}) {
    const auto g = interval(n);
    const int left = vertex_at(*g, 0.0), right = vertex_at(*g, 1.0);
    const auto h = solve_neumann(NeumannData{g, {left, right}, {1.0, -1.0}});
    CHECK(max_abs(h.values() - (0.5 - x_coordinate(*g).array()).matrix()) <= 1e-12);
  }

  const auto g = gasket(2);
  const auto m = self_similar_measure(g);
  const NeumannData data{g, g->boundary(), {1.0, -1.0, 0.0}};
  const auto h = solve_neumann(data, m);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(neumann_derivative(h, g->boundary()[i]) - data.flux[i]) <= 1e-10);
  const auto ah = generator_apply(m, h);
  for (int v = 0; v < g->vertex_count(); ++v)
    if (!g->is_boundary(v)) CHECK(std::abs(ah[v]) <= 1e-10);
  // corner values agree across levels up to the additive constant
  const auto g3 = gasket(3);
  const auto h3 = solve_neumann(NeumannData{g3, g3->boundary(), {1.0, -1.0, 0.0}});
  const auto corner_gap = [](const ScalarField& f, const GraphRef& gr, int i) {
    return f[gr->boundary()[static_cast<std::size_t>(i)]] - f[gr->boundary()[0]];
  };
  for (int i = 1; i < 3; ++i) CHECK(std::abs(corner_gap(h3, g3, i) - corner_gap(h, g, i)) <= 1e-10);

  CHECK(max_abs(solve_neumann(NeumannData{g, g->boundary(), {0, 0, 0}}).values()) == 0.0);
  CHECK_THROWS_AS(solve_neumann(NeumannData{g, g->boundary(), {1, 0, 0}}), PreconditionError);
  CHECK_THROWS_AS(solve_neumann(NeumannData{g, {}, {}}), PreconditionError);
  CHECK_THROWS_AS(solve_neumann(NeumannData{g, {0, 0}, {1, -1}}), PreconditionError);
}

TEST_CASE("Neumann solution is invariant under vertex relabelling") {
  const auto g = gasket(3);
  std::vector<int> perm(static_cast<std::size_t>(g->vertex_count()));
  for (int i = 0; i < g->vertex_count(); ++i) perm[static_cast<std::size_t>(i)] = g->vertex_count() - 1 - i;
  const auto p = permute_vertices(*g, perm);
  const std::vector<double> flux{0.5, 0.25, -0.75};
  const auto h = solve_neumann(NeumannData{g, g->boundary(), flux});
  std::vector<int> pb;
  for (int b : g->boundary()) pb.push_back(perm[static_cast<std::size_t>(b)]);
  const auto hp = solve_neumann(NeumannData{p, pb, flux});
  for (int v = 0; v < g->vertex_count(); ++v) CHECK(std::abs(h[v] - hp[perm[static_cast<std::size_t>(v)]]) <= 1e-9);
}

TEST_CASE("boundary Navier-Stokes solution and pressure") {
  const auto g0 = gasket(2);
  const auto zero = ns_boundary_solution(self_similar_measure(g0), NeumannData{g0, g0->boundary(), {0, 0, 0}});
  CHECK(max_abs(zero.velocity.values()) == 0.0);
  CHECK(max_abs(zero.pressure.values()) == 0.0);

  for (int n : {1, 2, 3}) {
    const auto g = interval(n);
    const auto m = self_similar_measure(g);
    const int left = vertex_at(*g, 0.0), right = vertex_at(*g, 1.0);
    const auto sol = ns_boundary_solution(m, NeumannData{g, {left, right}, {1.0, -1.0}});
    CHECK(sol.flux_residual <= 1e-10);
    CHECK(sol.boundary_residual <= 1e-10);
    for (int e = 0; e < g->edge_count(); ++e) CHECK(sol.velocity[e] == doctest::Approx(-std::ldexp(1.0, -n)));
    // Gamma(h)(x) = 1/2 deg(x) 2^n 4^{-n}, so p = -1/4 deg(x) 2^{-n}
    for (int v = 0; v < g->vertex_count(); ++v) {
      const double deg = static_cast<double>(g->neighbors(v).size());
      CHECK(sol.pressure[v] == doctest::Approx(-0.25 * deg * std::ldexp(1.0, -n)).epsilon(1e-12));
    }
  }

  std::mt19937 rng(34);
  const auto g = gasket(3);
  const auto m = self_similar_measure(g);
  const NeumannData data{g, g->boundary(), {2.0, -0.5, -1.5}};
  const auto sol = ns_boundary_solution(m, data);
  CHECK(sol.boundary_residual <= 1e-10);
  CHECK(sol.flux_residual <= 1e-10);
  const Eigen::VectorXd expected = -0.5 * energy_measure(sol.potential, sol.potential).values();
  CHECK(max_abs(sol.pressure.values() - expected) == 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto psi = random_field(g, rng);
    for (int b : g->boundary()) psi[b] = 0.0;
    CHECK(std::abs(inner(sol.velocity, derivation(psi))) <= 1e-10);
  }
}
