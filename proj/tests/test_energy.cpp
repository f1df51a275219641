#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fractalvec/operators.hpp"
#include "support.hpp"

using namespace fractalvec;
using namespace testsupport;

TEST_CASE("energy examples") {
  const auto g = interval(3);
  Eigen::VectorXd x(g->vertex_count());
  for (int v = 0; v < g->vertex_count(); ++v) x[v] = g->coordinates()[static_cast<std::size_t>(v)][0];
  CHECK(energy(ScalarField(g, x)) == doctest::Approx(1.0).epsilon(1e-14));

  const auto t = triangle();
  const ScalarField ind(t, Eigen::Vector3d(1, 0, 0));
  CHECK(energy(ind) == doctest::Approx(2.0));
  CHECK(energy(ScalarField::constant(t, 3.5)) == 0.0);

  std::mt19937 rng(1);
  const auto f = random_field(gasket(2), rng);
  const auto r = energy_report(f);
  CHECK(r.per_edge.sum() == doctest::Approx(r.energy).epsilon(1e-14));
}

TEST_CASE("energy measure examples and identities") {
  const auto t = triangle();
  const ScalarField ind(t, Eigen::Vector3d(1, 0, 0));
  const auto gamma = energy_measure(ind, ind);
  CHECK(gamma[0] == doctest::Approx(1.0));
  CHECK(gamma[1] == doctest::Approx(0.5));
  CHECK(gamma[2] == doctest::Approx(0.5));
  CHECK(max_abs(energy_measure(ind, ScalarField::constant(t, 2.0)).values()) == 0.0);

  std::mt19937 rng(2);
  const auto g2 = gasket(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_field(g2, rng), g = random_field(g2, rng), h = random_field(g2, rng);
    const auto gh = energy_measure(g, h);
    CHECK(rel_err(gh.total(), energy(g, h)) <= 1e-12);
    const double lhs = 2.0 * f.values().dot(gh.values());
    const double rhs = energy(f * g, h) + energy(f * h, g) - energy(g * h, f);
    CHECK(rel_err(lhs, rhs) <= 1e-12);
    CHECK(energy_measure(g, g).values().minCoeff() >= 0.0);
    CHECK_FALSE(energy_measure(g, g).is_signed());
  }
}

TEST_CASE("generator examples") {
  const auto t = triangle();
  const auto af = generator_apply(uniform(t), ScalarField(t, Eigen::Vector3d(1, 0, 0)));
  CHECK(af[0] == doctest::Approx(-6.0));
  CHECK(af[1] == doctest::Approx(3.0));
  CHECK(af[2] == doctest::Approx(3.0));

  const auto i1 = interval(1);
  const auto ai = generator_apply(self_similar_measure(i1), ScalarField(i1, Eigen::Vector3d(0, 1, 0)));
  CHECK(ai[0] == doctest::Approx(8.0));
  CHECK(ai[1] == doctest::Approx(-8.0));
  CHECK(ai[2] == doctest::Approx(8.0));
  CHECK(max_abs(generator_apply(uniform(t), ScalarField::constant(t, 1.0)).values()) == 0.0);

  const auto g = gasket(3);
  const auto m = self_similar_measure(g);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_field(g, rng), h = random_field(g, rng);
    CHECK(std::abs(l2_inner(m, generator_apply(m, f), h) + energy(f, h)) <= 1e-12 * std::max(1.0, energy(f)));
  }
  CHECK_THROWS_AS(generator_apply(MeasureWeights(t, Eigen::Vector3d(1, 0, 1), MeasureWeights::Kind::energy),
                                  ScalarField::zero(t)),
                  PreconditionError);
}

TEST_CASE("spectral gap and Poincare constant") {
  const auto t = triangle();
  CHECK(spectral_gap(uniform(t)) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(poincare_constant(uniform(t)) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  const auto spec = generator_spectrum(uniform(t));
  CHECK(spec[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(spec[1] == doctest::Approx(9.0));
  CHECK(spec[2] == doctest::Approx(9.0));

  const auto i1 = interval(1);
  const auto mi = self_similar_measure(i1);
  const auto oracle = dense_generator_spectrum(*i1, mi.values());
  CHECK(oracle[1] == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(oracle[2] == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(spectral_gap(mi) == doctest::Approx(8.0).epsilon(1e-12));

  const auto g3 = gasket(3);
  const auto m3 = self_similar_measure(g3);
  for (double s : {0.5, 2.0, 7.0})
    CHECK(poincare_constant(m3.scaled(s)) == doctest::Approx(s * poincare_constant(m3)).epsilon(1e-10));

  const LevelGraph split(4, {{0, 1}, {2, 3}}, {1.0, 1.0}, {0});
  const auto sg = std::make_shared<const LevelGraph>(split);
  CHECK_THROWS_AS(spectral_gap(MeasureWeights::counting(sg)), PreconditionError);
}

TEST_CASE("variance inequality with the gap constant is sharp") {
  const auto g = gasket(3);
  const auto m = self_similar_measure(g);
  const double lambda = spectral_gap(m);
  std::mt19937 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_field(g, rng);
    const auto c = mean_zero(m, f);
    CHECK(l2_inner(m, c, c) <= energy(f) / lambda * (1.0 + 1e-12));
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_stiffness(*g),
                                                               Eigen::MatrixXd(m.values().asDiagonal()));
  const ScalarField eig(g, es.eigenvectors().col(1));
  const auto c = mean_zero(m, eig);
  CHECK(rel_err(l2_inner(m, c, c), energy(eig) / lambda) <= 1e-9);
}

TEST_CASE("Lanczos gap agrees with the dense solver") {
  SpectralOptions lanczos;
  lanczos.dense_limit = 10;
  for (int n : {3, 4, 5}) {
    const auto g = gasket(n);
    const auto m = self_similar_measure(g);
    CHECK(rel_err(spectral_gap(m, lanczos), spectral_gap(m)) <= 1e-8);
  }
  const auto g = interval(7);
  const auto m = self_similar_measure(g);
  CHECK(rel_err(spectral_gap(m, lanczos), spectral_gap(m)) <= 1e-8);
}

namespace {

// Level-1 gasket by hand: corners 0,1,2, midpoints 3 (01), 4 (02), 5 (12).
// Gauss-Seidel minimization of the unit-conductance energy over 3, 4, 5.
double brute_force_gasket_ratio(const Eigen::Vector3d& boundary) {
  const int tri[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  std::vector<std::pair<int, int>> edges;
  for (const auto& t : tri)
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) edges.emplace_back(t[i], t[j]);
  double u[6] = {boundary[0], boundary[1], boundary[2], 0, 0, 0};
  for (int sweep = 0; sweep < 400; ++sweep)
    for (int v = 3; v < 6; ++v) {
      double sum = 0;
      int deg = 0;
      for (auto [a, b] : edges)
        if (a == v || b == v) {
          sum += u[a == v ? b : a];
          ++deg;
        }
      u[v] = sum / deg;
    }
  double e1 = 0;
  for (auto [a, b] : edges) e1 += (u[a] - u[b]) * (u[a] - u[b]);
  const double e0 = std::pow(boundary[0] - boundary[1], 2) + std::pow(boundary[0] - boundary[2], 2) +
                    std::pow(boundary[1] - boundary[2], 2);
  return e1 / e0;
}

}  // namespace

TEST_CASE("extension energy factor") {
  const double gasket_factor = extension_energy_factor(FractalSpec::sierpinski_gasket());
  CHECK(std::abs(gasket_factor - 0.6) <= 1e-12);
  CHECK(std::abs(brute_force_gasket_ratio({1, 0, 0}) - gasket_factor) <= 1e-12);
  CHECK(std::abs(extension_energy_factor(FractalSpec::interval()) - 0.5) <= 1e-12);

  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Vector3d b = random_vector(rng, 3);
    const double ratio = extension_energy_ratio(FractalSpec::sierpinski_gasket(), {b[0], b[1], b[2]});
    CHECK(std::abs(ratio - brute_force_gasket_ratio(b)) <= 1e-12);
  }
  CHECK(extension_energy_ratio(FractalSpec::sierpinski_gasket(), {2, 2, 2}) == doctest::Approx(0.6));
  CHECK(extension_energy_ratio(FractalSpec::interval(), {1, 1}) == doctest::Approx(0.5));

  const auto g = build_level(FractalSpec::interval(), 3);
  const auto h = harmonic_extension(g, {0.0, 1.0});
  CHECK(energy(h) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("harmonic extension is harmonic off the boundary") {
  const auto g = gasket(3);
  const auto h = harmonic_extension(g, {1.0, -0.5, 0.25});
  const auto ah = generator_apply(self_similar_measure(g), h);
  for (int v = 0; v < g->vertex_count(); ++v)
    if (!g->is_boundary(v)) CHECK(std::abs(ah[v]) <= 1e-10);
  CHECK(h[g->boundary()[0]] == doctest::Approx(1.0));
  CHECK(h[g->boundary()[1]] == doctest::Approx(-0.5));
}

TEST_CASE("Kusuoka measure") {
  const auto kt = kusuoka_measure(triangle());
  for (int v = 0; v < 3; ++v) CHECK(kt[v] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(kt.total() == doctest::Approx(2.0).epsilon(1e-12));

  for (int n : {1, 3}) {
    const auto g = interval(n);
    const auto nu = kusuoka_measure(g);
    Eigen::VectorXd x(g->vertex_count());
    for (int v = 0; v < g->vertex_count(); ++v) x[v] = g->coordinates()[static_cast<std::size_t>(v)][0];
    const ScalarField xf(g, x);
    CHECK(max_abs(nu.values() - energy_measure(xf, xf).values()) <= 1e-12);
    CHECK(std::abs(nu.total() - 1.0) <= 1e-12);
  }

  const auto g = gasket(2);
  const auto a = kusuoka_measure(g);
  const auto b = kusuoka_measure(g, {2, 0, 1});
  CHECK(std::abs(a.total() - 2.0) <= 1e-12);
  CHECK(max_abs(a.values() - b.values()) <= 1e-12);
  CHECK(a.values().minCoeff() >= 0.0);
}

TEST_CASE("Dirichlet solve") {
  const auto t = triangle();
  const auto m = uniform(t);
  const auto u = dirichlet_solve(m, {0}, ScalarField(t, Eigen::Vector3d(0, 1, 1)));
  CHECK(u[0] == 0.0);
  CHECK(u[1] == doctest::Approx(-1.0 / 3.0));
  CHECK(u[2] == doctest::Approx(-1.0 / 3.0));
  CHECK(max_abs(dirichlet_solve(m, {0}, ScalarField::zero(t)).values()) == 0.0);
  CHECK_THROWS_AS(dirichlet_solve(m, {}, ScalarField::zero(t)), PreconditionError);

  const auto g = gasket(3);
  const auto mg = self_similar_measure(g);
  std::mt19937 rng(6);
  const auto f = random_field(g, rng);
  const auto ug = dirichlet_solve(mg, g->boundary(), f);
  const auto au = generator_apply(mg, ug);
  for (int v = 0; v < g->vertex_count(); ++v) {
    if (g->is_boundary(v)) CHECK(ug[v] == 0.0);
    else CHECK(std::abs(au[v] - f[v]) <= 1e-11);
  }
}

TEST_CASE("operators agree with the dense oracle") {
  const auto g = gasket(2);
  const Eigen::MatrixXd l = laplacian_matrix(*g);
  CHECK((l - dense_stiffness(*g)).cwiseAbs().maxCoeff() <= 1e-13);
  const auto m = self_similar_measure(g);
  std::mt19937 rng(7);
  const Eigen::VectorXd b = mean_zero(m, random_field(g, rng)).values().cwiseProduct(m.values());
  const Eigen::VectorXd x = LaplacianSolver(*g).solve(b, m.values());
  CHECK(max_abs(x - bordered_solve(*g, m.values(), b)) <= 1e-11);
}
