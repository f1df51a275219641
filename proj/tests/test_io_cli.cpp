#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fractalvec/cli.hpp"
#include "fractalvec/io.hpp"
#include "support.hpp"

using namespace fractalvec;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fractalvec_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fractalvec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<double> csv_column(const fs::path& p, int column) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  std::vector<double> values;
  while (std::getline(f, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (int i = 0; i <= column; ++i) std::getline(ss, cell, ',');
    values.push_back(std::stod(cell));
  }
  return values;
}

}  // namespace

TEST_CASE("float formatting round-trips") {
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(io::format_double(x)) == x);
  }
  CHECK(io::format_double(-0.0) == "0");
  CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("CSV round trips") {
  const auto dir = scratch("csv");
  std::mt19937 rng(52);
  const auto g = gasket(2);
  const auto f = random_field(g, rng);
  const auto v = random_form(g, rng);
  io::write_scalar_csv(dir / "f.csv", f);
  io::write_form_csv(dir / "v.csv", v);
  CHECK(io::read_scalar_csv(dir / "f.csv", g).values() == f.values());
  CHECK(io::read_form_csv(dir / "v.csv", g).values() == v.values());

  io::write_edges_csv(dir / "edges.csv", *g);
  io::write_vertices_csv(dir / "vertices.csv", *g);
  CHECK(slurp(dir / "edges.csv").rfind("src,dst,conductance\n", 0) == 0);
  CHECK(slurp(dir / "vertices.csv").rfind("id,x,y,boundary_flag\n", 0) == 0);
  const auto flags = csv_column(dir / "vertices.csv", 3);
  CHECK(std::count(flags.begin(), flags.end(), 1.0) == 3);

  write(dir / "rev.csv", "src,dst,value\n1,0,2.5\n");
  const auto t = triangle();
  const auto r = io::read_form_csv(dir / "rev.csv", t);
  CHECK(r[t->find_edge(0, 1)] == -2.5);
  write(dir / "short.csv", "0,1\n1,2\n");
  CHECK_THROWS_AS(io::read_scalar_csv(dir / "short.csv", t), PreconditionError);
  write(dir / "noedge.csv", "0,0,1\n");
  CHECK_THROWS_AS(io::read_form_csv(dir / "noedge.csv", t), PreconditionError);
  CHECK_THROWS_AS(io::read_scalar_csv(dir / "missing.csv", t), PreconditionError);
}

TEST_CASE("cli build") {
  const auto dir = scratch("build");
  write(dir / "g.yaml", "fractal: gasket\nlevel: 2\n");
  const auto r = invoke({"build", "--config", (dir / "g.yaml").string(), "--out", (dir / "out").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("V,15\nE,27\ncycle_rank,13\n") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "edges.csv"));
  CHECK(fs::exists(dir / "out" / "vertices.csv"));

  write(dir / "i.yaml", "fractal: interval\nlevel: 3\n");
  CHECK(invoke({"build", "-c", (dir / "i.yaml").string(), "-o", (dir / "o2").string()}).out.find("cycle_rank,0") !=
        std::string::npos);

  const auto missing = invoke({"build", "--config", (dir / "nope.yaml").string()});
  CHECK(missing.code == 2);
  const auto usage = invoke({"build"});
  CHECK(usage.code == 2);
  CHECK(usage.err.find("Usage") != std::string::npos);

  write(dir / "deep.yaml", "fractal: gasket\nlevel: 7\n");
  CHECK(invoke({"build", "-c", (dir / "deep.yaml").string(), "-o", (dir / "o3").string()}).code == 2);

  write(dir / "custom.yaml", R"(fractal:
  name: halves
  cell_count: 2
  boundary_size: 2
  vertex_identification: [[0, 2], [2, 1]]
  conductance_renormalization: "2"
  measure_weights: ["1/2", "1/2"]
level: 2
)");
  CHECK(invoke({"build", "-c", (dir / "custom.yaml").string(), "-o", (dir / "o4").string()}).out.find("V,5\nE,4") !=
        std::string::npos);
}

TEST_CASE("cli solve") {
  const auto dir = scratch("solve");
  write(dir / "n.yaml", "fractal: interval\nlevel: 2\nsolve: {problem: neumann, boundary: [0, 4], flux: [1, -1]}\n");
  CHECK(invoke({"solve", "-c", (dir / "n.yaml").string(), "-o", (dir / "n").string()}).code == 0);
  const auto h = csv_column(dir / "n" / "h.csv", 1);
  const auto x = interval(2)->coordinates();
  for (std::size_t v = 0; v < h.size(); ++v) CHECK(std::abs(h[v] - (0.5 - x[v][0])) <= 1e-12);

  write(dir / "q.yaml", "fractal: gasket\nlevel: 0\nsolve: {problem: quasilinear, rhs: {values: [1, 0, 0]}}\n");
  const auto bad = invoke({"solve", "-c", (dir / "q.yaml").string(), "-o", (dir / "q").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("sum f m = 0") != std::string::npos);

  write(dir / "q2.yaml", R"(fractal: gasket
level: 2
seed: 3
solve:
  problem: quasilinear
  nonlinearity: {kind: scaled_monotone, alpha: 1, beta: 1}
  rhs: {random: true, mean_zero: true}
)");
  CHECK(invoke({"solve", "-c", (dir / "q2.yaml").string(), "-o", (dir / "q2").string()}).code == 0);

  write(dir / "q3.yaml", R"(fractal: gasket
level: 2
solve:
  problem: quasilinear
  max_iterations: 1
  nonlinearity: {kind: scaled_monotone, alpha: 1, beta: 1}
  rhs: {random: true, mean_zero: true}
)");
  CHECK(invoke({"solve", "-c", (dir / "q3.yaml").string(), "-o", (dir / "q3").string()}).code == 1);

  write(dir / "ns.yaml", "fractal: gasket\nlevel: 1\nsolve: {problem: ns-verify, form: {harmonic: 0}}\n");
  CHECK(invoke({"solve", "-c", (dir / "ns.yaml").string(), "-o", (dir / "ns").string()}).code == 0);
  write(dir / "ns2.yaml", "fractal: gasket\nlevel: 1\nsolve: {problem: ns-verify, form: {exact: {random: true}}}\n");
  CHECK(invoke({"solve", "-c", (dir / "ns2.yaml").string(), "-o", (dir / "ns2").string()}).code == 3);

  write(dir / "d.yaml", R"(fractal: gasket
level: 2
solve: {problem: drift, rho: 5, offset: {constant: 0}}
)");
  CHECK(invoke({"solve", "-c", (dir / "d.yaml").string(), "-o", (dir / "d").string()}).code == 0);
  for (double u : csv_column(dir / "d" / "u.csv", 1)) CHECK(u == 0.0);
}

TEST_CASE("cli spectrum") {
  const auto dir = scratch("spectrum");
  write(dir / "dirac.yaml", "fractal: gasket\nlevel: 0\nspectrum: {operator: dirac}\n");
  CHECK(invoke({"spectrum", "-c", (dir / "dirac.yaml").string(), "-o", (dir / "d").string()}).code == 0);
  const auto s = csv_column(dir / "d" / "spectrum.csv", 1);
  const double expected[] = {-3, -3, 0, 0, 3, 3};
  REQUIRE(s.size() == 6);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(s[static_cast<std::size_t>(k)] - expected[k]) <= 1e-12);

  write(dir / "gen.yaml", "fractal: gasket\nlevel: 0\nspectrum: {operator: generator}\n");
  CHECK(invoke({"spectrum", "-c", (dir / "gen.yaml").string(), "-o", (dir / "g").string()}).code == 0);
  const auto gs = csv_column(dir / "g" / "spectrum.csv", 1);
  CHECK(std::abs(gs[0]) <= 1e-12);
  CHECK(std::abs(gs[1] - 9) <= 1e-12);
  CHECK(std::abs(gs[2] - 9) <= 1e-12);

  const std::string mag = "fractal: gasket\nlevel: 1\nseed: 9\nspectrum:\n  operator: magnetic\n  magnetic:\n"
                          "    convention: exponential\n    a: {random: true}\n    V: {random: true}\n";
  write(dir / "m1.yaml", mag);
  write(dir / "m2.yaml", mag + "    gauge: {random: true}\n");
  CHECK(invoke({"spectrum", "-c", (dir / "m1.yaml").string(), "-o", (dir / "m1").string()}).code == 0);
  CHECK(invoke({"spectrum", "-c", (dir / "m2.yaml").string(), "-o", (dir / "m2").string()}).code == 0);
  const auto a = csv_column(dir / "m1" / "spectrum.csv", 1), b = csv_column(dir / "m2" / "spectrum.csv", 1);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-10);

  write(dir / "bad.yaml", "fractal: gasket\nlevel: 0\nspectrum: {operator: curl}\n");
  CHECK(invoke({"spectrum", "-c", (dir / "bad.yaml").string(), "-o", (dir / "b").string()}).code == 2);
}

TEST_CASE("cli runs are reproducible") {
  const auto dir = scratch("repro");
  write(dir / "r.yaml", R"(fractal: gasket
level: 3
seed: 17
solve:
  problem: quasilinear
  nonlinearity: {kind: scaled_monotone, alpha: 1, beta: 0.5}
  rhs: {random: true, mean_zero: true}
)");
  CHECK(invoke({"solve", "-c", (dir / "r.yaml").string(), "-o", (dir / "a").string()}).code == 0);
  CHECK(invoke({"solve", "-c", (dir / "r.yaml").string(), "-o", (dir / "b").string()}).code == 0);
  CHECK(slurp(dir / "a" / "u.csv") == slurp(dir / "b" / "u.csv"));
  CHECK(slurp(dir / "a" / "u.csv").size() > 100);
}
