#include "fractalvec/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <yaml-cpp/yaml.h>

#include "fractalvec/energy.hpp"
#include "fractalvec/forms.hpp"
#include "fractalvec/hydro.hpp"
#include "fractalvec/io.hpp"
#include "fractalvec/pde.hpp"
#include "fractalvec/quantum.hpp"

namespace fractalvec::cli {

namespace fs = std::filesystem;

namespace {

/// Verification failed (exit 3); distinct from precondition and solver errors.
struct VerificationFailure : Error {
  using Error::Error;
};

struct Run {
  YAML::Node config;
  fs::path config_dir;
  fs::path out_dir;
  bool verbose = false;
  std::ostream* out = nullptr;
  GraphRef graph;
  std::optional<MeasureWeights> measure;
  std::mt19937_64 rng;
  double tol = 1e-10;

  const MeasureWeights& m() const { return *measure; }
  fs::path resolve(const std::string& p) const { return fs::path(p).is_absolute() ? fs::path(p) : config_dir / p; }
};

YAML::Node section(const YAML::Node& root, const char* key) {
  const auto node = root[key];
  if (!node) throw PreconditionError(std::string("config is missing the '") + key + "' section");
  return node;
}

std::vector<double> random_values(Run& run, Eigen::Index n) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = uniform(run.rng);
  return v;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Scalar field sources: {values: [...]}, {file: f.csv}, {constant: c}, {random: true}.
// `mean_zero: true` subtracts the m-weighted mean.
ScalarField scalar_from(Run& run, const YAML::Node& node) {
  if (!node || !node.IsMap()) throw PreconditionError("scalar field source must be a mapping");
  const int n = run.graph->vertex_count();
  std::optional<ScalarField> f;
  if (node["values"]) {
    const auto v = node["values"].as<std::vector<double>>();
    if (static_cast<int>(v.size()) != n)
      throw PreconditionError("scalar values: got " + std::to_string(v.size()) + ", graph has " +
                              std::to_string(n) + " vertices");
    f.emplace(run.graph, to_vector(v));
  } else if (node["file"]) {
    f.emplace(io::read_scalar_csv(run.resolve(node["file"].as<std::string>()), run.graph));
  } else if (node["constant"]) {
    f.emplace(ScalarField::constant(run.graph, node["constant"].as<double>()));
  } else if (node["random"] && node["random"].as<bool>()) {
    f.emplace(run.graph, to_vector(random_values(run, n)));
  } else {
    throw PreconditionError("scalar field source needs one of values, file, constant, random");
  }
  if (node["mean_zero"] && node["mean_zero"].as<bool>()) return mean_zero(run.m(), *f);
  return *f;
}

// 1-form sources: {values: [...]} in edge order, {file: f.csv}, {constant: c},
// {random: true}, {harmonic: k}, {exact: <scalar source>}.
OneForm form_from(Run& run, const YAML::Node& node) {
  if (!node || !node.IsMap()) throw PreconditionError("1-form source must be a mapping");
  const int n = run.graph->edge_count();
  if (node["values"]) {
    const auto v = node["values"].as<std::vector<double>>();
    if (static_cast<int>(v.size()) != n)
      throw PreconditionError("form values: got " + std::to_string(v.size()) + ", graph has " +
                              std::to_string(n) + " edges");
    return OneForm(run.graph, to_vector(v));
  }
  if (node["file"]) return io::read_form_csv(run.resolve(node["file"].as<std::string>()), run.graph);
  if (node["constant"]) return OneForm::constant(run.graph, node["constant"].as<double>());
  if (node["random"] && node["random"].as<bool>()) return OneForm(run.graph, to_vector(random_values(run, n)));
  if (node["harmonic"]) {
    const auto basis = harmonic_basis(run.graph);
    const int k = node["harmonic"].as<int>();
    if (k < 0 || k >= static_cast<int>(basis.size()))
      throw PreconditionError("harmonic index " + std::to_string(k) + " out of range (cycle rank " +
                              std::to_string(basis.size()) + ")");
    return basis[static_cast<std::size_t>(k)];
  }
  if (node["exact"]) return derivation(scalar_from(run, node["exact"]));
  throw PreconditionError("1-form source needs one of values, file, constant, random, harmonic, exact");
}

FractalSpec spec_from(Run& run, const YAML::Node& node) {
  if (!node) throw PreconditionError("config is missing 'fractal'");
  if (node.IsScalar()) return FractalSpec::builtin(node.as<std::string>());
  if (node["file"]) return io::read_fractal_spec(run.resolve(node["file"].as<std::string>()));
  return io::parse_fractal_spec(YAML::Dump(node));
}

void setup(Run& run) {
  const auto& c = run.config;
  const int level = c["level"] ? c["level"].as<int>() : 0;
  const int cap = c["level_cap"] ? c["level_cap"].as<int>() : 6;
  if (level < 0 || level > cap)
    throw PreconditionError("level " + std::to_string(level) + " outside [0, " + std::to_string(cap) + "]");
  run.graph = build_level(spec_from(run, c["fractal"]), level);
  run.rng.seed(c["seed"] ? c["seed"].as<std::uint64_t>() : 0);
  if (c["tolerance"]) run.tol = c["tolerance"].as<double>();
  if (!(run.tol > 0.0)) throw PreconditionError("tolerance must be positive");

  const std::string kind = c["measure"] ? c["measure"].as<std::string>() : "self_similar";
  if (kind == "self_similar") {
    run.measure.emplace(self_similar_measure(run.graph));
  } else if (kind == "kusuoka") {
    run.measure.emplace(kusuoka_measure(run.graph));
    run.measure->require_positive("kusuoka reference measure");
  } else if (kind == "counting") {
    run.measure.emplace(MeasureWeights::counting(run.graph));
  } else {
    throw PreconditionError("unknown measure '" + kind + "' (self_similar, kusuoka, counting)");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

int cmd_build(Run& run) {
  const auto& g = *run.graph;
  io::write_edges_csv(run.out_dir / "edges.csv", g);
  io::write_vertices_csv(run.out_dir / "vertices.csv", g);
  io::write_measure_csv(run.out_dir / "measure.csv", run.m());
  std::ostringstream s;
  s << "spec," << g.spec_name() << "\nlevel," << g.level() << "\nV," << g.vertex_count() << "\nE,"
    << g.edge_count() << "\ncycle_rank," << cycle_rank(g) << "\nspectral_gap,"
    << io::format_double(spectral_gap(run.m())) << "\n";
  write_text(run.out_dir / "summary.csv", s.str());
  *run.out << s.str();
  return ok;
}

EdgeNonlinearity nonlinearity_from(const YAML::Node& node) {
  if (!node) return EdgeNonlinearity::identity();
  if (node.IsScalar()) {
    if (node.as<std::string>() == "identity") return EdgeNonlinearity::identity();
    throw PreconditionError("unknown nonlinearity '" + node.as<std::string>() + "'");
  }
  const std::string kind = node["kind"] ? node["kind"].as<std::string>() : "scaled_monotone";
  if (kind == "identity") return EdgeNonlinearity::identity();
  if (kind == "scaled_monotone")
    return EdgeNonlinearity::scaled_monotone(node["alpha"].as<double>(1.0), node["beta"].as<double>(0.0));
  if (kind == "table")
    return EdgeNonlinearity::user_table(node["s"].as<std::vector<double>>(), node["phi"].as<std::vector<double>>());
  throw PreconditionError("unknown nonlinearity kind '" + kind + "'");
}

int finish_solve(Run& run, const ScalarField& u, const SolveDiagnostics& d) {
  io::write_scalar_csv(run.out_dir / "u.csv", u);
  std::ostringstream s;
  s << "iterations," << d.iterations << "\nresidual," << io::format_double(d.residual) << "\nconverged,"
    << (d.converged ? 1 : 0) << "\n";
  write_text(run.out_dir / "diagnostics.csv", s.str());
  *run.out << s.str();
  if (run.verbose) *run.out << d.report;
  if (!d.converged) throw SolverError("solver did not converge (residual " + io::format_double(d.residual) + ")");
  return ok;
}

int cmd_solve(Run& run) {
  const auto solve = section(run.config, "solve");
  const std::string problem = section(solve, "problem").as<std::string>();
  if (problem == "quasilinear") {
    QuasilinearOptions opt;
    opt.tol = run.tol;
    if (solve["max_iterations"]) opt.max_iterations = solve["max_iterations"].as<int>();
    if (solve["initial"]) opt.initial = scalar_from(run, solve["initial"]);
    const auto a = nonlinearity_from(solve["nonlinearity"]);
    const auto f = scalar_from(run, section(solve, "rhs"));
    const auto r = solve_quasilinear(run.m(), a, f, opt);
    return finish_solve(run, r.u, r.diagnostics);
  }
  if (problem == "drift") {
    DriftOptions opt;
    opt.tol = run.tol;
    if (solve["max_iterations"]) opt.max_iterations = solve["max_iterations"].as<int>();
    auto b = DriftCoefficient::zero(run.graph);
    if (solve["offset"]) b.offset = scalar_from(run, solve["offset"]);
    if (solve["direction"]) b.direction = form_from(run, solve["direction"]);
    const auto r = solve_drift(run.m(), b, section(solve, "rho").as<double>(), opt);
    return finish_solve(run, r.u, r.diagnostics);
  }
  if (problem == "neumann") {
    NeumannData data{run.graph, section(solve, "boundary").as<std::vector<int>>(),
                     section(solve, "flux").as<std::vector<double>>()};
    const auto sol = ns_boundary_solution(run.m(), data);
    io::write_scalar_csv(run.out_dir / "h.csv", sol.potential);
    io::write_form_csv(run.out_dir / "velocity.csv", sol.velocity);
    io::write_measure_csv(run.out_dir / "pressure.csv", sol.pressure);
    std::ostringstream s;
    s << "flux_residual," << io::format_double(sol.flux_residual) << "\nboundary_residual,"
      << io::format_double(sol.boundary_residual) << "\n";
    write_text(run.out_dir / "diagnostics.csv", s.str());
    *run.out << s.str();
    if (sol.flux_residual > run.tol || sol.boundary_residual > run.tol)
      throw VerificationFailure("Neumann residuals exceed tolerance");
    return ok;
  }
  if (problem == "ns-verify") {
    const auto u0 = form_from(run, section(solve, "form"));
    const auto rep = verify_weak_ns(run.m(), u0, run.tol);
    std::ostringstream s;
    s << "is_weak_solution," << (rep.is_weak_solution ? 1 : 0) << "\nharmonic_residual,"
      << io::format_double(rep.harmonic_residual) << "\n";
    for (std::size_t i = 0; i < rep.convection_values.size(); ++i)
      s << "test_" << i << ',' << io::format_double(rep.convection_values[i]) << ','
        << io::format_double(rep.dissipation_values[i]) << "\n";
    write_text(run.out_dir / "ns_report.csv", s.str());
    *run.out << "is_weak_solution," << (rep.is_weak_solution ? 1 : 0) << "\nharmonic_residual,"
             << io::format_double(rep.harmonic_residual) << "\n";
    if (run.verbose) *run.out << rep.note << "\n";
    if (!rep.is_weak_solution) throw VerificationFailure("u0 is not a weak solution: " + rep.note);
    return ok;
  }
  throw PreconditionError("unknown solve problem '" + problem + "' (quasilinear, drift, neumann, ns-verify)");
}

MagneticConfig magnetic_from(Run& run, const YAML::Node& node) {
  MagneticConfig cfg{OneForm::zero(run.graph), ScalarField::zero(run.graph), MagneticConvention::exponential};
  if (!node) return cfg;
  if (node["convention"]) {
    const auto c = node["convention"].as<std::string>();
    if (c == "linear") cfg.convention = MagneticConvention::linear;
    else if (c != "exponential") throw PreconditionError("unknown magnetic convention '" + c + "'");
  }
  if (node["a"]) cfg.a = form_from(run, node["a"]);
  if (node["V"]) cfg.V = scalar_from(run, node["V"]);
  if (node["gauge"]) cfg = gauge_transform(cfg, scalar_from(run, node["gauge"]));
  return cfg;
}

int cmd_spectrum(Run& run) {
  const auto spec = section(run.config, "spectrum");
  const std::string op = section(spec, "operator").as<std::string>();
  Eigen::VectorXd values;
  if (op == "generator") values = generator_spectrum(run.m());
  else if (op == "form_laplacian") values = form_laplacian_spectrum(run.m());
  else if (op == "magnetic") values = magnetic_spectrum(magnetic_from(run, spec["magnetic"]), run.m());
  else if (op == "dirac") values = dirac_spectrum(dirac_assemble(run.m()));
  else throw PreconditionError("unknown operator '" + op + "' (generator, form_laplacian, magnetic, dirac)");
  io::write_spectrum_csv(run.out_dir / "spectrum.csv", values);
  *run.out << "operator," << op << "\ncount," << values.size() << "\n";
  if (run.verbose)
    for (Eigen::Index i = 0; i < values.size(); ++i) *run.out << i << ',' << io::format_double(values[i]) << "\n";
  return ok;
}

void apply_thread_env() {
  if (const char* t = std::getenv("FRACVEC_THREADS")) {
    const int n = std::atoi(t);
    if (n <= 0) throw PreconditionError("FRACVEC_THREADS must be a positive integer");
    Eigen::setNbThreads(n);
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vector analysis on finite graph approximations of self-similar fractals", "fractalvec"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "out";
  bool verbose = false;
  std::vector<CLI::App*> commands;
  for (const auto& [name, help] : {std::pair{"build", "build a level graph and export it"},
                                   std::pair{"solve", "run the solver named in solve.problem"},
                                   std::pair{"spectrum", "compute the spectrum named in spectrum.operator"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "YAML run configuration")->required();
    sub->add_option("-o,--out", out_dir, "output directory (overrides config 'output')");
    sub->add_flag("-v,--verbose", verbose, "print solver reports");
    commands.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return precondition_failure;
  }

  try {
    apply_thread_env();
    Run run;
    if (!fs::exists(config_path)) throw PreconditionError("config file not found: " + config_path);
    run.config = YAML::LoadFile(config_path);
    run.config_dir = fs::path(config_path).parent_path();
    const bool out_given = std::any_of(commands.begin(), commands.end(),
                                       [](CLI::App* s) { return s->parsed() && s->count("--out") > 0; });
    run.out_dir = out_given || !run.config["output"] ? fs::path(out_dir)
                                                     : run.resolve(run.config["output"].as<std::string>());
    run.verbose = verbose;
    run.out = &out;
    setup(run);
    if (commands[0]->parsed()) return cmd_build(run);
    if (commands[1]->parsed()) return cmd_solve(run);
    return cmd_spectrum(run);
  } catch (const VerificationFailure& e) {
    err << "verification failed: " << e.what() << "\n";
    return verification_failure;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return precondition_failure;
  } catch (const YAML::Exception& e) {
    err << "bad config: " << e.what() << "\n";
    return precondition_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return solver_failure;
  }
}

}  // namespace fractalvec::cli
