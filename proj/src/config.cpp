#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fractalvec/io.hpp"

namespace fractalvec::io {

namespace {

Point read_point(const YAML::Node& node) {
  if (!node.IsSequence() || node.size() != 2) throw ConstructionError("embedding points must be [x, y] pairs");
  return {node[0].as<double>(), node[1].as<double>()};
}

std::vector<Point> read_points(const YAML::Node& node, const char* key) {
  if (!node || !node.IsSequence()) throw ConstructionError(std::string("embedding needs a '") + key + "' list");
  std::vector<Point> points;
  for (const auto& p : node) points.push_back(read_point(p));
  return points;
}

FractalSpec from_node(const YAML::Node& root) {
  if (!root.IsMap()) throw ConstructionError("fractal spec must be a mapping");
  auto need = [&](const char* key) {
    const auto node = root[key];
    if (!node) throw ConstructionError(std::string("fractal spec is missing '") + key + "'");
    return node;
  };
  FractalSpec spec;
  spec.name = root["name"] ? root["name"].as<std::string>() : "custom";
  spec.cell_count = need("cell_count").as<int>();
  spec.boundary_size = need("boundary_size").as<int>();
  for (const auto& cell : need("vertex_identification")) spec.vertex_identification.push_back(cell.as<std::vector<int>>());
  spec.conductance_renormalization = Rational::parse(need("conductance_renormalization").as<std::string>());
  for (const auto& w : need("measure_weights")) spec.measure_weights.push_back(Rational::parse(w.as<std::string>()));
  if (const auto e = root["embedding"]) {
    Embedding emb;
    emb.boundary_points = read_points(e["boundary_points"], "boundary_points");
    emb.ratio = e["ratio"] ? e["ratio"].as<double>() : 0.5;
    emb.shifts = read_points(e["shifts"], "shifts");
    spec.embedding = std::move(emb);
  }
  spec.validate();
  return spec;
}

}  // namespace

FractalSpec parse_fractal_spec(const std::string& yaml_text) {
  try {
    return from_node(YAML::Load(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConstructionError(std::string("fractal spec: ") + e.what());
  }
}

FractalSpec read_fractal_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_fractal_spec(ss.str());
}

}  // namespace fractalvec::io
