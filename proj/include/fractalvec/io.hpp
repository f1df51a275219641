#pragma once

#include <charconv>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fractalvec/fields.hpp"

namespace fractalvec::io {

/// Shortest-exact formatting: 17 significant digits.
std::string format_double(double value);

void write_edges_csv(const std::filesystem::path& path, const LevelGraph& graph);
void write_vertices_csv(const std::filesystem::path& path, const LevelGraph& graph);

void write_scalar_csv(const std::filesystem::path& path, const ScalarField& f);
void write_measure_csv(const std::filesystem::path& path, const MeasureWeights& m);
void write_form_csv(const std::filesystem::path& path, const OneForm& v);
void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& eigenvalues);

/// Reads vertex_id,value rows (header optional); every vertex must appear once.
ScalarField read_scalar_csv(const std::filesystem::path& path, const GraphRef& graph);
/// Reads src,dst,value rows; a reversed pair contributes -value. Missing edges are 0.
OneForm read_form_csv(const std::filesystem::path& path, const GraphRef& graph);

/// FractalSpec from a YAML file (schema in docs/config.md).
FractalSpec read_fractal_spec(const std::filesystem::path& path);
/// FractalSpec from YAML text.
FractalSpec parse_fractal_spec(const std::string& yaml_text);

}  // namespace fractalvec::io
