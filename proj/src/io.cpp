#include "fractalvec/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace fractalvec::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return cells;
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Rows of a CSV file; a first row that does not parse as numbers is a header.
std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (cells.size() != columns)
      throw PreconditionError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(columns) + " columns");
    double probe;
    if (rows.empty() && line_no == 1 && !parse_number(cells[0], probe)) continue;
    rows.push_back(std::move(cells));
  }
  return rows;
}

int parse_index(const std::string& text, const std::filesystem::path& path, int limit) {
  int v = -1;
  if (!parse_number(text, v) || v < 0 || v >= limit)
    throw PreconditionError(path.string() + ": bad vertex id '" + text + "'");
  return v;
}

double parse_value(const std::string& text, const std::filesystem::path& path) {
  double v = 0.0;
  if (!parse_number(text, v)) throw PreconditionError(path.string() + ": bad number '" + text + "'");
  return v;
}

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_edges_csv(const std::filesystem::path& path, const LevelGraph& graph) {
  auto out = open_out(path);
  out << "src,dst,conductance\n";
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edges()[static_cast<std::size_t>(e)];
    out << edge.src << ',' << edge.dst << ',' << format_double(graph.conductance()[static_cast<std::size_t>(e)])
        << '\n';
  }
}

void write_vertices_csv(const std::filesystem::path& path, const LevelGraph& graph) {
  auto out = open_out(path);
  out << "id,x,y,boundary_flag\n";
  for (int v = 0; v < graph.vertex_count(); ++v) {
    out << v << ',';
    if (graph.has_coordinates()) {
      const auto& p = graph.coordinates()[static_cast<std::size_t>(v)];
      out << format_double(p[0]) << ',' << format_double(p[1]);
    } else {
      out << ',';
    }
    out << ',' << (graph.is_boundary(v) ? 1 : 0) << '\n';
  }
}

void write_scalar_csv(const std::filesystem::path& path, const ScalarField& f) {
  auto out = open_out(path);
  out << "vertex_id,value\n";
  for (Eigen::Index v = 0; v < f.size(); ++v) out << v << ',' << format_double(f[v]) << '\n';
}

void write_measure_csv(const std::filesystem::path& path, const MeasureWeights& m) {
  auto out = open_out(path);
  out << "vertex_id,value\n";
  for (Eigen::Index v = 0; v < m.values().size(); ++v) out << v << ',' << format_double(m[v]) << '\n';
}

void write_form_csv(const std::filesystem::path& path, const OneForm& v) {
  auto out = open_out(path);
  out << "src,dst,value\n";
  const auto& edges = v.graph()->edges();
  for (Eigen::Index e = 0; e < v.size(); ++e) {
    const auto& edge = edges[static_cast<std::size_t>(e)];
    out << edge.src << ',' << edge.dst << ',' << format_double(v[e]) << '\n';
  }
}

void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& eigenvalues) {
  auto out = open_out(path);
  out << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) out << i << ',' << format_double(eigenvalues[i]) << '\n';
}

ScalarField read_scalar_csv(const std::filesystem::path& path, const GraphRef& graph) {
  const int n = graph->vertex_count();
  Eigen::VectorXd values = Eigen::VectorXd::Zero(n);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& row : read_rows(path, 2)) {
    const int v = parse_index(row[0], path, n);
    if (seen[static_cast<std::size_t>(v)]) throw PreconditionError(path.string() + ": vertex " + row[0] + " repeated");
    seen[static_cast<std::size_t>(v)] = true;
    values[v] = parse_value(row[1], path);
  }
  for (int v = 0; v < n; ++v)
    if (!seen[static_cast<std::size_t>(v)])
      throw PreconditionError(path.string() + ": no value for vertex " + std::to_string(v));
  return ScalarField(graph, std::move(values));
}

OneForm read_form_csv(const std::filesystem::path& path, const GraphRef& graph) {
  const int n = graph->vertex_count();
  Eigen::VectorXd values = Eigen::VectorXd::Zero(graph->edge_count());
  for (const auto& row : read_rows(path, 3)) {
    const int x = parse_index(row[0], path, n);
    const int y = parse_index(row[1], path, n);
    const int e = graph->find_edge(x, y);
    if (e < 0) throw PreconditionError(path.string() + ": no edge " + row[0] + "-" + row[1]);
    const double value = parse_value(row[2], path);
    values[e] += graph->edges()[static_cast<std::size_t>(e)].src == x ? value : -value;
  }
  return OneForm(graph, std::move(values));
}

}  // namespace fractalvec::io
