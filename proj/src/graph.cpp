#include "fractalvec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "fractalvec/errors.hpp"

namespace fractalvec {

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

// Cell address of a vertex: word of cell indices plus the local boundary index.
struct Address {
  std::vector<int> word;
  int local = 0;
  friend auto operator<=>(const Address&, const Address&) = default;
};

std::string format_address(const Address& a, int cell_count) {
  std::string s;
  for (std::size_t i = 0; i < a.word.size(); ++i) {
    if (cell_count > 10 && i > 0) s += '-';
    s += std::to_string(a.word[i]);
  }
  s += '.';
  s += std::to_string(a.local);
  return s;
}

}  // namespace

int FractalSpec::level_one_vertex_count() const {
  int max_class = -1;
  for (const auto& row : vertex_identification)
    for (int c : row) max_class = std::max(max_class, c);
  return max_class + 1;
}

void FractalSpec::validate() const {
  const std::string who = "fractal spec '" + name + "': ";
  if (cell_count < 1) throw ConstructionError(who + "cell_count must be positive");
  if (boundary_size < 2) throw ConstructionError(who + "boundary_size must be at least 2");
  if (static_cast<int>(vertex_identification.size()) != cell_count)
    throw ConstructionError(who + "vertex_identification needs one row per cell");

  const int classes = level_one_vertex_count();
  std::vector<int> seen(static_cast<std::size_t>(std::max(classes, 0)), 0);
  for (int i = 0; i < cell_count; ++i) {
    const auto& row = vertex_identification[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != boundary_size)
      throw ConstructionError(who + "cell " + std::to_string(i) + " must list " + std::to_string(boundary_size) +
                              " boundary vertices");
    std::set<int> distinct(row.begin(), row.end());
    if (static_cast<int>(distinct.size()) != boundary_size)
      throw ConstructionError(who + "cell " + std::to_string(i) + " repeats a vertex class");
    for (int k = 0; k < boundary_size; ++k) {
      const int c = row[static_cast<std::size_t>(k)];
      if (c < 0) throw ConstructionError(who + "negative vertex class");
      ++seen[static_cast<std::size_t>(c)];
      if (c < boundary_size && c != k)
        throw ConstructionError(who + "boundary class " + std::to_string(c) + " must be local vertex " +
                                std::to_string(c) + " of its cell (found in cell " + std::to_string(i) +
                                " at local vertex " + std::to_string(k) + ")");
    }
  }
  for (int c = 0; c < classes; ++c) {
    if (seen[static_cast<std::size_t>(c)] == 0)
      throw ConstructionError(who + "vertex classes must be contiguous; class " + std::to_string(c) + " unused");
    if (c < boundary_size && seen[static_cast<std::size_t>(c)] != 1)
      throw ConstructionError(who + "boundary class " + std::to_string(c) + " must belong to exactly one cell");
  }

  // Level-1 connectivity: cells sharing a class are adjacent.
  UnionFind cells(cell_count);
  std::vector<int> owner(static_cast<std::size_t>(classes), -1);
  for (int i = 0; i < cell_count; ++i)
    for (int c : vertex_identification[static_cast<std::size_t>(i)]) {
      auto& o = owner[static_cast<std::size_t>(c)];
      if (o < 0)
        o = i;
      else
        cells.unite(o, i);
    }
  for (int i = 1; i < cell_count; ++i)
    if (cells.find(i) != cells.find(0))
      throw ConstructionError(who + "vertex identification disconnects cells 0 and " + std::to_string(i));

  if (conductance_renormalization.num() <= 0)
    throw ConstructionError(who + "conductance_renormalization must be positive");
  if (static_cast<int>(measure_weights.size()) != cell_count)
    throw ConstructionError(who + "measure_weights needs one weight per cell");
  Rational total(0);
  for (const auto& w : measure_weights) {
    if (w.num() <= 0) throw ConstructionError(who + "measure weights must be positive");
    total = total + w;
  }
  if (!(total == Rational(1))) throw ConstructionError(who + "measure weights sum to " + total.str() + ", not 1");

  if (embedding) {
    if (static_cast<int>(embedding->boundary_points.size()) != boundary_size ||
        static_cast<int>(embedding->shifts.size()) != cell_count)
      throw ConstructionError(who + "embedding needs one point per boundary vertex and one shift per cell");
    if (!(embedding->ratio > 0.0 && embedding->ratio < 1.0))
      throw ConstructionError(who + "embedding ratio must lie in (0, 1)");
  }
}

FractalSpec FractalSpec::interval() {
  FractalSpec s;
  s.name = "interval";
  s.cell_count = 2;
  s.boundary_size = 2;
  s.vertex_identification = {{0, 2}, {2, 1}};
  s.conductance_renormalization = Rational(2);
  s.measure_weights = {Rational(1, 2), Rational(1, 2)};
  s.embedding = Embedding{{Point{0.0, 0.0}, Point{1.0, 0.0}}, 0.5, {Point{0.0, 0.0}, Point{0.5, 0.0}}};
  return s;
}

FractalSpec FractalSpec::sierpinski_gasket() {
  FractalSpec s;
  s.name = "gasket";
  s.cell_count = 3;
  s.boundary_size = 3;
  // Level-1 classes: 0,1,2 corners; 3 = mid(p0,p1), 4 = mid(p0,p2), 5 = mid(p1,p2).
  s.vertex_identification = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  s.conductance_renormalization = Rational(5, 3);
  s.measure_weights = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  const double h = std::sqrt(3.0) / 2.0;
  s.embedding = Embedding{{Point{0.0, 0.0}, Point{1.0, 0.0}, Point{0.5, h}},
                          0.5,
                          {Point{0.0, 0.0}, Point{0.5, 0.0}, Point{0.25, h / 2.0}}};
  return s;
}

FractalSpec FractalSpec::builtin(const std::string& name) {
  if (name == "interval") return interval();
  if (name == "gasket" || name == "sierpinski_gasket") return sierpinski_gasket();
  throw PreconditionError("unknown built-in fractal '" + name + "' (expected interval or gasket)");
}

LevelGraph::LevelGraph(int vertex_count, std::vector<Edge> edges, std::vector<double> conductance,
                       std::vector<int> boundary, GraphMetadata metadata)
    : vertex_count_(vertex_count),
      edges_(std::move(edges)),
      conductance_(std::move(conductance)),
      boundary_(std::move(boundary)),
      metadata_(std::move(metadata)) {
  if (vertex_count_ < 1) throw ConstructionError("graph needs at least one vertex");
  if (conductance_.size() != edges_.size()) throw ConstructionError("one conductance per edge required");
  std::set<std::pair<int, int>> unique;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& [s, d] = edges_[e];
    if (s < 0 || d >= vertex_count_ || s >= d)
      throw ConstructionError("edge (" + std::to_string(s) + "," + std::to_string(d) +
                              ") is not in canonical orientation src < dst within range");
    if (!unique.emplace(s, d).second)
      throw ConstructionError("edge (" + std::to_string(s) + "," + std::to_string(d) + ") stored twice");
    if (!(conductance_[e] > 0.0) || !std::isfinite(conductance_[e]))
      throw ConstructionError("conductance of edge (" + std::to_string(s) + "," + std::to_string(d) +
                              ") must be positive and finite");
  }
  boundary_flag_.assign(static_cast<std::size_t>(vertex_count_), false);
  for (int b : boundary_) {
    if (b < 0 || b >= vertex_count_) throw ConstructionError("boundary vertex out of range");
    if (boundary_flag_[static_cast<std::size_t>(b)]) throw ConstructionError("boundary vertex listed twice");
    boundary_flag_[static_cast<std::size_t>(b)] = true;
  }
  const auto v = static_cast<std::size_t>(vertex_count_);
  if (!metadata_.addresses.empty() && metadata_.addresses.size() != v)
    throw ConstructionError("address list does not match vertex count");
  if (!metadata_.coordinates.empty() && metadata_.coordinates.size() != v)
    throw ConstructionError("coordinate list does not match vertex count");
  for (const auto& cell : metadata_.cells)
    for (int x : cell.vertices)
      if (x < 0 || x >= vertex_count_) throw ConstructionError("cell vertex out of range");

  adjacency_.resize(v);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& [s, d] = edges_[e];
    adjacency_[static_cast<std::size_t>(s)].push_back({d, static_cast<int>(e), +1});
    adjacency_[static_cast<std::size_t>(d)].push_back({s, static_cast<int>(e), -1});
  }
}

bool LevelGraph::is_connected() const {
  std::vector<bool> seen(static_cast<std::size_t>(vertex_count_), false);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = true;
  int reached = 1;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop();
    for (const auto& inc : neighbors(x))
      if (!seen[static_cast<std::size_t>(inc.neighbor)]) {
        seen[static_cast<std::size_t>(inc.neighbor)] = true;
        ++reached;
        queue.push(inc.neighbor);
      }
  }
  return reached == vertex_count_;
}

int LevelGraph::find_edge(int x, int y) const {
  for (const auto& inc : neighbors(x))
    if (inc.neighbor == y) return inc.edge;
  return -1;
}

GraphRef build_level(const FractalSpec& spec, int n) {
  spec.validate();
  if (n < 0) throw PreconditionError("level must be nonnegative");

  const int b = spec.boundary_size;
  const int cells_per_level = spec.cell_count;

  // Level 0: the boundary itself, one cell.
  std::vector<Address> addresses;
  std::vector<Point> coords;
  std::vector<int> boundary(static_cast<std::size_t>(b));
  std::vector<Cell> cells{Cell{{}, 1.0}};
  for (int k = 0; k < b; ++k) {
    addresses.push_back(Address{{}, k});
    boundary[static_cast<std::size_t>(k)] = k;
    cells[0].vertices.push_back(k);
    if (spec.embedding) coords.push_back(spec.embedding->boundary_points[static_cast<std::size_t>(k)]);
  }

  for (int level = 1; level <= n; ++level) {
    const int prev = static_cast<int>(addresses.size());
    UnionFind uf(cells_per_level * prev);
    for (int i = 0; i < cells_per_level; ++i)
      for (int k = 0; k < b; ++k)
        for (int j = i; j < cells_per_level; ++j)
          for (int l = 0; l < b; ++l) {
            const auto& id = spec.vertex_identification;
            if ((j > i || l > k) && id[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] ==
                                        id[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)])
              uf.unite(i * prev + boundary[static_cast<std::size_t>(k)], j * prev + boundary[static_cast<std::size_t>(l)]);
          }

    // Canonical address per class: the least over its members.
    std::map<int, Address> least;
    std::map<int, Point> where;
    for (int i = 0; i < cells_per_level; ++i)
      for (int v = 0; v < prev; ++v) {
        Address a = addresses[static_cast<std::size_t>(v)];
        a.word.insert(a.word.begin(), i);
        const int root = uf.find(i * prev + v);
        auto it = least.find(root);
        if (it == least.end() || a < it->second) {
          least[root] = a;
          if (spec.embedding) {
            const auto& z = coords[static_cast<std::size_t>(v)];
            const auto& shift = spec.embedding->shifts[static_cast<std::size_t>(i)];
            where[root] = Point{spec.embedding->ratio * z[0] + shift[0], spec.embedding->ratio * z[1] + shift[1]};
          }
        }
      }
    std::vector<std::pair<Address, int>> order;
    order.reserve(least.size());
    for (const auto& [root, a] : least) order.emplace_back(a, root);
    std::sort(order.begin(), order.end());
    std::map<int, int> new_id;
    std::vector<Address> next_addresses;
    std::vector<Point> next_coords;
    for (const auto& [a, root] : order) {
      new_id[root] = static_cast<int>(next_addresses.size());
      next_addresses.push_back(a);
      if (spec.embedding) next_coords.push_back(where[root]);
    }
    auto id_of = [&](int copy, int v) { return new_id.at(uf.find(copy * prev + v)); };

    std::vector<int> next_boundary(static_cast<std::size_t>(b));
    for (int i = 0; i < cells_per_level; ++i)
      for (int l = 0; l < b; ++l) {
        const int c = spec.vertex_identification[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
        if (c < b) next_boundary[static_cast<std::size_t>(c)] = id_of(i, boundary[static_cast<std::size_t>(l)]);
      }

    std::vector<Cell> next_cells;
    next_cells.reserve(cells.size() * static_cast<std::size_t>(cells_per_level));
    for (int i = 0; i < cells_per_level; ++i) {
      const double w = spec.measure_weights[static_cast<std::size_t>(i)].to_double();
      for (const auto& cell : cells) {
        Cell c{{}, cell.mass * w};
        for (int v : cell.vertices) c.vertices.push_back(id_of(i, v));
        next_cells.push_back(std::move(c));
      }
    }
    addresses = std::move(next_addresses);
    coords = std::move(next_coords);
    boundary = std::move(next_boundary);
    cells = std::move(next_cells);
  }

  const double c = spec.conductance_renormalization.pow_to_double(n);
  std::map<std::pair<int, int>, double> merged;
  for (const auto& cell : cells)
    for (std::size_t p = 0; p < cell.vertices.size(); ++p)
      for (std::size_t q = p + 1; q < cell.vertices.size(); ++q) {
        const int x = std::min(cell.vertices[p], cell.vertices[q]);
        const int y = std::max(cell.vertices[p], cell.vertices[q]);
        merged[{x, y}] += c;
      }
  std::vector<Edge> edges;
  std::vector<double> conductance;
  for (const auto& [key, value] : merged) {
    edges.push_back(Edge{key.first, key.second});
    conductance.push_back(value);
  }

  GraphMetadata meta;
  meta.level = n;
  meta.spec_name = spec.name;
  for (const auto& a : addresses) meta.addresses.push_back(format_address(a, spec.cell_count));
  meta.coordinates = std::move(coords);
  meta.cells = std::move(cells);
  const int vertex_count = static_cast<int>(addresses.size());
  return std::make_shared<const LevelGraph>(vertex_count, std::move(edges), std::move(conductance),
                                            std::move(boundary), std::move(meta));
}

int cycle_rank(const LevelGraph& graph) {
  if (!graph.is_connected()) throw PreconditionError("cycle_rank: graph is disconnected");
  return graph.edge_count() - graph.vertex_count() + 1;
}

GraphRef permute_vertices(const LevelGraph& graph, const std::vector<int>& permutation) {
  const int n = graph.vertex_count();
  if (static_cast<int>(permutation.size()) != n) throw PreconditionError("permutation size mismatch");
  std::vector<bool> hit(static_cast<std::size_t>(n), false);
  for (int p : permutation) {
    if (p < 0 || p >= n || hit[static_cast<std::size_t>(p)]) throw PreconditionError("not a permutation");
    hit[static_cast<std::size_t>(p)] = true;
  }
  auto image = [&](int v) { return permutation[static_cast<std::size_t>(v)]; };

  std::vector<std::pair<Edge, double>> edges;
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [s, d] = graph.edges()[static_cast<std::size_t>(e)];
    edges.push_back({Edge{std::min(image(s), image(d)), std::max(image(s), image(d))},
                     graph.conductance()[static_cast<std::size_t>(e)]});
  }
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    return std::pair(a.first.src, a.first.dst) < std::pair(b.first.src, b.first.dst);
  });
  std::vector<Edge> out_edges;
  std::vector<double> out_c;
  for (const auto& [e, c] : edges) {
    out_edges.push_back(e);
    out_c.push_back(c);
  }
  std::vector<int> boundary;
  for (int b : graph.boundary()) boundary.push_back(image(b));

  GraphMetadata meta;
  meta.level = graph.level();
  meta.spec_name = graph.spec_name();
  if (!graph.addresses().empty()) {
    meta.addresses.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) meta.addresses[static_cast<std::size_t>(image(v))] = graph.addresses()[static_cast<std::size_t>(v)];
  }
  if (graph.has_coordinates()) {
    meta.coordinates.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
      meta.coordinates[static_cast<std::size_t>(image(v))] = graph.coordinates()[static_cast<std::size_t>(v)];
  }
  for (const auto& cell : graph.cells()) {
    Cell c{{}, cell.mass};
    for (int v : cell.vertices) c.vertices.push_back(image(v));
    meta.cells.push_back(std::move(c));
  }
  return std::make_shared<const LevelGraph>(n, std::move(out_edges), std::move(out_c), std::move(boundary),
                                            std::move(meta));
}

}  // namespace fractalvec
