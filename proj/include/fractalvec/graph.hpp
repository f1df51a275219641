#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fractalvec/rational.hpp"

namespace fractalvec {

using Point = std::array<double, 2>;

/// Similitudes F_i(x) = ratio * x + shifts[i] used only to place vertices in the plane.
struct Embedding {
  std::vector<Point> boundary_points;
  double ratio = 0.5;
  std::vector<Point> shifts;
};

/// Declarative self-similar cell structure.
///
/// `vertex_identification[i][k]` is the level-1 vertex class of the k-th boundary
/// vertex of cell i. Classes 0..boundary_size-1 are the boundary of the whole
/// set: class k must occur exactly once, as the local vertex k of the cell that
/// fixes it. The level-0 graph is the complete graph on the boundary with unit
/// conductances; every level-n cell is a copy of it carrying conductance r_c^n.
struct FractalSpec {
  std::string name;
  int cell_count = 0;
  int boundary_size = 0;
  std::vector<std::vector<int>> vertex_identification;
  Rational conductance_renormalization{1};
  std::vector<Rational> measure_weights;
  std::optional<Embedding> embedding;

  /// Throws ConstructionError describing the first violated invariant.
  void validate() const;

  /// Number of distinct level-1 vertex classes.
  int level_one_vertex_count() const;

  static FractalSpec interval();
  static FractalSpec sierpinski_gasket();
  /// "interval" or "gasket" (alias "sierpinski_gasket").
  static FractalSpec builtin(const std::string& name);
};

/// Undirected edge stored once, canonical orientation src < dst.
struct Edge {
  int src = 0;
  int dst = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One level-n cell: its boundary vertices (in local order) and its mass under the
/// self-similar measure (product of cell weights along the address).
struct Cell {
  std::vector<int> vertices;
  double mass = 0.0;
};

/// Neighbor record in the adjacency list. `sign` is +1 when the vertex owning the
/// list is the edge's src, so v(x,y) = sign * v[edge].
struct Incidence {
  int neighbor = 0;
  int edge = 0;
  int sign = 1;
};

/// Optional descriptive data carried along with a graph.
struct GraphMetadata {
  int level = 0;
  std::string spec_name;
  std::vector<std::string> addresses;
  std::vector<Point> coordinates;
  std::vector<Cell> cells;
};

/// Finite weighted graph with boundary. Immutable after construction.
class LevelGraph {
 public:
  /// Validates canonical orientation, uniqueness of edges, positive finite
  /// conductances and the boundary index set. Connectivity is not required here;
  /// operations that need it check `is_connected()`.
  LevelGraph(int vertex_count, std::vector<Edge> edges, std::vector<double> conductance,
             std::vector<int> boundary, GraphMetadata metadata = {});

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& conductance() const { return conductance_; }
  const std::vector<int>& boundary() const { return boundary_; }
  bool is_boundary(int v) const { return boundary_flag_[static_cast<std::size_t>(v)]; }
  const std::vector<Incidence>& neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }

  int level() const { return metadata_.level; }
  const std::string& spec_name() const { return metadata_.spec_name; }
  const std::vector<std::string>& addresses() const { return metadata_.addresses; }
  const std::vector<Point>& coordinates() const { return metadata_.coordinates; }
  bool has_coordinates() const { return !metadata_.coordinates.empty(); }
  const std::vector<Cell>& cells() const { return metadata_.cells; }

  bool is_connected() const;
  /// Index of the edge joining x and y in either order, or -1.
  int find_edge(int x, int y) const;

 private:
  int vertex_count_;
  std::vector<Edge> edges_;
  std::vector<double> conductance_;
  std::vector<int> boundary_;
  std::vector<bool> boundary_flag_;
  std::vector<std::vector<Incidence>> adjacency_;
  GraphMetadata metadata_;
};

using GraphRef = std::shared_ptr<const LevelGraph>;

/// Level-n approximation; vertices ordered by canonical (lexicographically least) cell address.
GraphRef build_level(const FractalSpec& spec, int n);

/// |E| - |V| + 1; throws PreconditionError for a disconnected graph.
int cycle_rank(const LevelGraph& graph);

/// Relabels vertices: vertex v of `graph` becomes `permutation[v]`. Edges are
/// re-canonicalized; cells and coordinates follow their vertices.
GraphRef permute_vertices(const LevelGraph& graph, const std::vector<int>& permutation);

}  // namespace fractalvec
