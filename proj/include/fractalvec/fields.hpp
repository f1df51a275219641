#pragma once

#include <complex>
#include <utility>

#include <Eigen/Core>

#include "fractalvec/errors.hpp"
#include "fractalvec/graph.hpp"

namespace fractalvec {

/// Throws PreconditionError when two objects live on different graphs.
void require_same_graph(const GraphRef& a, const GraphRef& b, const char* operation);

struct OnVertices {
  static Eigen::Index size(const LevelGraph& g) { return g.vertex_count(); }
  static constexpr const char* name = "vertex";
};

struct OnEdges {
  static Eigen::Index size(const LevelGraph& g) { return g.edge_count(); }
  static constexpr const char* name = "edge";
};

/// Values indexed by the vertices or canonical edges of one graph.
template <class Domain, class T>
class Field {
 public:
  using Scalar = T;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  Field(GraphRef graph, Vector values) : graph_(std::move(graph)), values_(std::move(values)) {
    if (!graph_) throw PreconditionError("field constructed without a graph");
    if (values_.size() != Domain::size(*graph_))
      throw PreconditionError(std::string(Domain::name) + " field has " + std::to_string(values_.size()) +
                              " values, graph needs " + std::to_string(Domain::size(*graph_)));
    if (!values_.allFinite()) throw PreconditionError(std::string(Domain::name) + " field has non-finite values");
  }

  static Field zero(GraphRef graph) {
    const auto n = Domain::size(*graph);
    return Field(std::move(graph), Vector::Zero(n));
  }
  static Field constant(GraphRef graph, T value) {
    const auto n = Domain::size(*graph);
    return Field(std::move(graph), Vector::Constant(n, value));
  }

  const GraphRef& graph() const { return graph_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }

  T operator[](Eigen::Index i) const { return values_[i]; }
  T& operator[](Eigen::Index i) { return values_[i]; }

  Field& operator+=(const Field& o) {
    require_same_graph(graph_, o.graph_, "field +");
    values_ += o.values_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_graph(graph_, o.graph_, "field -");
    values_ -= o.values_;
    return *this;
  }
  Field& operator*=(T s) {
    values_ *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, T s) { return a *= s; }
  friend Field operator*(T s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= T(-1); }

 private:
  GraphRef graph_;
  Vector values_;
};

using ScalarField = Field<OnVertices, double>;
using OneForm = Field<OnEdges, double>;
using ComplexScalarField = Field<OnVertices, std::complex<double>>;
using ComplexOneForm = Field<OnEdges, std::complex<double>>;

/// Vertex weights representing a measure. Reference measures are strictly
/// positive; energy measures may be signed.
class MeasureWeights {
 public:
  enum class Kind { reference, energy };

  MeasureWeights(GraphRef graph, Eigen::VectorXd values, Kind kind = Kind::reference);

  static MeasureWeights counting(GraphRef graph);

  const GraphRef& graph() const { return graph_; }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](Eigen::Index i) const { return values_[i]; }
  double total() const { return total_; }
  Kind kind() const { return kind_; }
  /// True when some weight is negative (only possible for energy measures).
  bool is_signed() const { return signed_; }

  /// Throws PreconditionError unless every weight is > 0.
  void require_positive(const char* operation) const;

  MeasureWeights scaled(double t) const;

 private:
  GraphRef graph_;
  Eigen::VectorXd values_;
  double total_ = 0.0;
  Kind kind_ = Kind::reference;
  bool signed_ = false;
};

/// <f, g>_{L2(m)} = sum_x m(x) f(x) g(x).
double l2_inner(const MeasureWeights& m, const ScalarField& f, const ScalarField& g);
/// Hermitian, linear in the first argument.
std::complex<double> l2_inner(const MeasureWeights& m, const ComplexScalarField& f, const ComplexScalarField& g);
double l2_norm(const MeasureWeights& m, const ScalarField& f);
/// f minus its m-weighted mean.
ScalarField mean_zero(const MeasureWeights& m, const ScalarField& f);
double weighted_mean(const MeasureWeights& m, const ScalarField& f);

/// Vertex weight = sum over incident level-n cells of cell mass / |cell boundary|.
/// Requires cell data (graphs from build_level). Total mass 1.
MeasureWeights self_similar_measure(const GraphRef& graph);

/// Pointwise product.
ScalarField operator*(const ScalarField& f, const ScalarField& g);

}  // namespace fractalvec
