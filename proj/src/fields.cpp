#include "fractalvec/fields.hpp"

#include <cmath>

namespace fractalvec {

void require_same_graph(const GraphRef& a, const GraphRef& b, const char* operation) {
  if (a != b) throw PreconditionError(std::string(operation) + ": arguments live on different graphs");
}

MeasureWeights::MeasureWeights(GraphRef graph, Eigen::VectorXd values, Kind kind)
    : graph_(std::move(graph)), values_(std::move(values)), kind_(kind) {
  if (!graph_) throw PreconditionError("measure constructed without a graph");
  if (values_.size() != graph_->vertex_count())
    throw PreconditionError("measure has " + std::to_string(values_.size()) + " weights, graph has " +
                            std::to_string(graph_->vertex_count()) + " vertices");
  if (!values_.allFinite()) throw PreconditionError("measure has non-finite weights");
  if (kind_ == Kind::reference && values_.size() > 0 && !(values_.minCoeff() > 0.0))
    throw PreconditionError("reference measure must charge every vertex positively");
  total_ = values_.sum();
  signed_ = values_.size() > 0 && values_.minCoeff() < 0.0;
}

MeasureWeights MeasureWeights::counting(GraphRef graph) {
  const auto n = graph->vertex_count();
  return MeasureWeights(std::move(graph), Eigen::VectorXd::Ones(n));
}

void MeasureWeights::require_positive(const char* operation) const {
  if (!(values_.minCoeff() > 0.0))
    throw PreconditionError(std::string(operation) + ": measure weights must be strictly positive");
}

MeasureWeights MeasureWeights::scaled(double t) const { return MeasureWeights(graph_, values_ * t, kind_); }

double l2_inner(const MeasureWeights& m, const ScalarField& f, const ScalarField& g) {
  require_same_graph(m.graph(), f.graph(), "l2_inner");
  require_same_graph(f.graph(), g.graph(), "l2_inner");
  return (m.values().array() * f.values().array() * g.values().array()).sum();
}

std::complex<double> l2_inner(const MeasureWeights& m, const ComplexScalarField& f, const ComplexScalarField& g) {
  require_same_graph(m.graph(), f.graph(), "l2_inner");
  require_same_graph(f.graph(), g.graph(), "l2_inner");
  return (m.values().cast<std::complex<double>>().array() * f.values().array() * g.values().conjugate().array()).sum();
}

double l2_norm(const MeasureWeights& m, const ScalarField& f) { return std::sqrt(l2_inner(m, f, f)); }

double weighted_mean(const MeasureWeights& m, const ScalarField& f) {
  require_same_graph(m.graph(), f.graph(), "weighted_mean");
  return m.values().dot(f.values()) / m.total();
}

ScalarField mean_zero(const MeasureWeights& m, const ScalarField& f) {
  ScalarField out = f;
  out.values().array() -= weighted_mean(m, f);
  return out;
}

MeasureWeights self_similar_measure(const GraphRef& graph) {
  if (graph->cells().empty()) throw PreconditionError("self_similar_measure: graph carries no cell data");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(graph->vertex_count());
  for (const auto& cell : graph->cells()) {
    const double share = cell.mass / static_cast<double>(cell.vertices.size());
    for (int v : cell.vertices) w[v] += share;
  }
  return MeasureWeights(graph, std::move(w));
}

ScalarField operator*(const ScalarField& f, const ScalarField& g) {
  require_same_graph(f.graph(), g.graph(), "pointwise product");
  return ScalarField(f.graph(), f.values().cwiseProduct(g.values()));
}

}  // namespace fractalvec
