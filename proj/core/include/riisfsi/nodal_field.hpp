#pragma once

#include <Eigen/Core>

namespace riisfsi {

/// Per-node values of a scalar (1 component) or vector (dim components) field.
/// Row i holds the value at node i.
struct NodalField {
  Eigen::MatrixXd values;

  NodalField() = default;
  NodalField(int num_nodes, int components) : values(Eigen::MatrixXd::Zero(num_nodes, components)) {}
  explicit NodalField(Eigen::MatrixXd v) : values(std::move(v)) {}

  static NodalField zeros(int num_nodes, int components) { return NodalField(num_nodes, components); }

  int num_nodes() const { return static_cast<int>(values.rows()); }
  int components() const { return static_cast<int>(values.cols()); }
  double& operator()(int node, int comp) { return values(node, comp); }
  double operator()(int node, int comp) const { return values(node, comp); }
  bool all_finite() const { return values.allFinite(); }
};

}  // namespace riisfsi
