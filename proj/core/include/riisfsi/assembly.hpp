#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace riisfsi {

/// Where a local element unknown lands in the global system.
///
/// index < 0: the unknown is prescribed; its row and column are dropped.
/// Otherwise the local residual row is added to global row `index`, and the
/// local Jacobian column is multiplied by `scale` before being added to global
/// column `index`. A scale other than 1 expresses an unknown eliminated in
/// favor of another one through an affine relation (chain rule).
struct DofRef {
  int index = -1;
  double scale = 1.0;
};

/// Numbering of (field, node, component) triples. Entries are free until
/// constrained or linked; finalize() numbers free entries field by field.
class DofMap {
 public:
  int add_field(std::string name, int num_nodes, int components);
  void constrain(int field, int node, int component);
  /// Ties the entry to the global unknown of another (free) entry with a column scale.
  void link(int field, int node, int component, int target_field, int target_node,
            int target_component, double scale);
  void finalize();

  DofRef operator()(int field, int node, int component) const;
  bool is_free(int field, int node, int component) const;
  int num_dofs() const { return num_dofs_; }
  int field_id(const std::string& name) const;

 private:
  struct Field {
    std::string name;
    int num_nodes;
    int components;
    std::vector<int> state;  // -1 free, -2 constrained, -3 linked
    std::vector<DofRef> ref;
    std::vector<std::array<int, 3>> link_target;
  };
  std::size_t slot(int field, int node, int component) const;

  std::vector<Field> fields_;
  int num_dofs_ = 0;
  bool finalized_ = false;
};

/// Global Jacobian and right-hand side. For a residual R, `rhs` holds -R so
/// that solving matrix * dx = rhs yields the Newton increment.
struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;

  int size() const { return static_cast<int>(rhs.size()); }
};

/// Element residual and Jacobian, sized to the element's DofRef list.
struct LocalSystem {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;

  void reset(int n) {
    residual.setZero(n);
    jacobian.setZero(n, n);
  }
};

/// Fills the local residual (and Jacobian) of element `index` of its group.
using LocalKernel = std::function<void(int index, LocalSystem& local)>;

/// A set of elements sharing one kernel: their DOF lists in element order.
struct ElementGroup {
  std::string name;
  std::vector<std::vector<DofRef>> dofs;
};

/// Fixed sparsity of a collection of element groups, with precomputed scatter
/// offsets. Assembly visits groups and elements in order, so the summation
/// order of every global entry is fixed and results are bitwise reproducible.
class Assembler {
 public:
  Assembler(int num_dofs, std::vector<ElementGroup> groups);

  int num_dofs() const { return num_dofs_; }
  const std::vector<ElementGroup>& groups() const { return groups_; }

  /// One kernel per group. Non-finite local entries raise AssemblyError with
  /// the element index.
  SparseSystem assemble(std::span<const LocalKernel> kernels, bool with_jacobian = true) const;

  /// Assemble into an existing system, reusing its storage.
  void assemble_into(std::span<const LocalKernel> kernels, SparseSystem& system,
                     bool with_jacobian = true) const;

  /// Wall time spent per group since construction or the last reset.
  const std::vector<double>& group_seconds() const { return group_seconds_; }
  void reset_timers() const { std::fill(group_seconds_.begin(), group_seconds_.end(), 0.0); }

 private:
  int num_dofs_;
  std::vector<ElementGroup> groups_;
  Eigen::SparseMatrix<double> pattern_;
  std::vector<std::vector<std::vector<int>>> offsets_;  // group -> element -> n*n slots
  mutable std::vector<double> group_seconds_;
};

}  // namespace riisfsi
