#include "riisfsi/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "riisfsi/errors.hpp"

namespace riisfsi {

namespace {
constexpr int kFree = -1;
constexpr int kConstrained = -2;
constexpr int kLinked = -3;
}  // namespace

int DofMap::add_field(std::string name, int num_nodes, int components) {
  if (finalized_) throw ParameterError("DofMap: add_field after finalize");
  Field f;
  f.name = std::move(name);
  f.num_nodes = num_nodes;
  f.components = components;
  const auto n = static_cast<std::size_t>(num_nodes) * static_cast<std::size_t>(components);
  f.state.assign(n, kFree);
  f.ref.assign(n, DofRef{});
  f.link_target.assign(n, {0, 0, 0});
  fields_.push_back(std::move(f));
  return static_cast<int>(fields_.size()) - 1;
}

std::size_t DofMap::slot(int field, int node, int component) const {
  const auto& f = fields_.at(static_cast<std::size_t>(field));
  if (node < 0 || node >= f.num_nodes || component < 0 || component >= f.components)
    throw ShapeError("DofMap: entry out of range in field '" + f.name + "'");
  return static_cast<std::size_t>(node) * static_cast<std::size_t>(f.components) +
         static_cast<std::size_t>(component);
}

void DofMap::constrain(int field, int node, int component) {
  fields_[static_cast<std::size_t>(field)].state[slot(field, node, component)] = kConstrained;
}

void DofMap::link(int field, int node, int component, int target_field, int target_node,
                  int target_component, double scale) {
  const auto s = slot(field, node, component);
  auto& f = fields_[static_cast<std::size_t>(field)];
  f.state[s] = kLinked;
  f.ref[s].scale = scale;
  f.link_target[s] = {target_field, target_node, target_component};
}

void DofMap::finalize() {
  int next = 0;
  for (auto& f : fields_)
    for (std::size_t s = 0; s < f.state.size(); ++s)
      if (f.state[s] == kFree) f.ref[s] = DofRef{next++, 1.0};
  for (auto& f : fields_)
    for (std::size_t s = 0; s < f.state.size(); ++s) {
      if (f.state[s] == kConstrained) {
        f.ref[s] = DofRef{};
      } else if (f.state[s] == kLinked) {
        const auto& t = f.link_target[s];
        const auto& tf = fields_[static_cast<std::size_t>(t[0])];
        const auto ts = slot(t[0], t[1], t[2]);
        f.ref[s].index = (tf.state[ts] == kFree) ? tf.ref[ts].index : -1;
      }
    }
  num_dofs_ = next;
  finalized_ = true;
}

DofRef DofMap::operator()(int field, int node, int component) const {
  if (!finalized_) throw ParameterError("DofMap: query before finalize");
  return fields_[static_cast<std::size_t>(field)].ref[slot(field, node, component)];
}

bool DofMap::is_free(int field, int node, int component) const {
  return fields_[static_cast<std::size_t>(field)].state[slot(field, node, component)] == kFree;
}

int DofMap::field_id(const std::string& name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i)
    if (fields_[i].name == name) return static_cast<int>(i);
  throw ParameterError("DofMap: unknown field '" + name + "'");
}

Assembler::Assembler(int num_dofs, std::vector<ElementGroup> groups)
    : num_dofs_(num_dofs), groups_(std::move(groups)) {
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& g : groups_)
    for (const auto& dofs : g.dofs)
      for (const auto& r : dofs) {
        if (r.index < 0) continue;
        if (r.index >= num_dofs_) throw ShapeError("Assembler: DOF index out of range");
        for (const auto& c : dofs)
          if (c.index >= 0) trips.emplace_back(r.index, c.index, 0.0);
      }
  // Every diagonal is present so that dropped couplings never leave an empty column.
  for (int i = 0; i < num_dofs_; ++i) trips.emplace_back(i, i, 0.0);
  pattern_.resize(num_dofs_, num_dofs_);
  pattern_.setFromTriplets(trips.begin(), trips.end());
  pattern_.makeCompressed();

  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  auto find = [&](int row, int col) {
    const int* begin = inner + outer[col];
    const int* end = inner + outer[col + 1];
    const int* it = std::lower_bound(begin, end, row);
    return static_cast<int>(it - inner);
  };

  group_seconds_.assign(groups_.size(), 0.0);
  offsets_.resize(groups_.size());
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const auto& g = groups_[gi];
    offsets_[gi].resize(g.dofs.size());
    for (std::size_t e = 0; e < g.dofs.size(); ++e) {
      const auto& dofs = g.dofs[e];
      const int n = static_cast<int>(dofs.size());
      auto& off = offsets_[gi][e];
      off.assign(static_cast<std::size_t>(n * n), -1);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          if (dofs[i].index >= 0 && dofs[j].index >= 0)
            off[static_cast<std::size_t>(i + j * n)] = find(dofs[i].index, dofs[j].index);
    }
  }
}

SparseSystem Assembler::assemble(std::span<const LocalKernel> kernels, bool with_jacobian) const {
  SparseSystem system;
  assemble_into(kernels, system, with_jacobian);
  return system;
}

void Assembler::assemble_into(std::span<const LocalKernel> kernels, SparseSystem& system,
                              bool with_jacobian) const {
  if (kernels.size() != groups_.size())
    throw ParameterError("Assembler: expected one kernel per element group");
  if (system.matrix.rows() != num_dofs_ || system.matrix.nonZeros() != pattern_.nonZeros())
    system.matrix = pattern_;
  std::fill(system.matrix.valuePtr(), system.matrix.valuePtr() + system.matrix.nonZeros(), 0.0);
  system.rhs.setZero(num_dofs_);
  double* values = system.matrix.valuePtr();

  LocalSystem local;
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const auto& g = groups_[gi];
    if (!kernels[gi]) continue;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t e = 0; e < g.dofs.size(); ++e) {
      const auto& dofs = g.dofs[e];
      const int n = static_cast<int>(dofs.size());
      local.reset(n);
      kernels[gi](static_cast<int>(e), local);
      if (!local.residual.allFinite() || (with_jacobian && !local.jacobian.allFinite()))
        throw AssemblyError(static_cast<int>(e), "non-finite local entry in group '" + g.name + "'");
      for (int i = 0; i < n; ++i)
        if (dofs[i].index >= 0) system.rhs(dofs[i].index) -= local.residual(i);
      if (!with_jacobian) continue;
      const auto& off = offsets_[gi][e];
      for (int j = 0; j < n; ++j) {
        if (dofs[j].index < 0) continue;
        const double s = dofs[j].scale;
        for (int i = 0; i < n; ++i) {
          const int o = off[static_cast<std::size_t>(i + j * n)];
          if (o >= 0) values[o] += local.jacobian(i, j) * s;
        }
      }
    }
    group_seconds_[gi] +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
}

}  // namespace riisfsi
