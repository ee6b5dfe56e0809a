#include "riisfsi/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/SparseCore>

#include "riisfsi/errors.hpp"
#include "riisfsi/kinematics.hpp"
#include "riisfsi/quadrature.hpp"

namespace riisfsi {

void check_params(const FluidParams& params) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(params.density)) throw ParameterError("fluid density must be positive");
  if (!positive(params.viscosity)) throw ParameterError("fluid viscosity must be positive");
  if (!positive(params.stabilization))
    throw ParameterError("fluid stabilization coefficient must be positive");
}

std::vector<std::pair<Facet, int>> boundary_facet_owners(const Mesh& mesh) {
  std::map<Facet, std::pair<int, int>> count;  // facet -> (owner, multiplicity)
  const int n = mesh.nodes_per_cell();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int skip = 0; skip < n; ++skip) {
      Facet f{-1, -1, -1};
      int k = 0;
      for (int a = 0; a < n; ++a)
        if (a != skip) f[k++] = mesh.cells(c, a);
      std::sort(f.begin(), f.begin() + k);
      auto& entry = count.try_emplace(f, c, 0).first->second;
      ++entry.second;
    }
  }
  std::vector<std::pair<Facet, int>> out;
  for (const auto& [f, e] : count)
    if (e.second == 1) out.emplace_back(f, e.first);
  return out;
}

// ---------------------------------------------------------------- mesh motion

MeshMotion::MeshMotion(const MeshPair& meshes)
    : num_nodes_(meshes.fluid.num_nodes()), interface_pairs_(meshes.interface.pairs) {
  const Mesh& mesh = meshes.fluid;
  if (mesh.dim != 2) throw ParameterError("mesh motion: only 2D meshes are supported");
  std::vector<char> on_boundary(num_nodes_, 0);
  for (const auto& f : boundary_facets(mesh))
    for (int v : f)
      if (v >= 0) on_boundary[v] = 1;
  interior_index_.assign(num_nodes_, -1);
  int ni = 0;
  for (int i = 0; i < num_nodes_; ++i) {
    if (on_boundary[i])
      boundary_.push_back(i);
    else
      interior_index_[i] = ni++;
  }
  std::vector<int> boundary_index(num_nodes_, -1);
  for (std::size_t k = 0; k < boundary_.size(); ++k) boundary_index[boundary_[k]] = static_cast<int>(k);

  std::vector<Eigen::Triplet<double>> tii, tib;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Simplex<2> s = cell_simplex<2>(mesh, mesh.nodes, c);
    const Eigen::Matrix3d k = std::abs(s.measure) * s.grads * s.grads.transpose();
    for (int a = 0; a < 3; ++a) {
      const int ia = interior_index_[mesh.cells(c, a)];
      if (ia < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int node_b = mesh.cells(c, b);
        if (interior_index_[node_b] >= 0)
          tii.emplace_back(ia, interior_index_[node_b], k(a, b));
        else
          tib.emplace_back(ia, boundary_index[node_b], k(a, b));
      }
    }
  }
  Eigen::SparseMatrix<double> kii(ni, ni);
  kii.setFromTriplets(tii.begin(), tii.end());
  k_ib_.resize(ni, static_cast<Eigen::Index>(boundary_.size()));
  k_ib_.setFromTriplets(tib.begin(), tib.end());
  if (ni > 0) {
    factor_.compute(kii);
    if (factor_.info() != Eigen::Success)
      throw LinearSolveError("mesh motion: Laplacian factorization failed");
  }
}

NodalField MeshMotion::extend_boundary(const NodalField& boundary_values) const {
  if (boundary_values.num_nodes() != num_nodes_)
    throw ShapeError("mesh motion: boundary data does not match the fluid mesh");
  if (!boundary_values.all_finite()) throw ParameterError("mesh motion: boundary data not finite");
  const int dim = boundary_values.components();
  NodalField out(num_nodes_, dim);
  const auto nb = static_cast<Eigen::Index>(boundary_.size());
  for (int comp = 0; comp < dim; ++comp) {
    Eigen::VectorXd gb(nb);
    for (Eigen::Index k = 0; k < nb; ++k) gb(k) = boundary_values(boundary_[k], comp);
    for (Eigen::Index k = 0; k < nb; ++k) out(boundary_[k], comp) = gb(k);
    if (k_ib_.rows() == 0) continue;
    const Eigen::VectorXd xi = factor_.solve(-(k_ib_ * gb));
    if (factor_.info() != Eigen::Success) throw LinearSolveError("mesh motion: solve failed");
    for (int i = 0; i < num_nodes_; ++i)
      if (interior_index_[i] >= 0) out(i, comp) = xi(interior_index_[i]);
  }
  return out;
}

NodalField MeshMotion::extend(const NodalField& solid_displacement) const {
  NodalField boundary(num_nodes_, solid_displacement.components());
  for (const auto& [f, s] : interface_pairs_) {
    if (s >= solid_displacement.num_nodes())
      throw ShapeError("mesh motion: solid displacement does not match the interface map");
    boundary.values.row(f) = solid_displacement.values.row(s);
  }
  return extend_boundary(boundary);
}

NodalField solve_mesh_motion(const MeshPair& meshes, const NodalField& solid_displacement) {
  return MeshMotion(meshes).extend(solid_displacement);
}

NodalField domain_velocity(const NodalField& d_new, const NodalField& d_old, double dt) {
  if (!(dt > 0.0)) throw ParameterError("domain velocity: time step must be positive");
  if (d_new.values.rows() != d_old.values.rows() || d_new.values.cols() != d_old.values.cols())
    throw ShapeError("domain velocity: field shapes differ");
  return NodalField((d_new.values - d_old.values) / dt);
}

// ------------------------------------------------------------- fluid operator

FluidOperator::FluidOperator(const Mesh& mesh, const FluidParams& params, FluidStepInput input)
    : mesh_(&mesh), params_(params), input_(std::move(input)) {
  check_params(params_);
  if (mesh.dim != 2) throw ParameterError("fluid operator: only 2D meshes are supported");
  const int nn = mesh.num_nodes();
  if (input_.coords.rows() != nn || input_.coords.cols() != 2)
    throw ShapeError("fluid operator: coordinates do not match the mesh");
  if (input_.u_old.num_nodes() == 0) input_.u_old = NodalField(nn, 2);
  if (input_.u_ale.num_nodes() == 0) input_.u_ale = NodalField(nn, 2);
  if (input_.u_old.num_nodes() != nn || input_.u_ale.num_nodes() != nn ||
      input_.u_old.components() != 2 || input_.u_ale.components() != 2)
    throw ShapeError("fluid operator: velocity history does not match the mesh");
  if (input_.transient && !(input_.dt > 0.0))
    throw ParameterError("fluid operator: time step must be positive");
  for (const auto& v : input_.valves)
    if (v.support == nullptr ||
        v.support->cell_begin.size() != static_cast<std::size_t>(mesh.num_cells()) + 1)
      throw ShapeError("fluid operator: valve support does not match the mesh");

  const double rho = params_.density, mu = params_.viscosity, beta = params_.stabilization;
  const double rho_dt = input_.transient ? rho / input_.dt : 0.0;
  const QuadratureRule& source_rule = triangle_rule(4);

  const int nc = mesh.num_cells();
  matrices_.resize(nc);
  loads_.resize(nc);
  tau_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const Simplex<2> s = cell_simplex<2>(mesh, input_.coords, c);
    if (!(s.measure > 0.0)) throw InvertedElementError(c, s.measure / mesh.cell_volume(c));
    const double area = s.measure;
    const double h = s.diameter();
    // Cell mean of the resistive coefficient (R/eps) delta.
    double sigma = 0.0;
    for (const auto& v : input_.valves)
      for (int k = v.support->cell_begin[c]; k < v.support->cell_begin[c + 1]; ++k)
        sigma += v.coefficient * v.support->points[k].weight;
    sigma /= area;
    const double tau = beta / (mu / (h * h) + rho_dt + sigma);
    tau_[c] = tau;

    int node[3];
    for (int a = 0; a < 3; ++a) node[a] = mesh.cells(c, a);
    Eigen::Matrix3d mass;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) mass(a, b) = area * (a == b ? 2.0 : 1.0) / 12.0;

    // Advection field w = u^n - u_ALE at the nodes.
    Eigen::Matrix<double, 3, 2> w = Eigen::Matrix<double, 3, 2>::Zero();
    if (input_.convection)
      for (int a = 0; a < 3; ++a)
        w.row(a) = input_.u_old.values.row(node[a]) - input_.u_ale.values.row(node[a]);
    // conv(a, b) = int N_a (w . grad N_b) = sum_c M_ac (w_c . g_b)
    const Eigen::Matrix3d conv = mass * (w * s.grads.transpose());

    // Resistive mass-like block and its load.
    Eigen::Matrix3d riis = Eigen::Matrix3d::Zero();
    Eigen::Matrix<double, 3, 2> riis_load = Eigen::Matrix<double, 3, 2>::Zero();
    for (const auto& v : input_.valves) {
      if (v.coefficient == 0.0) continue;
      for (int k = v.support->cell_begin[c]; k < v.support->cell_begin[c + 1]; ++k) {
        const auto& pt = v.support->points[k];
        const double cw = v.coefficient * pt.weight;
        riis += cw * pt.shape * pt.shape.transpose();
        Eigen::Vector2d uale = Eigen::Vector2d::Zero();
        for (int a = 0; a < 3; ++a) uale += pt.shape(a) * input_.u_ale.values.row(node[a]).transpose();
        riis_load += cw * pt.shape * uale.transpose();
      }
    }

    LocalMatrix& K = matrices_[c];
    LocalVector& f = loads_[c];
    K.setZero();
    f.setZero();
    const Eigen::Matrix3d gg = s.grads * s.grads.transpose();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double scalar = rho_dt * mass(a, b) + rho * conv(a, b) + mu * area * gg(a, b) +
                              riis(a, b);
        for (int i = 0; i < 2; ++i) {
          K(2 * a + i, 2 * b + i) += scalar;
          for (int j = 0; j < 2; ++j)
            K(2 * a + i, 2 * b + j) += mu * area * s.grads(b, i) * s.grads(a, j);
        }
        for (int i = 0; i < 2; ++i) {
          K(2 * a + i, 6 + b) = -area / 3.0 * s.grads(a, i);  // -p div v
          K(6 + a, 2 * b + i) = -area / 3.0 * s.grads(b, i);  // -q div u
        }
        K(6 + a, 6 + b) = -tau * area * gg(a, b);
      }
      for (int i = 0; i < 2; ++i) {
        double load = riis_load(a, i);
        if (input_.transient)
          for (int b = 0; b < 3; ++b) load += rho_dt * mass(a, b) * input_.u_old(node[b], i);
        f(2 * a + i) = load;
      }
    }
    if (input_.body_force) {
      for (int q = 0; q < source_rule.size(); ++q) {
        const Eigen::Vector2d xi = source_rule.points.row(q).transpose();
        const Eigen::Vector2d x = s.map(xi);
        const Eigen::Vector3d n = Simplex<2>::shape(xi);
        const Eigen::Vector2d fb = input_.body_force(x);
        const double wq = source_rule.weights(q) * 2.0 * area;
        for (int a = 0; a < 3; ++a)
          for (int i = 0; i < 2; ++i) f(2 * a + i) += wq * n(a) * fb(i);
      }
    }
  }

  if (!input_.tractions.empty()) {
    std::map<Facet, const PressureTraction*> tagged;
    for (const auto& tf : mesh.facets)
      for (const auto& t : input_.tractions)
        if (t.tag == tf.tag) tagged[tf.nodes] = &t;
    for (const auto& [facet, owner] : boundary_facet_owners(mesh)) {
      const auto it = tagged.find(facet);
      if (it == tagged.end()) continue;
      const PressureTraction* tr = it->second;
      const Eigen::Vector2d xa = input_.coords.row(facet[0]).transpose();
      const Eigen::Vector2d xb = input_.coords.row(facet[1]).transpose();
      const Eigen::Vector2d e = xb - xa;
      Eigen::Vector2d n(e.y(), -e.x());
      n /= e.norm();
      Eigen::Vector2d centre = Eigen::Vector2d::Zero();
      for (int a = 0; a < 3; ++a) centre += input_.coords.row(mesh.cells(owner, a)).transpose() / 3.0;
      if (n.dot(0.5 * (xa + xb) - centre) < 0.0) n = -n;
      TractionFacet t;
      t.nodes[0] = facet[0];
      t.nodes[1] = facet[1];
      const Eigen::Vector2d l = tr->pressure * 0.5 * e.norm() * n;
      t.load << l, l;
      traction_facets_.push_back(t);
    }
  }
}

FluidOperator::LocalVector FluidOperator::gather(int cell, const NodalField& u,
                                                 const NodalField& p) const {
  LocalVector x;
  for (int a = 0; a < 3; ++a) {
    const int node = mesh_->cells(cell, a);
    x(2 * a) = u(node, 0);
    x(2 * a + 1) = u(node, 1);
    x(6 + a) = p(node, 0);
  }
  return x;
}

void FluidOperator::cell_system(int cell, const NodalField& u, const NodalField& p,
                                LocalSystem& local) const {
  local.residual = matrices_[cell] * gather(cell, u, p) - loads_[cell];
  local.jacobian = matrices_[cell];
}

ElementGroup FluidOperator::cell_group(const DofMap& dofs, int u_field, int p_field) const {
  ElementGroup g;
  g.name = "fluid";
  g.dofs.resize(mesh_->num_cells());
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    auto& list = g.dofs[c];
    list.reserve(local_size);
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 2; ++i) list.push_back(dofs(u_field, mesh_->cells(c, a), i));
    for (int a = 0; a < 3; ++a) list.push_back(dofs(p_field, mesh_->cells(c, a), 0));
  }
  return g;
}

ElementGroup FluidOperator::traction_group(const DofMap& dofs, int u_field) const {
  ElementGroup g;
  g.name = "traction";
  for (const auto& t : traction_facets_) {
    std::vector<DofRef> list;
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 2; ++i) list.push_back(dofs(u_field, t.nodes[a], i));
    g.dofs.push_back(std::move(list));
  }
  return g;
}

LocalKernel FluidOperator::cell_kernel(const NodalField& u, const NodalField& p) const {
  return [this, &u, &p](int c, LocalSystem& local) { cell_system(c, u, p, local); };
}

LocalKernel FluidOperator::traction_kernel() const {
  return [this](int k, LocalSystem& local) {
    local.reset(4);
    local.residual = traction_facets_[k].load;
  };
}

double total_divergence(const Mesh& mesh, const Eigen::MatrixXd& coords, const NodalField& u) {
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Simplex<2> s = cell_simplex<2>(mesh, coords, c);
    double div = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 2; ++i) div += u(mesh.cells(c, a), i) * s.grads(a, i);
    sum += s.measure * div;
  }
  return sum;
}

// ------------------------------------------------------- stand-alone solver

FluidSolution solve_fluid(const Mesh& mesh, const FluidParams& params, const FluidStepInput& input,
                          const FluidSolveOptions& options) {
  FluidOperator op(mesh, params, input);
  const int nn = mesh.num_nodes();

  DofMap dofs;
  const int uf = dofs.add_field("u", nn, 2);
  const int pf = dofs.add_field("p", nn, 1);
  const int gf = options.mean_pressure_gauge ? dofs.add_field("gauge", 1, 1) : -1;
  NodalField u_bc(nn, 2);
  for (const auto& bc : options.dirichlet) {
    for (int node : mesh.nodes_with_tag(bc.tag)) {
      const Eigen::Vector2d v = bc.value(op.input().coords.row(node).transpose());
      for (int i = 0; i < 2; ++i) {
        dofs.constrain(uf, node, i);
        u_bc(node, i) = v(i);
      }
    }
  }
  dofs.finalize();

  std::vector<ElementGroup> groups{op.cell_group(dofs, uf, pf), op.traction_group(dofs, uf)};
  if (gf >= 0) {
    ElementGroup g;
    g.name = "gauge";
    for (int c = 0; c < mesh.num_cells(); ++c) {
      std::vector<DofRef> list;
      for (int a = 0; a < 3; ++a) list.push_back(dofs(pf, mesh.cells(c, a), 0));
      list.push_back(dofs(gf, 0, 0));
      g.dofs.push_back(std::move(list));
    }
    groups.push_back(std::move(g));
  }
  Assembler assembler(dofs.num_dofs(), groups);

  NodalField u = u_bc, p(nn, 1), lambda(1, 1);
  auto unpack = [&](const Eigen::VectorXd& x) {
    for (int n = 0; n < nn; ++n) {
      for (int i = 0; i < 2; ++i) {
        const DofRef r = dofs(uf, n, i);
        u(n, i) = r.index >= 0 ? x(r.index) : u_bc(n, i);
      }
      p(n, 0) = x(dofs(pf, n, 0).index);
    }
    if (gf >= 0) lambda(0, 0) = x(dofs(gf, 0, 0).index);
  };

  std::vector<LocalKernel> kernels{op.cell_kernel(u, p), op.traction_kernel()};
  if (gf >= 0) {
    kernels.push_back([&](int c, LocalSystem& local) {
      local.reset(4);
      const double w = mesh.cell_volume(c, op.input().coords) / 3.0;
      double mean = 0.0;
      for (int a = 0; a < 3; ++a) {
        mean += w * p(mesh.cells(c, a), 0);
        local.residual(a) = w * lambda(0, 0);
        local.jacobian(a, 3) = w;
        local.jacobian(3, a) = w;
      }
      local.residual(3) = mean;
    });
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(dofs.num_dofs());
  for (int n = 0; n < nn; ++n)
    for (int i = 0; i < 2; ++i) {
      const DofRef r = dofs(uf, n, i);
      if (r.index >= 0) x(r.index) = input.u_old.num_nodes() ? input.u_old(n, i) : 0.0;
    }
  LinearSolver solver;
  const SystemFunction fn = [&](const Eigen::VectorXd& xv, SparseSystem& system, bool jac) {
    unpack(xv);
    assembler.assemble_into(kernels, system, jac);
  };
  FluidSolution out;
  out.report = newton_solve(fn, x, options.newton, solver);
  unpack(x);
  out.u = u;
  out.p = p;
  return out;
}

}  // namespace riisfsi
