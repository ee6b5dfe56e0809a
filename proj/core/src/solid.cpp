#include "riisfsi/solid.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "riisfsi/errors.hpp"

namespace riisfsi {

void check_params(const SolidParams& params) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(params.density)) throw ParameterError("solid density must be positive");
  if (!positive(params.shear)) throw ParameterError("solid shear modulus must be positive");
  if (!positive(params.bulk)) throw ParameterError("solid bulk modulus must be positive");
  if (!(std::isfinite(params.active_max) && params.active_max >= 0.0))
    throw ParameterError("peak active stress must be non-negative");
  if (!positive(params.active_period)) throw ParameterError("activation period must be positive");
}

template <int D>
double neo_hooke_energy(const Tensor2<D>& F, const SolidParams& params) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw InvertedElementError(-1, J);
  const double g = std::pow(J, -2.0 / D);
  return 0.5 * params.shear * (g * F.squaredNorm() - D) +
         0.5 * params.bulk * (J - 1.0) * (J - 1.0);
}

template <int D>
Tensor2<D> passive_piola(const Tensor2<D>& F, const SolidParams& params) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw InvertedElementError(-1, J);
  const Tensor2<D> H = F.inverse().transpose();
  const double g = std::pow(J, -2.0 / D);
  const double i1 = F.squaredNorm();
  return params.shear * g * (F - (i1 / D) * H) + params.bulk * (J - 1.0) * J * H;
}

template <int D>
Tensor4<D> passive_tangent(const Tensor2<D>& F, const SolidParams& params) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw InvertedElementError(-1, J);
  const Tensor2<D> H = F.inverse().transpose();
  const double g = std::pow(J, -2.0 / D);
  const double i1 = F.squaredNorm();
  const double mu = params.shear, kappa = params.bulk;
  Tensor4<D> A;
  for (int i = 0; i < D; ++i)
    for (int Jx = 0; Jx < D; ++Jx)
      for (int k = 0; k < D; ++k)
        for (int L = 0; L < D; ++L) {
          const double dev = F(i, Jx) - (i1 / D) * H(i, Jx);
          double v = mu * (-(2.0 / D) * g * H(k, L) * dev +
                           g * ((i == k && Jx == L ? 1.0 : 0.0) - (2.0 * F(k, L) / D) * H(i, Jx) +
                                (i1 / D) * H(i, L) * H(k, Jx)));
          v += kappa * ((2.0 * J - 1.0) * J * H(k, L) * H(i, Jx) - (J * J - J) * H(i, L) * H(k, Jx));
          A(i * D + Jx, k * D + L) = v;
        }
  return A;
}

double active_magnitude(double t, const SolidParams& params) {
  return 0.5 * params.active_max * (1.0 - std::cos(std::numbers::pi * t / params.active_period));
}

template <int D>
Tensor2<D> active_piola(const Tensor2<D>& F, const Eigen::Matrix<double, D, 1>& fiber, double t,
                        const SolidParams& params, const Eigen::Matrix<double, D, 1>& position) {
  if (position(D - 1) > 0.0) return Tensor2<D>::Zero();
  const Eigen::Matrix<double, D, 1> m = F * fiber;
  const double norm = m.norm();
  if (!(norm > 0.0)) throw ParameterError("active stress: deformed fiber has zero length");
  return active_magnitude(t, params) * m * fiber.transpose() / norm;
}

template <int D>
Tensor4<D> active_tangent(const Tensor2<D>& F, const Eigen::Matrix<double, D, 1>& fiber, double t,
                          const SolidParams& params, const Eigen::Matrix<double, D, 1>& position) {
  Tensor4<D> A = Tensor4<D>::Zero();
  if (position(D - 1) > 0.0) return A;
  const Eigen::Matrix<double, D, 1> m = F * fiber;
  const double norm = m.norm();
  if (!(norm > 0.0)) throw ParameterError("active stress: deformed fiber has zero length");
  const Eigen::Matrix<double, D, 1> n = m / norm;
  const double a = active_magnitude(t, params);
  for (int i = 0; i < D; ++i)
    for (int Jx = 0; Jx < D; ++Jx)
      for (int k = 0; k < D; ++k)
        for (int L = 0; L < D; ++L)
          A(i * D + Jx, k * D + L) =
              a * fiber(Jx) * fiber(L) * ((i == k ? 1.0 : 0.0) - n(i) * n(k)) / norm;
  return A;
}

template double neo_hooke_energy<2>(const Tensor2<2>&, const SolidParams&);
template double neo_hooke_energy<3>(const Tensor2<3>&, const SolidParams&);
template Tensor2<2> passive_piola<2>(const Tensor2<2>&, const SolidParams&);
template Tensor2<3> passive_piola<3>(const Tensor2<3>&, const SolidParams&);
template Tensor4<2> passive_tangent<2>(const Tensor2<2>&, const SolidParams&);
template Tensor4<3> passive_tangent<3>(const Tensor2<3>&, const SolidParams&);
template Tensor2<2> active_piola<2>(const Tensor2<2>&, const Eigen::Vector2d&, double,
                                    const SolidParams&, const Eigen::Vector2d&);
template Tensor2<3> active_piola<3>(const Tensor2<3>&, const Eigen::Vector3d&, double,
                                    const SolidParams&, const Eigen::Vector3d&);
template Tensor4<2> active_tangent<2>(const Tensor2<2>&, const Eigen::Vector2d&, double,
                                      const SolidParams&, const Eigen::Vector2d&);
template Tensor4<3> active_tangent<3>(const Tensor2<3>&, const Eigen::Vector3d&, double,
                                      const SolidParams&, const Eigen::Vector3d&);

NodalField attachment_rhs(const std::vector<ValveForces>& forces,
                          const std::vector<const DeltaSupport*>& solid_supports,
                          const Mesh& solid, bool enabled) {
  if (forces.size() != solid_supports.size())
    throw ShapeError("attachment load: one support per valve required");
  NodalField load(solid.num_nodes(), 2);
  if (!enabled) return load;
  for (std::size_t k = 0; k < forces.size(); ++k) {
    const DeltaSupport& support = *solid_supports[k];
    if (support.cell_begin.size() != static_cast<std::size_t>(solid.num_cells()) + 1)
      throw ShapeError("attachment load: support does not match the solid mesh");
    const Eigen::Vector2d c = forces[k].density();
    if (!c.allFinite()) throw ParameterError("attachment load: force density is not finite");
    for (const auto& pt : support.points)
      for (int a = 0; a < 3; ++a)
        load.values.row(solid.cells(pt.cell, a)) += (pt.weight * pt.shape(a)) * c.transpose();
  }
  return load;
}

SolidOperator::SolidOperator(const Mesh& mesh, const SolidParams& params, SolidStepInput input)
    : mesh_(&mesh), params_(params), input_(std::move(input)) {
  check_params(params_);
  if (mesh.dim != 2) throw ParameterError("solid operator: only 2D meshes are supported");
  const int nn = mesh.num_nodes();
  if (input_.d_old.num_nodes() == 0) input_.d_old = NodalField(nn, 2);
  if (input_.d_older.num_nodes() == 0) input_.d_older = NodalField(nn, 2);
  if (input_.load.num_nodes() == 0) input_.load = NodalField(nn, 2);
  if (input_.d_old.num_nodes() != nn || input_.d_older.num_nodes() != nn ||
      input_.load.num_nodes() != nn)
    throw ShapeError("solid operator: history or load does not match the mesh");
  if (!(input_.dt > 0.0)) throw ParameterError("solid operator: time step must be positive");
  if (input_.fibers.size() != 0 && input_.fibers.rows() != mesh.num_cells())
    throw ShapeError("solid operator: one fiber per cell required");

  reference_.reserve(mesh.num_cells());
  active_.assign(mesh.num_cells(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    reference_.push_back(cell_simplex<2>(mesh, mesh.nodes, c));
    if (!(reference_.back().measure > 0.0))
      throw InvertedElementError(c, reference_.back().measure);
    if (input_.fibers.size() != 0 && reference_.back().centroid()(1) <= 0.0) active_[c] = 1;
  }
  if (input_.load.num_nodes() == nn)
    for (int n = 0; n < nn; ++n) loaded_nodes_.push_back(n);
}

void SolidOperator::cell_system(int cell, const NodalField& d, LocalSystem& local,
                                bool with_jacobian) const {
  const Simplex<2>& s = reference_[cell];
  Eigen::Matrix<double, 3, 2> disp, accel;
  for (int a = 0; a < 3; ++a) {
    const int n = mesh_->cells(cell, a);
    disp.row(a) = d.values.row(n);
    accel.row(a) = d.values.row(n) - 2.0 * input_.d_old.values.row(n) + input_.d_older.values.row(n);
  }
  const Tensor2<2> F = deformation_gradient<2>(s, disp);
  const double J = F.determinant();
  if (!(J > 0.0)) throw InvertedElementError(cell, J);

  Tensor2<2> P = passive_piola<2>(F, params_);
  Tensor4<2> A = with_jacobian ? passive_tangent<2>(F, params_) : Tensor4<2>::Zero();
  if (active_[cell]) {
    const Eigen::Vector2d f = input_.fibers.row(cell).transpose();
    const Eigen::Vector2d x = s.centroid();
    P += active_piola<2>(F, f, input_.time, params_, x);
    if (with_jacobian) A += active_tangent<2>(F, f, input_.time, params_, x);
  }

  const double area = s.measure;
  const double m_coef = params_.density / (input_.dt * input_.dt) * area / 12.0;
  local.reset(local_size);
  for (int a = 0; a < 3; ++a) {
    for (int i = 0; i < 2; ++i) {
      double r = 0.0;
      for (int b = 0; b < 3; ++b) r += m_coef * (a == b ? 2.0 : 1.0) * accel(b, i);
      for (int Jx = 0; Jx < 2; ++Jx) r += area * P(i, Jx) * s.grads(a, Jx);
      local.residual(2 * a + i) = r;
    }
  }
  if (!with_jacobian) return;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 2; ++i)
      for (int b = 0; b < 3; ++b)
        for (int k = 0; k < 2; ++k) {
          double v = (i == k) ? m_coef * (a == b ? 2.0 : 1.0) : 0.0;
          for (int Jx = 0; Jx < 2; ++Jx)
            for (int L = 0; L < 2; ++L)
              v += area * A(i * 2 + Jx, k * 2 + L) * s.grads(a, Jx) * s.grads(b, L);
          local.jacobian(2 * a + i, 2 * b + k) = v;
        }
}

ElementGroup SolidOperator::cell_group(const DofMap& dofs, int d_field) const {
  ElementGroup g;
  g.name = "solid";
  g.dofs.resize(mesh_->num_cells());
  for (int c = 0; c < mesh_->num_cells(); ++c)
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 2; ++i) g.dofs[c].push_back(dofs(d_field, mesh_->cells(c, a), i));
  return g;
}

ElementGroup SolidOperator::load_group(const DofMap& dofs, int d_field) const {
  ElementGroup g;
  g.name = "solid-load";
  for (int n : loaded_nodes_) g.dofs.push_back({dofs(d_field, n, 0), dofs(d_field, n, 1)});
  return g;
}

LocalKernel SolidOperator::cell_kernel(const NodalField& d) const {
  return [this, &d](int c, LocalSystem& local) { cell_system(c, d, local, true); };
}

LocalKernel SolidOperator::load_kernel() const {
  return [this](int k, LocalSystem& local) {
    local.reset(2);
    local.residual = -input_.load.values.row(loaded_nodes_[k]).transpose();
  };
}

}  // namespace riisfsi
