#pragma once

#include <vector>

#include <Eigen/Core>

#include "riisfsi/assembly.hpp"
#include "riisfsi/kinematics.hpp"
#include "riisfsi/mesh.hpp"
#include "riisfsi/nodal_field.hpp"
#include "riisfsi/riis.hpp"

namespace riisfsi {

struct SolidParams {
  double density = 1e3;     // [kg m^-3]
  double shear = 5e3;       // neo-Hooke mu_s [Pa]
  double bulk = 5e4;        // neo-Hooke kappa_s [Pa]
  double active_max = 5e3;  // A_max [Pa]
  double active_period = 0.25;  // T_max [s]
};

/// Throws ParameterError unless density and moduli are positive, A_max >= 0
/// and T_max > 0.
void check_params(const SolidParams& params);

template <int D>
using Tensor2 = Eigen::Matrix<double, D, D>;
/// Fourth-order tangent dP_iJ / dF_kL stored at (i*D + J, k*D + L).
template <int D>
using Tensor4 = Eigen::Matrix<double, D * D, D * D>;

/// Compressible neo-Hooke stored energy
/// W = mu/2 (J^{-2/D} tr(F F^T) - D) + kappa/2 (J - 1)^2.
template <int D>
double neo_hooke_energy(const Tensor2<D>& F, const SolidParams& params);

/// First Piola stress dW/dF. Throws InvertedElementError(-1, J) for J <= 0.
template <int D>
Tensor2<D> passive_piola(const Tensor2<D>& F, const SolidParams& params);
template <int D>
Tensor4<D> passive_tangent(const Tensor2<D>& F, const SolidParams& params);

/// (A_max / 2)(1 - cos(pi t / T_max)).
double active_magnitude(double t, const SolidParams& params);

/// Active fiber stress a(t) (F f) (x) f / |F f| where the last coordinate of
/// `position` is <= 0, zero elsewhere. Throws ParameterError for a degenerate
/// deformed fiber.
template <int D>
Tensor2<D> active_piola(const Tensor2<D>& F, const Eigen::Matrix<double, D, 1>& fiber, double t,
                        const SolidParams& params, const Eigen::Matrix<double, D, 1>& position);
template <int D>
Tensor4<D> active_tangent(const Tensor2<D>& F, const Eigen::Matrix<double, D, 1>& fiber, double t,
                          const SolidParams& params, const Eigen::Matrix<double, D, 1>& position);

/// Nodal solid load from the valve attachment densities C_k delta_k, integrated
/// with the same support points that define V_k. Zero when `enabled` is false.
NodalField attachment_rhs(const std::vector<ValveForces>& forces,
                          const std::vector<const DeltaSupport*>& solid_supports,
                          const Mesh& solid, bool enabled = true);

/// Frozen data of one solid solve.
struct SolidStepInput {
  NodalField d_old;     // d^n
  NodalField d_older;   // d^{n-1}
  double dt = 0.0;
  double time = 0.0;    // t^{n+1}, evaluates the active stress
  Eigen::MatrixXd fibers;  // per cell, num_cells x 2; empty disables active stress
  NodalField load;      // nodal external load; empty means none
};

/// Elastodynamics residual on P1 triangles: consistent mass second difference
/// plus total Piola stress. Local unknown order d0x d0y d1x d1y d2x d2y.
class SolidOperator {
 public:
  static constexpr int local_size = 6;

  SolidOperator(const Mesh& mesh, const SolidParams& params, SolidStepInput input);

  const Mesh& mesh() const { return *mesh_; }
  const SolidStepInput& input() const { return input_; }
  bool active_cell(int cell) const { return active_[cell] != 0; }

  void cell_system(int cell, const NodalField& d, LocalSystem& local,
                   bool with_jacobian = true) const;

  ElementGroup cell_group(const DofMap& dofs, int d_field) const;
  /// One element per node carrying a nonzero load.
  ElementGroup load_group(const DofMap& dofs, int d_field) const;
  LocalKernel cell_kernel(const NodalField& d) const;
  LocalKernel load_kernel() const;

 private:
  const Mesh* mesh_;
  SolidParams params_;
  SolidStepInput input_;
  std::vector<Simplex<2>> reference_;
  std::vector<char> active_;
  std::vector<int> loaded_nodes_;
};

}  // namespace riisfsi
