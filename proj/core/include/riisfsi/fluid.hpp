#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "riisfsi/assembly.hpp"
#include "riisfsi/mesh.hpp"
#include "riisfsi/newton.hpp"
#include "riisfsi/nodal_field.hpp"
#include "riisfsi/riis.hpp"

namespace riisfsi {

struct FluidParams {
  double density = 1.06e3;    // [kg m^-3]
  double viscosity = 3.5e-3;  // [Pa s]
  double stabilization = 0.1;  // pressure stabilization coefficient beta
};

/// Throws ParameterError unless all parameters are positive and finite.
void check_params(const FluidParams& params);

/// Componentwise discrete harmonic extension of boundary data into the fluid
/// mesh. The Laplacian is factorized once per mesh.
class MeshMotion {
 public:
  /// Dirichlet nodes are all boundary nodes of the fluid mesh. Interface nodes
  /// take the solid displacement, the rest are held at zero.
  explicit MeshMotion(const MeshPair& meshes);

  /// Extension of the solid displacement restricted to the interface.
  NodalField extend(const NodalField& solid_displacement) const;
  /// Extension of arbitrary values prescribed on every boundary node (rows of
  /// `boundary_values` at interior nodes are ignored).
  NodalField extend_boundary(const NodalField& boundary_values) const;

  const std::vector<int>& boundary_nodes() const { return boundary_; }

 private:
  int num_nodes_ = 0;
  std::vector<std::pair<int, int>> interface_pairs_;
  std::vector<int> boundary_;
  std::vector<int> interior_index_;  // node -> interior unknown or -1
  Eigen::SparseMatrix<double> k_ib_;  // interior rows, boundary columns
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

/// d_ALE^{n+1} from the solid displacement on the interface.
NodalField solve_mesh_motion(const MeshPair& meshes, const NodalField& solid_displacement);

/// (d_new - d_old) / dt nodewise. Throws ParameterError for dt <= 0.
NodalField domain_velocity(const NodalField& d_new, const NodalField& d_old, double dt);

/// Resistive valve contribution on the fluid mesh: support points and the
/// coefficient R_k * blend / eps_k.
struct ResistiveTerm {
  const DeltaSupport* support = nullptr;
  double coefficient = 0.0;
};

/// Imposed normal traction -p_imp n on facets carrying `tag`.
struct PressureTraction {
  std::string tag;
  double pressure = 0.0;
};

/// Frozen data of one fluid solve on the current geometry.
struct FluidStepInput {
  Eigen::MatrixXd coords;  // current node coordinates
  NodalField u_old;        // u^n
  NodalField u_ale;        // mesh velocity
  double dt = 0.0;
  bool transient = true;   // include the rho/dt time term
  bool convection = true;  // include ((u^n - u_ale) . grad) u
  std::vector<ResistiveTerm> valves;
  std::vector<PressureTraction> tractions;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> body_force;  // [N m^-3], optional
};

/// Linearized (frozen advection) ALE Navier-Stokes operator on P1/P1 triangles
/// with pressure stabilization tau_K (grad p, grad q)_K,
/// tau_K = beta / (mu / h_K^2 + rho / dt + sigma_K), where sigma_K is the cell
/// mean of the resistive coefficient (rho / dt dropped when steady).
///
/// Local unknown order per cell: u0x u0y u1x u1y u2x u2y p0 p1 p2. The cell
/// residual is K x - f with K and f computed once at construction.
class FluidOperator {
 public:
  static constexpr int local_size = 9;
  using LocalMatrix = Eigen::Matrix<double, 9, 9>;
  using LocalVector = Eigen::Matrix<double, 9, 1>;

  FluidOperator(const Mesh& mesh, const FluidParams& params, FluidStepInput input);

  const Mesh& mesh() const { return *mesh_; }
  const FluidStepInput& input() const { return input_; }
  const LocalMatrix& cell_matrix(int cell) const { return matrices_[cell]; }
  const LocalVector& cell_load(int cell) const { return loads_[cell]; }
  double tau(int cell) const { return tau_[cell]; }

  /// Local values of (u, p) on a cell in the local unknown order.
  LocalVector gather(int cell, const NodalField& u, const NodalField& p) const;
  void cell_system(int cell, const NodalField& u, const NodalField& p, LocalSystem& local) const;

  /// Boundary edges carrying an imposed traction and their residual contribution.
  struct TractionFacet {
    int nodes[2];
    Eigen::Vector4d load;  // residual contribution on (u_a, u_b)
  };
  const std::vector<TractionFacet>& traction_facets() const { return traction_facets_; }

  /// Global element groups for the cells and traction facets.
  ElementGroup cell_group(const DofMap& dofs, int u_field, int p_field) const;
  ElementGroup traction_group(const DofMap& dofs, int u_field) const;
  LocalKernel cell_kernel(const NodalField& u, const NodalField& p) const;
  LocalKernel traction_kernel() const;

 private:
  const Mesh* mesh_;
  FluidParams params_;
  FluidStepInput input_;
  std::vector<LocalMatrix> matrices_;
  std::vector<LocalVector> loads_;
  std::vector<double> tau_;
  std::vector<TractionFacet> traction_facets_;
};

/// Boundary facets paired with the single cell that owns each of them.
std::vector<std::pair<Facet, int>> boundary_facet_owners(const Mesh& mesh);

/// Integral of div u over the mesh at the given coordinates.
double total_divergence(const Mesh& mesh, const Eigen::MatrixXd& coords, const NodalField& u);

/// Stand-alone fluid solve on a fixed mesh with Dirichlet velocity on tagged
/// boundaries (interface fluid velocity is not coupled here).
struct FluidDirichlet {
  std::string tag;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> value;
};

struct FluidSolveOptions {
  std::vector<FluidDirichlet> dirichlet;
  /// Adds a Lagrange multiplier enforcing zero mean pressure; needed when the
  /// velocity is prescribed on the whole boundary.
  bool mean_pressure_gauge = false;
  NewtonOptions newton;
};

struct FluidSolution {
  NodalField u;
  NodalField p;
  NewtonReport report;
};

FluidSolution solve_fluid(const Mesh& mesh, const FluidParams& params, const FluidStepInput& input,
                          const FluidSolveOptions& options);

}  // namespace riisfsi
