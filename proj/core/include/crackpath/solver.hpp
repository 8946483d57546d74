#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "crackpath/constitutive.hpp"
#include "crackpath/material.hpp"
#include "crackpath/mesh.hpp"

namespace crackpath {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Monotone displacement program: step k applies k * increment at the
/// top-left corner, decreasing linearly to zero at the top-right corner.
struct LoadProgram {
  std::size_t n_steps = 200;
  double increment = 1e-4;
  double max_displacement = 0.02;

  /// Throws OutOfRange unless n_steps * increment == max_displacement.
  void validate() const;
  double displacement_at(std::size_t step) const { return static_cast<double>(step) * increment; }
};

/// Dirichlet data for both fields. Displacement DOF 2k is u_x of node k and
/// 2k+1 is u_y. Damage constraints always fix phi = 1.
struct ConstraintSet {
  std::vector<std::uint8_t> u_fixed;
  std::vector<double> u_value;
  std::vector<std::uint8_t> phi_fixed;

  static ConstraintSet free(std::size_t num_nodes);
  void fix_u(std::size_t node, int component, double value);
};

/// Bottom clamped, right edge u_x = 0, top edge u_y = d (1 - x), left free.
/// Bottom wins at the bottom-right corner; the top profile owns u_y at the
/// top-right corner where it is zero anyway.
ConstraintSet dataset_constraints(const Mesh& mesh, double top_left_displacement);

/// Rewrites the prescribed top-edge u_y values for a new load level.
void set_top_profile(ConstraintSet& constraints, const Mesh& mesh, double top_left_displacement);

/// Horizontal pre-crack entering from the left edge.
struct InitialCrack {
  double height = 0.5;
  double length = 0.25;
};

/// Nodes within h/2 of the segment {(t, height) : 0 <= t <= length}.
std::vector<int> initial_crack_nodes(const Mesh& mesh, const InitialCrack& crack);

/// Rigidity ratio sampled at every quadrature point, element-major.
std::vector<double> quadrature_ratios(const Mesh& mesh, const MaterialField& material);

/// Displacement subproblem with the damage field frozen. The sparsity pattern
/// of the free-DOF stiffness and the Cholesky ordering are computed once; a
/// refactorization happens only when the damage field changes.
class ElasticSolver {
 public:
  ElasticSolver(const Mesh& mesh, std::vector<double> qp_ratio, const PhaseFieldParams& params,
                std::span<const std::uint8_t> u_fixed);
  ~ElasticSolver();
  ElasticSolver(ElasticSolver&&) noexcept;
  ElasticSolver& operator=(ElasticSolver&&) noexcept;

  /// Assembles the reduced stiffness K_ff and right-hand side -K_fc u_c.
  void assemble(std::span<const double> phi, const ConstraintSet& constraints);
  const SparseMatrix& stiffness() const { return stiffness_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }

  /// Full nodal displacement vector (2 per node) satisfying the constraints,
  /// with relative residual below 1e-8 on the reduced system. A new damage
  /// field is first tried with conjugate gradients preconditioned by the most
  /// recent factorization; refactorization happens when that gets slow.
  /// Throws SingularSystem when the factorization fails.
  std::vector<double> solve(std::span<const double> phi, const ConstraintSet& constraints);

  /// K(phi) u over all DOFs, constrained ones included.
  std::vector<double> internal_force(std::span<const double> phi, std::span<const double> u) const;

  /// Strain of element e (constant for linear triangles).
  SymTensor2 element_strain(std::size_t e, std::span<const double> u) const;

  /// Reduced index of every DOF (-1 when constrained). The reduced order is
  /// chosen for factorization fill, not DOF order.
  std::span<const int> free_index() const { return free_index_; }
  std::size_t num_free() const { return free_index_.empty() ? 0 : static_cast<std::size_t>(num_free_); }
  std::size_t factorizations() const { return factorizations_; }
  std::size_t cg_iterations() const { return cg_iterations_; }

 private:
  static constexpr double kLinearTol = 1e-8;
  static constexpr int kMaxCgIterations = 60;
  static constexpr int kRefactorAfterCg = 8;

  double element_scale(std::size_t e, std::span<const double> phi) const;
  void update_rhs(std::span<const double> phi, const ConstraintSet& constraints);
  void factorize();
  bool preconditioned_cg(Eigen::VectorXd& x);

  const Mesh* mesh_;
  std::vector<double> qp_ratio_;
  PhaseFieldParams params_;
  std::vector<std::uint8_t> fixed_;
  std::vector<int> free_index_;
  int num_free_ = 0;
  std::vector<std::array<double, 36>> reference_;  // area * B^T D(E0) B per element
  std::vector<std::array<int, 36>> scatter_;        // offset into stiffness values or -1
  SparseMatrix stiffness_;
  Eigen::VectorXd rhs_;
  struct Factor;
  std::unique_ptr<Factor> factor_;
  std::vector<double> assembled_phi_;
  bool assembled_ = false;
  bool has_factor_ = false;
  bool factor_current_ = false;
  bool refactor_next_ = false;
  Eigen::VectorXd last_x_;
  int last_cg_iterations_ = 0;
  std::size_t factorizations_ = 0;
  std::size_t cg_iterations_ = 0;
};

/// Free-function form of the elasticity assembly: reduced (K, f) over the
/// free DOFs in ascending DOF order.
struct LinearSystem {
  SparseMatrix K;
  Eigen::VectorXd f;
};
LinearSystem assemble_elasticity(const Mesh& mesh, const MaterialField& material, std::span<const double> phi,
                                 const PhaseFieldParams& params, const ConstraintSet& constraints);

/// Residual, Jacobian and energy of the damage subproblem with frozen history:
///   E(phi) = int omega(phi) H + Gf(x)/c0 (alpha(phi)/l0 + l0 |grad phi|^2)
/// with Gf(x) = r(x) Gf. The residual is dE/dphi and the Jacobian its exact
/// derivative.
class DamageProvider {
 public:
  DamageProvider(const Mesh& mesh, std::vector<double> qp_ratio, const PhaseFieldParams& params,
                 std::vector<std::uint8_t> phi_fixed);

  void set_history(std::span<const double> history);
  std::span<const double> history() const { return history_; }

  const Mesh& mesh() const { return *mesh_; }
  const PhaseFieldParams& params() const { return params_; }
  std::span<const std::uint8_t> fixed() const { return fixed_; }

  std::vector<double> residual(std::span<const double> phi) const;
  double energy(std::span<const double> phi) const;
  double element_energy(std::size_t e, std::span<const double> phi) const;
  /// Full nodal Jacobian (all nodes, fixed ones included). With a node mask,
  /// only elements touching a masked node are assembled, so only entries in
  /// masked rows and columns are meaningful.
  const SparseMatrix& jacobian(std::span<const double> phi, std::span<const std::uint8_t> node_mask = {});

  /// Elements incident to each node, for local energy differences.
  const std::vector<std::vector<int>>& node_elements() const { return node_elements_; }

 private:
  const Mesh* mesh_;
  std::vector<double> qp_ratio_;
  PhaseFieldParams params_;
  std::vector<std::uint8_t> fixed_;
  std::vector<double> history_;
  SparseMatrix jacobian_;
  std::vector<std::array<int, 9>> scatter_;
  std::vector<std::vector<int>> node_elements_;
};

DamageProvider assemble_damage_subproblem(const Mesh& mesh, const MaterialField& material,
                                          std::span<const double> history, const PhaseFieldParams& params,
                                          std::span<const int> crack_nodes);

struct DamageSolveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double step_tol = 1e-9;  ///< converged once the full Newton update is this small
  int max_iterations = 50;
};

struct DamageSolveStats {
  int iterations = 0;
  double residual = 0.0;
};

/// Projected Newton with backtracking on the energy. Every iterate is
/// projected nodally onto [phi_lower, 1]; constrained nodes stay at 1.
/// Convergence is measured on the projected residual (zero at nodes held by
/// an active bound) or on the size of the Newton update. Throws NoConvergence
/// at the iteration cap.
std::vector<double> solve_damage(DamageProvider& provider, std::span<const double> phi_lower,
                                 std::span<const double> phi_start, const DamageSolveOptions& options = {},
                                 DamageSolveStats* stats = nullptr);
inline std::vector<double> solve_damage(DamageProvider& provider, std::span<const double> phi_prev) {
  return solve_damage(provider, phi_prev, phi_prev);
}

struct SimulationState {
  std::vector<double> u;        ///< 2 per node
  std::vector<double> phi;      ///< per node
  std::vector<double> history;  ///< per quadrature point
  std::size_t step = 0;
  std::vector<double> curve_displacement;
  std::vector<double> curve_force;
  std::vector<int> staggered_iterations;
};

struct StaggeredOptions {
  double phi_tol = 1e-3;
  int max_iterations = 50;
  DamageSolveOptions damage;
};

/// Bundles everything a staggered step needs that stays fixed over a run.
class PhaseFieldModel {
 public:
  PhaseFieldModel(const Mesh& mesh, const MaterialField& material, const PhaseFieldParams& params,
                  std::span<const int> crack_nodes);

  const Mesh& mesh() const { return *mesh_; }
  const PhaseFieldParams& params() const { return params_; }
  ConstraintSet& constraints() { return constraints_; }
  const ConstraintSet& constraints() const { return constraints_; }
  ElasticSolver& elastic() { return elastic_; }
  DamageProvider& damage() { return damage_; }
  std::span<const double> qp_ratio() const { return qp_ratio_; }

  /// phi = 1 on crack nodes, zero elsewhere; u and history zero.
  SimulationState initial_state() const;

  /// Undegraded driving energy at every quadrature point for displacement u.
  std::vector<double> driving_energy(std::span<const double> u) const;

  /// Alternates elasticity, history update and damage until the damage
  /// change drops below phi_tol or the iteration cap is reached. Appends the
  /// force-displacement sample and staggered count to the state.
  SimulationState staggered_step(SimulationState state, double top_left_displacement,
                                 const StaggeredOptions& options = {});

  /// Sum of the y internal forces over top-edge nodes (positive in tension).
  double reaction_force(const SimulationState& state) const;

 private:
  const Mesh* mesh_;
  PhaseFieldParams params_;
  std::vector<double> qp_ratio_;
  ConstraintSet constraints_;
  ElasticSolver elastic_;
  DamageProvider damage_;
};

struct SimulationConfig {
  std::size_t mesh_n = 100;
  PhaseFieldParams params = derive_params(210000.0, 0.3, 2.7, 2445.42, 0.05);
  LoadProgram load;
  InitialCrack crack;
  StaggeredOptions staggered;
  /// Allow l0/h < 5 (a warning is recorded instead of an exception).
  bool allow_coarse_mesh = false;
  /// Stop once the force falls below this fraction of the running peak
  /// (0 disables). Only useful when the post-peak tail is not needed.
  double stop_below_peak_fraction = 0.0;
};

struct SimulationResult {
  std::vector<double> u;
  std::vector<double> phi;
  std::vector<double> curve_displacement;
  std::vector<double> curve_force;
  std::vector<int> staggered_iterations;
  std::vector<std::string> warnings;
  std::size_t steps_completed = 0;

  double peak_force() const;
};

using StepObserver = std::function<void(const SimulationState&, const Mesh&)>;

constexpr double kMinLengthToMeshRatio = 5.0;

/// Full quasi-static run: pre-crack, then steps 0..n_steps of the load program
/// (step 0 applies zero displacement and settles the pre-crack profile).
SimulationResult run_simulation(const MaterialField& material, const Mesh& mesh, const SimulationConfig& config,
                                const StepObserver& observer = {});
SimulationResult run_simulation(const MaterialField& material, const SimulationConfig& config,
                                const StepObserver& observer = {});

}  // namespace crackpath
