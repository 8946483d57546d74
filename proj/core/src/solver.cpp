#include "crackpath/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include <Eigen/SparseCholesky>

#include "crackpath/error.hpp"

namespace crackpath {

namespace {

using AmdFactor = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
using PresetFactor = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>>;

constexpr double kStaticTol = 1e-12;

// Offset of entry (row, col) inside the compressed storage of `m`.
int entry_offset(const SparseMatrix& m, int row, int col) {
  const int* begin = m.innerIndexPtr() + m.outerIndexPtr()[col];
  const int* end = m.innerIndexPtr() + m.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(begin, end, row);
  if (it == end || *it != row) throw Error(ErrorCode::SingularSystem, "entry missing from sparsity pattern");
  return static_cast<int>(it - m.innerIndexPtr());
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

// ---------------------------------------------------------------------------
// Load program and constraints

void LoadProgram::validate() const {
  if (n_steps == 0 || !(increment > 0.0)) throw Error(ErrorCode::OutOfRange, "load program needs steps and a positive increment");
  if (std::abs(static_cast<double>(n_steps) * increment - max_displacement) > 1e-12) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("n_steps * increment = {} does not match max_displacement = {}",
                            static_cast<double>(n_steps) * increment, max_displacement));
  }
}

ConstraintSet ConstraintSet::free(std::size_t num_nodes) {
  ConstraintSet c;
  c.u_fixed.assign(2 * num_nodes, 0);
  c.u_value.assign(2 * num_nodes, 0.0);
  c.phi_fixed.assign(num_nodes, 0);
  return c;
}

void ConstraintSet::fix_u(std::size_t node, int component, double value) {
  u_fixed[2 * node + component] = 1;
  u_value[2 * node + component] = value;
}

void set_top_profile(ConstraintSet& constraints, const Mesh& mesh, double top_left_displacement) {
  for (int k : mesh.top) {
    // the bottom edge never meets the top edge, so the top owns u_y here
    constraints.fix_u(k, 1, top_left_displacement * (1.0 - mesh.nodes[k].x));
  }
}

ConstraintSet dataset_constraints(const Mesh& mesh, double top_left_displacement) {
  auto c = ConstraintSet::free(mesh.num_nodes());
  for (int k : mesh.right) c.fix_u(k, 0, 0.0);
  set_top_profile(c, mesh, top_left_displacement);
  for (int k : mesh.bottom) {
    c.fix_u(k, 0, 0.0);
    c.fix_u(k, 1, 0.0);
  }
  return c;
}

std::vector<int> initial_crack_nodes(const Mesh& mesh, const InitialCrack& crack) {
  std::vector<int> out;
  const double reach = 0.5 * mesh.h;
  for (std::size_t k = 0; k < mesh.num_nodes(); ++k) {
    const Point p = mesh.nodes[k];
    const double t = std::clamp(p.x, 0.0, crack.length);
    if (distance(p, {t, crack.height}) <= reach + kStaticTol) out.push_back(static_cast<int>(k));
  }
  return out;
}

std::vector<double> quadrature_ratios(const Mesh& mesh, const MaterialField& material) {
  std::vector<double> out(mesh.num_elements() * TriangleRule::size, 1.0);
  if (material.homogeneous()) return out;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    for (std::size_t q = 0; q < TriangleRule::size; ++q) {
      out[e * TriangleRule::size + q] = rigidity_ratio(quadrature_point(mesh, e, q), material);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elasticity

namespace {

// Nested dissection along lattice lines of a structured mesh: nodes on the
// separator line go last, the two halves are ordered recursively first.
void dissect(const Mesh& mesh, std::vector<int>& nodes, int i0, int i1, int j0, int j1, std::vector<int>& out) {
  if (nodes.size() <= 8 || (i1 - i0 < 2 && j1 - j0 < 2)) {
    out.insert(out.end(), nodes.begin(), nodes.end());
    return;
  }
  const bool along_x = (i1 - i0) >= (j1 - j0);
  const int mid = along_x ? (i0 + i1) / 2 : (j0 + j1) / 2;
  const double line = static_cast<double>(mid) / static_cast<double>(mesh.cells_per_side);
  const double tol = 1e-6 / static_cast<double>(mesh.cells_per_side);
  std::vector<int> low, high, sep;
  for (int k : nodes) {
    const double v = along_x ? mesh.nodes[k].x : mesh.nodes[k].y;
    if (std::abs(v - line) < tol) {
      sep.push_back(k);
    } else {
      (v < line ? low : high).push_back(k);
    }
  }
  nodes.clear();
  nodes.shrink_to_fit();
  if (along_x) {
    dissect(mesh, low, i0, mid, j0, j1, out);
    dissect(mesh, high, mid, i1, j0, j1, out);
  } else {
    dissect(mesh, low, i0, i1, j0, mid, out);
    dissect(mesh, high, i0, i1, mid, j1, out);
  }
  out.insert(out.end(), sep.begin(), sep.end());
}

std::vector<int> node_elimination_order(const Mesh& mesh) {
  std::vector<int> nodes(mesh.num_nodes());
  std::iota(nodes.begin(), nodes.end(), 0);
  if (mesh.cells_per_side == 0) return nodes;
  std::vector<int> out;
  out.reserve(nodes.size());
  const int n = static_cast<int>(mesh.cells_per_side);
  dissect(mesh, nodes, 0, n, 0, n, out);
  return out;
}

}  // namespace

struct ElasticSolver::Factor {
  // Structured meshes number the free DOFs in nested-dissection order and
  // factor without reordering; other meshes use AMD.
  bool preset = false;
  AmdFactor amd;
  PresetFactor natural;
  bool analyzed = false;

  void factorize(const SparseMatrix& K) {
    if (preset) {
      if (!analyzed) natural.analyzePattern(K);
      natural.factorize(K);
    } else {
      if (!analyzed) amd.analyzePattern(K);
      amd.factorize(K);
    }
    analyzed = true;
  }
  bool ok() const { return (preset ? natural.info() : amd.info()) == Eigen::Success; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    if (preset) return natural.solve(b);
    return amd.solve(b);
  }
};

ElasticSolver::ElasticSolver(const Mesh& mesh, std::vector<double> qp_ratio, const PhaseFieldParams& params,
                             std::span<const std::uint8_t> u_fixed)
    : mesh_(&mesh),
      qp_ratio_(std::move(qp_ratio)),
      params_(params),
      fixed_(u_fixed.begin(), u_fixed.end()),
      factor_(std::make_unique<Factor>()) {
  const std::size_t ndof = 2 * mesh.num_nodes();
  free_index_.assign(ndof, -1);
  for (int k : node_elimination_order(mesh)) {
    for (int c = 0; c < 2; ++c) {
      if (!fixed_[2 * k + c]) free_index_[2 * k + c] = num_free_++;
    }
  }
  factor_->preset = mesh.cells_per_side > 0;

  const auto D = isotropic_stiffness(params.E0, params.nu, params.plane_strain);
  reference_.resize(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& g = mesh.geometry[e];
    double B[3][6] = {};
    for (int a = 0; a < 3; ++a) {
      B[0][2 * a] = g.dndx[a];
      B[1][2 * a + 1] = g.dndy[a];
      B[2][2 * a] = g.dndy[a];
      B[2][2 * a + 1] = g.dndx[a];
    }
    double DB[3][6] = {};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 6; ++c)
        for (int k = 0; k < 3; ++k) DB[r][c] += D[r][k] * B[k][c];
    auto& K = reference_[e];
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += B[k][i] * DB[k][j];
        K[i * 6 + j] = g.area * s;
      }
  }

  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(mesh.num_elements() * 36);
  auto dof = [&](std::size_t e, int local) { return 2 * mesh.elements[e][local / 2] + (local % 2); };
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    for (int i = 0; i < 6; ++i) {
      const int fi = free_index_[dof(e, i)];
      if (fi < 0) continue;
      for (int j = 0; j < 6; ++j) {
        const int fj = free_index_[dof(e, j)];
        if (fj >= 0) triplets.emplace_back(fi, fj, 0.0);
      }
    }
  }
  stiffness_.resize(num_free_, num_free_);
  stiffness_.setFromTriplets(triplets.begin(), triplets.end());
  stiffness_.makeCompressed();

  scatter_.resize(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    for (int i = 0; i < 6; ++i) {
      const int fi = free_index_[dof(e, i)];
      for (int j = 0; j < 6; ++j) {
        const int fj = free_index_[dof(e, j)];
        scatter_[e][i * 6 + j] = (fi >= 0 && fj >= 0) ? entry_offset(stiffness_, fi, fj) : -1;
      }
    }
  }
  rhs_ = Eigen::VectorXd::Zero(num_free_);
}

ElasticSolver::~ElasticSolver() = default;
ElasticSolver::ElasticSolver(ElasticSolver&&) noexcept = default;
ElasticSolver& ElasticSolver::operator=(ElasticSolver&&) noexcept = default;

double ElasticSolver::element_scale(std::size_t e, std::span<const double> phi) const {
  const auto& tri = mesh_->elements[e];
  double s = 0.0;
  for (std::size_t q = 0; q < TriangleRule::size; ++q) {
    const auto& w = TriangleRule::bary[q];
    const double phq = clamp01(w[0] * phi[tri[0]] + w[1] * phi[tri[1]] + w[2] * phi[tri[2]]);
    const double omega = std::max(omega_unchecked(phq, params_).value, params_.omega_floor);
    s += omega * qp_ratio_[e * TriangleRule::size + q];
  }
  return s * TriangleRule::weight;
}

void ElasticSolver::assemble(std::span<const double> phi, const ConstraintSet& constraints) {
  double* values = stiffness_.valuePtr();
  std::fill(values, values + stiffness_.nonZeros(), 0.0);
  rhs_.setZero();
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
    const double s = element_scale(e, phi);
    const auto& K = reference_[e];
    const auto& tri = mesh_->elements[e];
    for (int i = 0; i < 6; ++i) {
      const int di = 2 * tri[i / 2] + (i % 2);
      const int fi = free_index_[di];
      if (fi < 0) continue;
      for (int j = 0; j < 6; ++j) {
        const int slot = scatter_[e][i * 6 + j];
        if (slot >= 0) {
          values[slot] += s * K[i * 6 + j];
        } else {
          const int dj = 2 * tri[j / 2] + (j % 2);
          rhs_[fi] -= s * K[i * 6 + j] * constraints.u_value[dj];
        }
      }
    }
  }
}

void ElasticSolver::update_rhs(std::span<const double> phi, const ConstraintSet& constraints) {
  rhs_.setZero();
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
    const auto& tri = mesh_->elements[e];
    bool touches = false;
    for (int a = 0; a < 3 && !touches; ++a) {
      touches = (fixed_[2 * tri[a]] && constraints.u_value[2 * tri[a]] != 0.0) ||
                (fixed_[2 * tri[a] + 1] && constraints.u_value[2 * tri[a] + 1] != 0.0);
    }
    if (!touches) continue;
    const double s = element_scale(e, phi);
    const auto& K = reference_[e];
    for (int i = 0; i < 6; ++i) {
      const int fi = free_index_[2 * tri[i / 2] + (i % 2)];
      if (fi < 0) continue;
      for (int j = 0; j < 6; ++j) {
        if (scatter_[e][i * 6 + j] >= 0) continue;
        rhs_[fi] -= s * K[i * 6 + j] * constraints.u_value[2 * tri[j / 2] + (j % 2)];
      }
    }
  }
}

void ElasticSolver::factorize() {
  factor_->factorize(stiffness_);
  ++factorizations_;
  if (!factor_->ok()) {
    has_factor_ = false;
    throw Error(ErrorCode::SingularSystem, "elasticity stiffness is not positive definite");
  }
  has_factor_ = true;
  factor_current_ = true;
  refactor_next_ = false;
}

// Conjugate gradients on the current stiffness, preconditioned by the last
// factorization. Returns false if the tolerance is not met in time.
bool ElasticSolver::preconditioned_cg(Eigen::VectorXd& x) {
  const double bnorm = rhs_.norm();
  if (bnorm == 0.0) {
    x.setZero();
    return true;
  }
  Eigen::VectorXd r = rhs_ - stiffness_ * x;
  Eigen::VectorXd z = factor_->solve(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd q(x.size());
  double rz = r.dot(z);
  for (int it = 0; it < kMaxCgIterations; ++it) {
    if (r.norm() <= kLinearTol * bnorm) {
      // confirm on the true residual; restart from it if the recurrence drifted
      r = rhs_ - stiffness_ * x;
      if (r.norm() <= kLinearTol * bnorm) {
        last_cg_iterations_ = it;
        cg_iterations_ += it;
        return true;
      }
      z = factor_->solve(r);
      p = z;
      rz = r.dot(z);
    }
    q.noalias() = stiffness_ * p;
    const double alpha = rz / p.dot(q);
    x += alpha * p;
    r -= alpha * q;
    z = factor_->solve(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  last_cg_iterations_ = kMaxCgIterations;
  cg_iterations_ += kMaxCgIterations;
  return (rhs_ - stiffness_ * x).norm() <= kLinearTol * bnorm;
}

std::vector<double> ElasticSolver::solve(std::span<const double> phi, const ConstraintSet& constraints) {
  const bool same_phi =
      assembled_ && std::equal(phi.begin(), phi.end(), assembled_phi_.begin(), assembled_phi_.end());
  if (same_phi) {
    update_rhs(phi, constraints);
  } else {
    assemble(phi, constraints);
    assembled_phi_.assign(phi.begin(), phi.end());
    assembled_ = true;
    factor_current_ = false;
  }

  std::vector<double> u(constraints.u_value.begin(), constraints.u_value.end());
  if (num_free_ == 0) return u;

  if (!has_factor_ || refactor_next_) factorize();
  Eigen::VectorXd x;
  if (factor_current_) {
    x = factor_->solve(rhs_);
  } else {
    x = last_x_.size() == num_free_ ? last_x_ : Eigen::VectorXd::Zero(num_free_);
    if (!preconditioned_cg(x)) {
      factorize();
      x = factor_->solve(rhs_);
    } else if (last_cg_iterations_ > kRefactorAfterCg) {
      refactor_next_ = true;
    }
  }
  if (!x.allFinite()) throw Error(ErrorCode::SingularSystem, "elasticity solve produced non-finite values");
  last_x_ = x;
  for (std::size_t d = 0; d < u.size(); ++d) {
    if (free_index_[d] >= 0) u[d] = x[free_index_[d]];
  }
  return u;
}

std::vector<double> ElasticSolver::internal_force(std::span<const double> phi, std::span<const double> u) const {
  std::vector<double> f(u.size(), 0.0);
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
    const double s = element_scale(e, phi);
    const auto& K = reference_[e];
    const auto& tri = mesh_->elements[e];
    double ue[6];
    for (int j = 0; j < 6; ++j) ue[j] = u[2 * tri[j / 2] + (j % 2)];
    for (int i = 0; i < 6; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 6; ++j) acc += K[i * 6 + j] * ue[j];
      f[2 * tri[i / 2] + (i % 2)] += s * acc;
    }
  }
  return f;
}

SymTensor2 ElasticSolver::element_strain(std::size_t e, std::span<const double> u) const {
  const auto& g = mesh_->geometry[e];
  const auto& tri = mesh_->elements[e];
  SymTensor2 eps;
  double dudy = 0.0, dvdx = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double ux = u[2 * tri[a]];
    const double uy = u[2 * tri[a] + 1];
    eps.xx += g.dndx[a] * ux;
    eps.yy += g.dndy[a] * uy;
    dudy += g.dndy[a] * ux;
    dvdx += g.dndx[a] * uy;
  }
  eps.xy = 0.5 * (dudy + dvdx);
  return eps;
}

LinearSystem assemble_elasticity(const Mesh& mesh, const MaterialField& material, std::span<const double> phi,
                                 const PhaseFieldParams& params, const ConstraintSet& constraints) {
  ElasticSolver solver(mesh, quadrature_ratios(mesh, material), params, constraints.u_fixed);
  solver.assemble(phi, constraints);
  const auto internal = solver.free_index();
  Eigen::VectorXi to_natural(static_cast<Eigen::Index>(solver.num_free()));
  int next = 0;
  for (int idx : internal)
    if (idx >= 0) to_natural[idx] = next++;
  const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm(to_natural);
  LinearSystem out;
  out.K = solver.stiffness().twistedBy(perm);
  out.f = perm * solver.rhs();
  return out;
}

// ---------------------------------------------------------------------------
// Damage subproblem

DamageProvider::DamageProvider(const Mesh& mesh, std::vector<double> qp_ratio, const PhaseFieldParams& params,
                               std::vector<std::uint8_t> phi_fixed)
    : mesh_(&mesh),
      qp_ratio_(std::move(qp_ratio)),
      params_(params),
      fixed_(std::move(phi_fixed)),
      history_(mesh.num_elements() * TriangleRule::size, 0.0) {
  const auto n = static_cast<int>(mesh.num_nodes());
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(mesh.num_elements() * 9);
  for (const auto& tri : mesh.elements)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) triplets.emplace_back(tri[a], tri[b], 0.0);
  jacobian_.resize(n, n);
  jacobian_.setFromTriplets(triplets.begin(), triplets.end());
  jacobian_.makeCompressed();
  scatter_.resize(mesh.num_elements());
  node_elements_.resize(mesh.num_nodes());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& tri = mesh.elements[e];
    for (int a = 0; a < 3; ++a) {
      node_elements_[tri[a]].push_back(static_cast<int>(e));
      for (int b = 0; b < 3; ++b) scatter_[e][a * 3 + b] = entry_offset(jacobian_, tri[a], tri[b]);
    }
  }
}

void DamageProvider::set_history(std::span<const double> history) {
  history_.assign(history.begin(), history.end());
}

double DamageProvider::element_energy(std::size_t e, std::span<const double> phi) const {
  const auto& tri = mesh_->elements[e];
  const auto& g = mesh_->geometry[e];
  const auto& p = params_;
  double gx = 0.0, gy = 0.0;
  for (int a = 0; a < 3; ++a) {
    gx += g.dndx[a] * phi[tri[a]];
    gy += g.dndy[a] * phi[tri[a]];
  }
  double local = 0.0;
  double rbar = 0.0;
  for (std::size_t q = 0; q < TriangleRule::size; ++q) {
    const auto& w = TriangleRule::bary[q];
    const std::size_t iq = e * TriangleRule::size + q;
    const double phq = w[0] * phi[tri[0]] + w[1] * phi[tri[1]] + w[2] * phi[tri[2]];
    const double r = qp_ratio_[iq];
    local += omega_unchecked(phq, p).value * history_[iq] + p.Gf * r * alpha_unchecked(phq, p).value / (p.c0 * p.l0);
    rbar += r;
  }
  rbar *= TriangleRule::weight;
  return g.area * (TriangleRule::weight * local + p.Gf * rbar * p.l0 / p.c0 * (gx * gx + gy * gy));
}

double DamageProvider::energy(std::span<const double> phi) const {
  double total = 0.0;
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) total += element_energy(e, phi);
  return total;
}

std::vector<double> DamageProvider::residual(std::span<const double> phi) const {
  std::vector<double> res(mesh_->num_nodes(), 0.0);
  const auto& p = params_;
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
    const auto& tri = mesh_->elements[e];
    const auto& g = mesh_->geometry[e];
    double gx = 0.0, gy = 0.0;
    for (int a = 0; a < 3; ++a) {
      gx += g.dndx[a] * phi[tri[a]];
      gy += g.dndy[a] * phi[tri[a]];
    }
    double rbar = 0.0;
    double out[3] = {0.0, 0.0, 0.0};
    for (std::size_t q = 0; q < TriangleRule::size; ++q) {
      const auto& w = TriangleRule::bary[q];
      const std::size_t iq = e * TriangleRule::size + q;
      const double phq = w[0] * phi[tri[0]] + w[1] * phi[tri[1]] + w[2] * phi[tri[2]];
      const double r = qp_ratio_[iq];
      const double src = omega_unchecked(phq, p).d1 * history_[iq] + p.Gf * r * alpha_unchecked(phq, p).d1 / (p.c0 * p.l0);
      for (int a = 0; a < 3; ++a) out[a] += TriangleRule::weight * src * w[a];
      rbar += r;
    }
    rbar *= TriangleRule::weight;
    const double diff = 2.0 * p.l0 * p.Gf * rbar / p.c0;
    for (int a = 0; a < 3; ++a) {
      res[tri[a]] += g.area * (out[a] + diff * (gx * g.dndx[a] + gy * g.dndy[a]));
    }
  }
  return res;
}

const SparseMatrix& DamageProvider::jacobian(std::span<const double> phi, std::span<const std::uint8_t> node_mask) {
  double* values = jacobian_.valuePtr();
  std::fill(values, values + jacobian_.nonZeros(), 0.0);
  const auto& p = params_;
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
    const auto& tri = mesh_->elements[e];
    if (!node_mask.empty() && !node_mask[tri[0]] && !node_mask[tri[1]] && !node_mask[tri[2]]) continue;
    const auto& g = mesh_->geometry[e];
    double rbar = 0.0;
    double ke[9] = {};
    for (std::size_t q = 0; q < TriangleRule::size; ++q) {
      const auto& w = TriangleRule::bary[q];
      const std::size_t iq = e * TriangleRule::size + q;
      const double phq = w[0] * phi[tri[0]] + w[1] * phi[tri[1]] + w[2] * phi[tri[2]];
      const double r = qp_ratio_[iq];
      const double curv = omega_unchecked(phq, p).d2 * history_[iq] + p.Gf * r * alpha_unchecked(phq, p).d2 / (p.c0 * p.l0);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) ke[a * 3 + b] += TriangleRule::weight * curv * w[a] * w[b];
      rbar += r;
    }
    rbar *= TriangleRule::weight;
    const double diff = 2.0 * p.l0 * p.Gf * rbar / p.c0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double lap = g.dndx[a] * g.dndx[b] + g.dndy[a] * g.dndy[b];
        values[scatter_[e][a * 3 + b]] += g.area * (ke[a * 3 + b] + diff * lap);
      }
  }
  return jacobian_;
}

DamageProvider assemble_damage_subproblem(const Mesh& mesh, const MaterialField& material,
                                          std::span<const double> history, const PhaseFieldParams& params,
                                          std::span<const int> crack_nodes) {
  std::vector<std::uint8_t> fixed(mesh.num_nodes(), 0);
  for (int k : crack_nodes) fixed[k] = 1;
  DamageProvider provider(mesh, quadrature_ratios(mesh, material), params, std::move(fixed));
  provider.set_history(history);
  return provider;
}

std::vector<double> solve_damage(DamageProvider& provider, std::span<const double> phi_lower,
                                 std::span<const double> phi_start, const DamageSolveOptions& options,
                                 DamageSolveStats* stats) {
  const std::size_t n = provider.mesh().num_nodes();
  const auto fixed = provider.fixed();
  std::vector<double> lower(n);
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = fixed[i] ? 1.0 : std::clamp(phi_lower[i], 0.0, 1.0);
    phi[i] = std::clamp(phi_start[i], lower[i], 1.0);
  }

  std::vector<std::uint8_t> active(n, 0);
  std::vector<std::uint8_t> inactive(n, 0);
  std::vector<int> free_nodes;
  std::vector<int> reduced(n, -1);
  std::vector<double> trial(n);
  std::vector<int> element_stamp(provider.mesh().num_elements(), -1);
  int stamp = 0;
  double norm0 = -1.0;

  auto projected_norm = [&](const std::vector<double>& x, const std::vector<double>& g) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (fixed[i]) continue;
      const bool at_lower = x[i] <= lower[i] && g[i] > 0.0;
      const bool at_upper = x[i] >= 1.0 && g[i] < 0.0;
      if (!at_lower && !at_upper) norm = std::max(norm, std::abs(g[i]));
    }
    return norm;
  };

  for (int it = 0; it <= options.max_iterations; ++it) {
    const auto g = provider.residual(phi);
    free_nodes.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const bool at_lower = phi[i] <= lower[i] && g[i] > 0.0;
      const bool at_upper = phi[i] >= 1.0 && g[i] < 0.0;
      active[i] = fixed[i] || at_lower || at_upper;
      if (!active[i]) free_nodes.push_back(static_cast<int>(i));
    }
    double norm = 0.0;
    for (int i : free_nodes) norm = std::max(norm, std::abs(g[i]));
    if (norm0 < 0.0) norm0 = norm;
    if (stats) {
      stats->iterations = it;
      stats->residual = norm;
    }
    if (norm <= options.abs_tol || norm <= options.rel_tol * norm0) return phi;
    if (it == options.max_iterations) break;

    // Reduced Newton system on the inactive nodes, built column by column
    // from the full Jacobian (row indices stay sorted).
    for (std::size_t i = 0; i < n; ++i) inactive[i] = !active[i];
    const auto& J = provider.jacobian(phi, inactive);
    const auto m = static_cast<int>(free_nodes.size());
    for (int k = 0; k < m; ++k) reduced[free_nodes[k]] = k;
    SparseMatrix H(m, m);
    std::vector<int> diag(m, -1);
    {
      std::vector<int> outer(m + 1, 0);
      std::vector<int> inner;
      std::vector<double> values;
      for (int k = 0; k < m; ++k) {
        const int col = free_nodes[k];
        for (int q = J.outerIndexPtr()[col]; q < J.outerIndexPtr()[col + 1]; ++q) {
          const int row = reduced[J.innerIndexPtr()[q]];
          if (row < 0) continue;
          if (row == k) diag[k] = static_cast<int>(inner.size());
          inner.push_back(row);
          values.push_back(J.valuePtr()[q]);
        }
        outer[k + 1] = static_cast<int>(inner.size());
      }
      H.resizeNonZeros(static_cast<Eigen::Index>(inner.size()));
      std::copy(outer.begin(), outer.end(), H.outerIndexPtr());
      std::copy(inner.begin(), inner.end(), H.innerIndexPtr());
      std::copy(values.begin(), values.end(), H.valuePtr());
    }
    double max_diag = 0.0;
    for (int k = 0; k < m; ++k) max_diag = std::max(max_diag, std::abs(H.valuePtr()[diag[k]]));
    Eigen::VectorXd rhs(m);
    for (int k = 0; k < m; ++k) rhs[k] = -g[free_nodes[k]];

    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt;
    ldlt.analyzePattern(H);
    double shift = 0.0;
    double applied = 0.0;
    Eigen::VectorXd step;
    for (int attempt = 0; attempt < 30; ++attempt) {
      for (int k = 0; k < m; ++k) H.valuePtr()[diag[k]] += shift - applied;
      applied = shift;
      ldlt.factorize(H);
      const bool pd = ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all();
      if (pd) {
        step = ldlt.solve(rhs);
        break;
      }
      shift = shift == 0.0 ? 1e-10 * std::max(max_diag, 1e-300) : shift * 10.0;
    }
    for (int i : free_nodes) reduced[i] = -1;
    if (step.size() != m) throw Error(ErrorCode::NoConvergence, "damage Newton matrix could not be regularised");
    if (step.lpNorm<Eigen::Infinity>() <= options.step_tol) {
      for (int k = 0; k < m; ++k) {
        const int i = free_nodes[k];
        phi[i] = std::clamp(phi[i] + step[k], lower[i], 1.0);
      }
      return phi;
    }

    // Backtracking on the exact local energy change.
    bool accepted = false;
    double t = 1.0;
    for (int ls = 0; ls < 40 && !accepted; ++ls, t *= 0.5) {
      trial = phi;
      for (int k = 0; k < m; ++k) {
        const int i = free_nodes[k];
        trial[i] = std::clamp(phi[i] + t * step[k], lower[i], 1.0);
      }
      ++stamp;
      double dE = 0.0;
      double lin = 0.0;
      for (int i : free_nodes) {
        if (trial[i] == phi[i]) continue;
        lin += g[i] * (trial[i] - phi[i]);
        for (int e : provider.node_elements()[i]) {
          if (element_stamp[e] == stamp) continue;
          element_stamp[e] = stamp;
          dE += provider.element_energy(e, trial) - provider.element_energy(e, phi);
        }
      }
      if (lin == 0.0) break;
      if (dE <= 1e-4 * lin) accepted = true;
    }
    if (!accepted) {
      // Near the solution the energy change drowns in rounding; accept the
      // full step when it still lowers the projected residual.
      for (int k = 0; k < m; ++k) {
        const int i = free_nodes[k];
        trial[i] = std::clamp(phi[i] + step[k], lower[i], 1.0);
      }
      const double next = projected_norm(trial, provider.residual(trial));
      if (!(next < norm)) {
        throw Error(ErrorCode::NoConvergence,
                    fmt::format("damage line search stalled at iteration {} (residual {:.3e})", it, norm));
      }
    }
    phi.swap(trial);
  }
  throw Error(ErrorCode::NoConvergence,
              fmt::format("damage Newton hit {} iterations", options.max_iterations));
}

// ---------------------------------------------------------------------------
// Staggered scheme

namespace {

std::vector<std::uint8_t> crack_mask(std::size_t num_nodes, std::span<const int> crack_nodes) {
  std::vector<std::uint8_t> mask(num_nodes, 0);
  for (int k : crack_nodes) mask[k] = 1;
  return mask;
}

}  // namespace

PhaseFieldModel::PhaseFieldModel(const Mesh& mesh, const MaterialField& material, const PhaseFieldParams& params,
                                 std::span<const int> crack_nodes)
    : mesh_(&mesh),
      params_(params),
      qp_ratio_(quadrature_ratios(mesh, material)),
      constraints_([&] {
        auto c = dataset_constraints(mesh, 0.0);
        c.phi_fixed = crack_mask(mesh.num_nodes(), crack_nodes);
        return c;
      }()),
      elastic_(mesh, qp_ratio_, params, constraints_.u_fixed),
      damage_(mesh, qp_ratio_, params, constraints_.phi_fixed) {}

SimulationState PhaseFieldModel::initial_state() const {
  SimulationState s;
  s.u.assign(2 * mesh_->num_nodes(), 0.0);
  s.phi.assign(mesh_->num_nodes(), 0.0);
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    if (constraints_.phi_fixed[k]) s.phi[k] = 1.0;
  }
  s.history.assign(mesh_->num_elements() * TriangleRule::size, 0.0);
  return s;
}

std::vector<double> PhaseFieldModel::driving_energy(std::span<const double> u) const {
  std::vector<double> psi(mesh_->num_elements() * TriangleRule::size);
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
    const auto eps = elastic_.element_strain(e, u);
    for (std::size_t q = 0; q < TriangleRule::size; ++q) {
      const std::size_t iq = e * TriangleRule::size + q;
      const double E_local = qp_ratio_[iq] * params_.E0;
      psi[iq] = crack_driving_energy(effective_stress(eps, E_local, params_), E_local);
    }
  }
  return psi;
}

SimulationState PhaseFieldModel::staggered_step(SimulationState state, double top_left_displacement,
                                                const StaggeredOptions& options) {
  set_top_profile(constraints_, *mesh_, top_left_displacement);
  const std::vector<double> phi_step_start = state.phi;
  auto u = elastic_.solve(state.phi, constraints_);

  int iterations = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    iterations = it;
    const auto psi = driving_energy(u);
    for (std::size_t q = 0; q < psi.size(); ++q) {
      state.history[q] = update_history({state.history[q], {}, {}}, psi[q]).history;
    }
    damage_.set_history(state.history);
    auto phi_new = solve_damage(damage_, phi_step_start, state.phi, options.damage);

    double change = 0.0;
    for (std::size_t k = 0; k < phi_new.size(); ++k) change = std::max(change, std::abs(phi_new[k] - state.phi[k]));
    state.phi = std::move(phi_new);
    if (change > 0.0) u = elastic_.solve(state.phi, constraints_);
    if (change < options.phi_tol) break;
  }

  state.u = std::move(u);
  state.curve_displacement.push_back(top_left_displacement);
  state.curve_force.push_back(reaction_force(state));
  state.staggered_iterations.push_back(iterations);
  ++state.step;
  return state;
}

double PhaseFieldModel::reaction_force(const SimulationState& state) const {
  const auto f = elastic_.internal_force(state.phi, state.u);
  double total = 0.0;
  for (int k : mesh_->top) total += f[2 * k + 1];
  return total;
}

double SimulationResult::peak_force() const {
  return curve_force.empty() ? 0.0 : *std::max_element(curve_force.begin(), curve_force.end());
}

SimulationResult run_simulation(const MaterialField& material, const Mesh& mesh, const SimulationConfig& config,
                                const StepObserver& observer) {
  config.load.validate();
  SimulationResult result;
  const double ratio = config.params.l0 / mesh.h;
  if (ratio < kMinLengthToMeshRatio) {
    const auto msg = fmt::format("l0/h = {:.3f} is below {}; crack paths may be mesh dependent", ratio,
                                 kMinLengthToMeshRatio);
    if (!config.allow_coarse_mesh) throw Error(ErrorCode::InvalidResolution, msg);
    result.warnings.push_back(msg);
  }

  const auto crack = initial_crack_nodes(mesh, config.crack);
  PhaseFieldModel model(mesh, material, config.params, crack);
  auto state = model.initial_state();
  double peak = 0.0;
  for (std::size_t step = 0; step <= config.load.n_steps; ++step) {
    state = model.staggered_step(std::move(state), config.load.displacement_at(step), config.staggered);
    if (observer) observer(state, mesh);
    const double force = state.curve_force.back();
    peak = std::max(peak, force);
    if (config.stop_below_peak_fraction > 0.0 && peak > 0.0 && force < config.stop_below_peak_fraction * peak) break;
  }

  result.u = std::move(state.u);
  result.phi = std::move(state.phi);
  result.curve_displacement = std::move(state.curve_displacement);
  result.curve_force = std::move(state.curve_force);
  result.staggered_iterations = std::move(state.staggered_iterations);
  result.steps_completed = result.curve_force.size();
  return result;
}

SimulationResult run_simulation(const MaterialField& material, const SimulationConfig& config,
                                const StepObserver& observer) {
  const auto mesh = build_structured_mesh(config.mesh_n);
  return run_simulation(material, mesh, config, observer);
}

}  // namespace crackpath
