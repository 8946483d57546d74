#include "crackpath/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "crackpath/error.hpp"

namespace crackpath {

namespace {

constexpr double kPhiTol = 1e-12;

void check_phi(double phi) {
  if (!(phi >= -kPhiTol && phi <= 1.0 + kPhiTol)) {
    throw Error(ErrorCode::OutOfRange, fmt::format("damage {} outside [0, 1]", phi));
  }
}

}  // namespace

PhaseFieldParams derive_params(double E0, double nu, double Gf, double ft, double l0) {
  if (!(E0 > 0.0 && Gf > 0.0 && ft > 0.0 && l0 > 0.0 && nu > 0.0 && nu < 0.5)) {
    throw Error(ErrorCode::NonPositiveInput, "E0, Gf, ft, l0 must be positive and 0 < nu < 0.5");
  }
  PhaseFieldParams p;
  p.E0 = E0;
  p.nu = nu;
  p.Gf = Gf;
  p.ft = ft;
  p.l0 = l0;
  p.xi = 2.0;
  p.a2 = -0.5;
  p.c0 = std::numbers::pi;
  p.l_ch = E0 * Gf / (ft * ft);
  p.a1 = 4.0 * p.l_ch / (p.c0 * l0);
  return p;
}

Derivs alpha_unchecked(double phi, const PhaseFieldParams& p) {
  return {p.xi * phi + (1.0 - p.xi) * phi * phi, p.xi + 2.0 * (1.0 - p.xi) * phi, 2.0 * (1.0 - p.xi)};
}

Derivs omega_unchecked(double phi, const PhaseFieldParams& p) {
  const double s = 1.0 - phi;
  const double num = s * s;
  const double dnum = -2.0 * s;
  const double d2num = 2.0;
  const double poly = p.a1 * phi * (1.0 + p.a2 * phi);
  const double dpoly = p.a1 * (1.0 + 2.0 * p.a2 * phi);
  const double d2poly = 2.0 * p.a1 * p.a2;
  const double den = num + poly;
  const double dden = dnum + dpoly;

  const double cross = dnum * poly - num * dpoly;
  Derivs out;
  out.value = num / den;
  out.d1 = cross / (den * den);
  out.d2 = (d2num * poly - num * d2poly) / (den * den) - 2.0 * cross * dden / (den * den * den);
  return out;
}

Derivs geometric_crack_fn(double phi, const PhaseFieldParams& p) {
  check_phi(phi);
  return alpha_unchecked(phi, p);
}

Derivs degradation_fn(double phi, const PhaseFieldParams& p) {
  check_phi(phi);
  return omega_unchecked(phi, p);
}

double crack_density(double phi, std::array<double, 2> grad_phi, const PhaseFieldParams& p) {
  check_phi(phi);
  const double g2 = grad_phi[0] * grad_phi[0] + grad_phi[1] * grad_phi[1];
  return (alpha_unchecked(phi, p).value / p.l0 + p.l0 * g2) / p.c0;
}

double major_principal(const SymTensor2& t) {
  const double mean = 0.5 * (t.xx + t.yy);
  const double half_diff = 0.5 * (t.xx - t.yy);
  return mean + std::hypot(half_diff, t.xy);
}

double crack_driving_energy(const SymTensor2& effective_stress, double E_local) {
  const double s1 = std::max(0.0, major_principal(effective_stress));
  return s1 * s1 / (2.0 * E_local);
}

Stiffness3 isotropic_stiffness(double E, double nu, bool plane_strain) {
  if (plane_strain) {
    const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double mu = E / (2.0 * (1.0 + nu));
    return {{{lambda + 2.0 * mu, lambda, 0.0}, {lambda, lambda + 2.0 * mu, 0.0}, {0.0, 0.0, mu}}};
  }
  const double f = E / (1.0 - nu * nu);
  return {{{f, f * nu, 0.0}, {f * nu, f, 0.0}, {0.0, 0.0, f * (1.0 - nu) / 2.0}}};
}

SymTensor2 effective_stress(const SymTensor2& strain, double E_local, const PhaseFieldParams& p) {
  const auto D = isotropic_stiffness(E_local, p.nu, p.plane_strain);
  const std::array<double, 3> eps = {strain.xx, strain.yy, 2.0 * strain.xy};
  SymTensor2 s;
  s.xx = D[0][0] * eps[0] + D[0][1] * eps[1] + D[0][2] * eps[2];
  s.yy = D[1][0] * eps[0] + D[1][1] * eps[1] + D[1][2] * eps[2];
  s.xy = D[2][0] * eps[0] + D[2][1] * eps[1] + D[2][2] * eps[2];
  return s;
}

QuadraturePointState update_history(QuadraturePointState state, double new_energy) {
  state.history = std::max(state.history, new_energy);
  return state;
}

double regularized_crack_surface(const Mesh& mesh, std::span<const double> nodal_phi, const PhaseFieldParams& p) {
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& tri = mesh.elements[e];
    const auto& g = mesh.geometry[e];
    std::array<double, 2> grad{0.0, 0.0};
    for (int a = 0; a < 3; ++a) {
      grad[0] += g.dndx[a] * nodal_phi[tri[a]];
      grad[1] += g.dndy[a] * nodal_phi[tri[a]];
    }
    double acc = 0.0;
    for (const auto& w : TriangleRule::bary) {
      const double phi = w[0] * nodal_phi[tri[0]] + w[1] * nodal_phi[tri[1]] + w[2] * nodal_phi[tri[2]];
      acc += crack_density(phi, grad, p);
    }
    total += acc * TriangleRule::weight * g.area;
  }
  return total;
}

}  // namespace crackpath
