#pragma once

#include <array>
#include <span>

#include "crackpath/mesh.hpp"

namespace crackpath {

/// Constants of the unified phase-field model with the length-scale
/// insensitive choice xi = 2, a2 = -1/2, c0 = pi, a1 = 4 l_ch / (c0 l0).
struct PhaseFieldParams {
  double E0 = 210000.0;
  double nu = 0.3;
  double Gf = 2.7;
  double ft = 2445.42;
  double l0 = 0.015;
  double xi = 2.0;
  double a1 = 0.0;
  double a2 = -0.5;
  double c0 = 0.0;
  double l_ch = 0.0;
  double omega_floor = 1e-6;
  bool plane_strain = true;
};

/// Fills l_ch, c0, xi, a1, a2 from the material constants. Throws
/// NonPositiveInput unless every input is positive and 0 < nu < 0.5.
PhaseFieldParams derive_params(double E0, double nu, double Gf, double ft, double l0);

/// A scalar function with its first two derivatives.
struct Derivs {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// alpha(phi) = xi phi + (1 - xi) phi^2. Throws OutOfRange off [0,1].
Derivs geometric_crack_fn(double phi, const PhaseFieldParams& p);

/// omega(phi) = (1-phi)^2 / ((1-phi)^2 + a1 phi (1 + a2 phi)).
Derivs degradation_fn(double phi, const PhaseFieldParams& p);

/// Same functions without the range check, for solver inner loops where phi
/// comes from an interpolated (already bounded) field.
Derivs alpha_unchecked(double phi, const PhaseFieldParams& p);
Derivs omega_unchecked(double phi, const PhaseFieldParams& p);

/// gamma = (alpha(phi)/l0 + l0 |grad phi|^2) / c0
double crack_density(double phi, std::array<double, 2> grad_phi, const PhaseFieldParams& p);

/// Symmetric 2x2 tensor; xy is the tensor (not engineering) shear component.
struct SymTensor2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

double major_principal(const SymTensor2& t);

/// Undegraded tensile energy (max(0, s1))^2 / (2 E) with s1 the major
/// principal effective stress and E the local Young's modulus.
double crack_driving_energy(const SymTensor2& effective_stress, double E_local);

/// In-plane isotropic stiffness in Voigt form [xx, yy, 2xy].
using Stiffness3 = std::array<std::array<double, 3>, 3>;
Stiffness3 isotropic_stiffness(double E, double nu, bool plane_strain);

SymTensor2 effective_stress(const SymTensor2& strain, double E_local, const PhaseFieldParams& p);

struct QuadraturePointState {
  double history = 0.0;
  SymTensor2 strain;
  SymTensor2 effective_stress;
};

/// History is the running maximum of the driving energy.
QuadraturePointState update_history(QuadraturePointState state, double new_energy);

/// Integral of the crack density over the mesh (3-point Gauss per element).
double regularized_crack_surface(const Mesh& mesh, std::span<const double> nodal_phi, const PhaseFieldParams& p);

}  // namespace crackpath
