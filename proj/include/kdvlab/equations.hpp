#pragma once
// The evolution family on the torus. All members share the Airy linear part
// u_t + u_xxx = N(u); evaluate_rhs returns only the nonlinear tendency N in
// coefficient space (integrators handle the linear phase exactly).
//
//   mkdv               N = sign * u² u_x
//   renormalized_mkdv  N = sign * (u² - fint u²/2π) u_x   (mean-subtracted)
//   kdv                N = u u_x
//   kdv_mkdv           N = u u_x + sign * u² u_x
//   mkdv_mkdv_system   N_u = ∂x(u v²),  N_v = ∂x(v u²)
//
// sign = +1 is the defocusing branch, -1 the focusing one; the kinds without
// a ± carry sign 0.

#include <cstdint>
#include <string>
#include <vector>

#include "kdvlab/spectrum.hpp"

namespace kdvlab {

enum class EqKind {
  mkdv,
  renormalized_mkdv,
  kdv,
  kdv_mkdv,
  mkdv_mkdv_system,
};

const char* eq_kind_name(EqKind k);
EqKind eq_kind_from_name(const std::string& name);

struct EquationSpec {
  EqKind kind = EqKind::mkdv;
  int sign = +1;  // ±1 for signed kinds, 0 otherwise

  static EquationSpec mkdv(int sign);
  static EquationSpec renormalized_mkdv(int sign);
  static EquationSpec kdv();
  static EquationSpec kdv_mkdv(int sign);
  static EquationSpec mkdv_mkdv_system();

  int n_components() const { return kind == EqKind::mkdv_mkdv_system ? 2 : 1; }
  bool has_sign() const {
    return kind == EqKind::mkdv || kind == EqKind::renormalized_mkdv ||
           kind == EqKind::kdv_mkdv;
  }
  void validate() const;  // throws on sign/kind mismatch
};

// One or two spectral components plus the model time they belong to.
struct SystemState {
  std::vector<SpectralField> comps;
  double time = 0.0;
};

// Nonlinear tendency in coefficient space, one field per component.
// De-aliased (cubic products on grids >= 4 n_max + 1), Hermitian by
// construction, zero mode exactly zero.
std::vector<SpectralField> evaluate_rhs(const EquationSpec& eq,
                                        const SystemState& state);

// ---------------------------------------------------------------------------
// Renormalized-split algebra. For a real field u define the raw cubic sums
//
//   resonant(n)    = i n u^(n) u^(-n) u^(n)
//   nonresonant(n) = i n Σ_{n₁+n₂+n₃=n, (n₁+n₂)(n₁+n₃)(n₂+n₃)≠0}
//                        u^(n₁) u^(n₂) u^(n₃)
//
// The calibrated recombination identity (see calibration.hpp) is
//   evaluate_rhs(renormalized_mkdv, u) = sign * (c_resonant * resonant
//                                              + c_nonresonant * nonresonant).
// ---------------------------------------------------------------------------

struct NonlinearitySplit {
  SpectralField resonant;
  SpectralField nonresonant;
};

NonlinearitySplit split_renormalized(const SpectralField& u);

// ---------------------------------------------------------------------------
// Conserved quantities (physical-space integrals over the torus).
// ---------------------------------------------------------------------------

// ∫ u dx = coef(0).
double mean_integral(const SpectralField& u);

// ∫ u² dx  ( = l2_norm_sq / 2π ).
double mass_integral(const SpectralField& u);

// Hamiltonian energy of the flow:
//   mkdv / renormalized_mkdv:  ∫ u_x²/2 + sign u⁴/12
//   kdv:                       ∫ u_x²/2 + u³/6
//   kdv_mkdv:                  ∫ u_x²/2 + u³/6 + sign u⁴/12
//   system:                    ∫ (u_x² + v_x²)/2 + u² v²/2
double energy_integral(const EquationSpec& eq, const SystemState& state);

// ---------------------------------------------------------------------------
// Field-level building blocks for the gauge and Miura transports (the
// trajectory-level wrappers live with the integrator).
// ---------------------------------------------------------------------------

// u(x) -> u(x - shift): coef(n) *= e^{-i n shift}.
SpectralField translate_field(const SpectralField& u, double shift);

// v = alpha u² + beta u_x, alias-free (output band 2 n_max).
SpectralField miura_field(const SpectralField& u, double alpha, double beta);

}  // namespace kdvlab
