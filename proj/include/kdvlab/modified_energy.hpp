#pragma once
// Quartic and sextic interaction sums along a renormalized trajectory, and
// the two identities built from them.
//
// Everything here works on a stored Trajectory of the renormalized equation
// (defocusing or focusing). Writing û(n,t) for the coefficients of the single
// component and ψ_a(n̄) = Σ a(n_i) n_i, the basic objects are
//
//   r4(a; S)  = Im Σ_{n̄ ∈ S} ψ_a(n̄) ∫ û(n₁)û(n₂)û(n₃)û(n₄) dt,
//   b4(a; S)  = Im Σ_{n̄ ∈ S} (ψ_a(n̄)/(iΩ(n̄))) [ Π û(n_i) ]_{t₀}^{t₁},
//   term I    = Im Σ_{n̄ ∈ S} (ψ_a n₁ / Ω) ∫ |û(n₁)|² û(n₁) û(n₂)û(n₃)û(n₄) dt,
//   term II   = Im Σ_{n̄ ∈ S} (ψ_a n₁ / Ω) ∫ T⋆(n₁,t) û(n₂)û(n₃)û(n₄) dt,
//
// where S is a set of nonresonant zero-sum quadruples, Ω(n̄) the quartic
// resonance function, and T⋆(n,t) the nonresonant triple sum
// Σ_{m₁+m₂+m₃=n, (m₁+m₂)(m₁+m₃)(m₂+m₃)≠0} û(m₁)û(m₂)û(m₃).
//
// Identities verified downstream (σ = equation sign):
//   fundamental:  ‖u(t₁)‖²_{H^a} - ‖u(t₀)‖²_{H^a} = σ c_quartic · r4(all)
//   boundary:     r4(above M) = b4(above M) + σ (c_termI·I + c_termII·II)
// both exact for the truncated flow up to time-quadrature and solver error.
//
// All four sums are purely imaginary as complex sums (the n̄ → -n̄ involution
// conjugates and negates each term); the real part is asserted against the
// accumulated absolute mass and the imaginary part returned.

#include <string>

#include "kdvlab/integrator.hpp"
#include "kdvlab/symbols.hpp"

namespace kdvlab {

// Which zero-sum nonresonant quadruples a sum runs over.
enum class TupleBand {
  all,      // every |n_i| <= n_max
  below,    // all four |n_i| <= M
  above,    // max_i |n_i| > M
};

struct LedgerOptions {
  // Coarse-grid target for the sextic class series: the stride is the largest
  // divisor of the sample count K with K/stride <= coarse_samples.
  int coarse_samples = 128;
  // |Ω_out + Ω_in| above which the sextic pair stage switches from
  // piecewise-cubic Filon to third-order endpoint expansion.
  double phi_split = 2048.0;
  // Pair-stage pruning: pairs whose magnitude bound falls below prune_rel
  // times the largest pair bound are skipped; the sum of skipped bounds is
  // reported. 0 disables pruning.
  double prune_rel = 1e-14;
  // Tolerance recorded in the ledger for the boundary identity.
  double tol_identity = 1e-6;
  // Relative tolerance of the does-it-solve spot check on the trajectory.
  double tol_solves = 1e-6;
};

struct SexticTerms {
  double term_I = 0.0;
  double term_II = 0.0;
  // Rigorous bound on the total mass dropped by pair pruning in term II.
  double skipped_bound = 0.0;
};

// Preconditions shared by the sums below (violations throw
// std::invalid_argument):
//  * trajectory kind is renormalized (any sign), single component;
//  * sample rate (samples-1)/(t1-t0) >= 64 * n_max;
//  * a stored slice re-evolved at dt_internal/4 matches the next stored slice
//    to tol_solves in relative L²  (the trajectory actually solves the
//    equation it claims to);
//  * for banded sums, M >= 1 and a power of two.
// Degenerate bands (below with M >= n_max meaning "everything", above with
// M >= n_max meaning "nothing") are allowed and give exact zeros where the
// tuple set is empty.

double r4_sum(const Trajectory& traj, const Symbol& a, TupleBand band = TupleBand::all,
              int M = 0);

double b4_boundary(const Trajectory& traj, const Symbol& a, TupleBand band, int M);

SexticTerms r6_terms(const Trajectory& traj, const Symbol& a, int M,
                     const LedgerOptions& opts = {});

struct FundamentalReport {
  double lhs = 0.0;       // ‖u(t₁)‖²_a - ‖u(t₀)‖²_a
  double rhs = 0.0;       // σ c_quartic r4(all)
  double residual = 0.0;  // |lhs-rhs| / max(‖u(t₀)‖²_a, |lhs|, |rhs|)
};

FundamentalReport fundamental_identity_residual(const Trajectory& traj, const Symbol& a);

// One audited differentiation-by-parts ledger at threshold M.
struct EnergyLedger {
  std::string symbol_name;
  int M = 0;
  double t0 = 0.0, t1 = 0.0;
  int samples = 0;
  int sign = 0;
  double r4_full = 0.0;
  double r4_below_M = 0.0;
  double r4_above_M = 0.0;
  double b4 = 0.0;
  double term_I = 0.0;
  double term_II = 0.0;
  double skipped_bound = 0.0;
  double rhs_above = 0.0;       // b4 + σ(c_I I + c_II II)
  double residual_rel = 0.0;    // boundary-identity residual
  double tol_identity = 0.0;
};

EnergyLedger build_energy_ledger(const Trajectory& traj, const Symbol& a,
                                 const std::string& symbol_name, int M,
                                 const LedgerOptions& opts = {});

// Deterministic JSON serialization (fixed key order) including the calibrated
// constants the identities were evaluated with.
std::string ledger_to_json(const EnergyLedger& ledger);

}  // namespace kdvlab
