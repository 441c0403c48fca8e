#pragma once
// Exact integer resonance arithmetic for the Airy dispersion ω(n) = n³ and
// the symbol-weighted quartic multiplier built on it.
//
// On zero-sum tuples the cube sums factor:
//   quadruples:  n₁³+n₂³+n₃³+n₄³ = -3 (n₁+n₂)(n₁+n₃)(n₂+n₃)
//   triples:     n₁³+n₂³+n₃³     =  3 n₁n₂n₃
// Both are computed from the factored form and asserted against the direct
// cube sum in wide integers; |n| up to 2^20 stays exact.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kdvlab/symbols.hpp"

namespace kdvlab {

// Resonance function on zero-sum quadruples (n₄ = -(n₁+n₂+n₃) implied by the
// first three arguments must hold; violations throw).
long long omega4(int n1, int n2, int n3, int n4);

// Resonance function on zero-sum triples.
long long omega3(int n1, int n2, int n3);

// Resonance function on zero-sum sextuples, evaluated as the sum of two
// quadruple resonances through the pivot p = n₄+n₅+n₆ and asserted against
// the direct cube sum.
long long omega6(int n1, int n2, int n3, int n4, int n5, int n6);

// Non-resonance predicate (*) for zero-sum quadruples:
// (n₁+n₂)(n₁+n₃)(n₂+n₃) ≠ 0, equivalently Ω₄ ≠ 0.
bool star_nonresonant(int n1, int n2, int n3, int n4);

// Quartic energy multiplier ψ_a(n̄) = Σᵢ a(nᵢ) nᵢ for an even symbol a.
double psi_multiplier(const Symbol& a, int n1, int n2, int n3, int n4);

// ---------------------------------------------------------------------------
// Multiplier bound probe: measures the pointwise size of ψ against the
// heuristic gain  ã(2^{k₁*}) |Ω| / 2^{2k₁*}  where k₁* is the largest dyadic
// block in the tuple and ã is the blockwise growth law 2^{2k(s+eps)}.
// Tuples are classified by how many of the four blocks reach the top:
//   case 1: all four blocks >= k₁*-1
//   case 2: exactly three
//   case 3: exactly two
// (zero-sum makes "exactly one" impossible; this is asserted).
// Resonant tuples (Ω = 0) are skipped and counted.
// ---------------------------------------------------------------------------

struct MultiplierProbeRow {
  int case_id = 0;      // 1, 2, 3
  int k1star = 0;       // top dyadic block
  double sup_ratio = 0.0;
  long long count = 0;
};

struct MultiplierProbeReport {
  std::vector<MultiplierProbeRow> rows;  // sorted by (case_id, k1star)
  long long sampled = 0;                 // tuples inspected (incl. resonant)
  long long resonant_skipped = 0;
  double sup_overall = 0.0;
  double sup_by_case[4] = {0, 0, 0, 0};  // index by case_id, [0] unused

  // "case,k1star,ratio,count" rows; ratio is the sup within the cell.
  std::string to_csv() const;
};

// Random sampling over zero-sum quadruples with |nᵢ| <= n_range: draws
// (n₁,n₂,n₃) uniformly, keeps tuples whose implied n₄ stays in range.
MultiplierProbeReport multiplier_bound_probe_random(double s, double eps,
                                                    int n_range,
                                                    long long tuple_count,
                                                    uint64_t seed);

// Exhaustive sweep over all zero-sum quadruples with |nᵢ| <= n_range.
MultiplierProbeReport multiplier_bound_probe_exhaustive(double s, double eps,
                                                        int n_range);

}  // namespace kdvlab
